// Command-line entry point: verification suites, curvature tables, norm
// evaluation, and evolution runs, with JSON reports and CSV data files.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>

#include <CLI11.hpp>

#include "hanzawa/verify.hpp"

using namespace hanzawa;

namespace {

int run_verify(const std::string& surface_cfg, const std::string& suite,
               int seeds, const std::string& out_path) {
  auto t0 = std::chrono::steady_clock::now();
  Json cfg = surface_cfg.empty() ? Json::object() : load_config(surface_cfg);
  if (!cfg.contains("kind") && !cfg.contains("surface"))
    cfg["kind"] = "sphere";
  ReferenceSurface S = surface_from_config(cfg);

  Report report;
  report.tool_version = tool_version();
  report.config_hash =
      fnv1a_hex(cfg.dump() + "|" + suite + "|" + std::to_string(seeds));

  auto append = [&](std::vector<CheckRecord> recs) {
    report.checks.insert(report.checks.end(), recs.begin(), recs.end());
  };

  if (suite == "identities" || suite == "all")
    append(suites::identities(S, std::max(1, seeds), 2024));
  if (suite == "curvature" || suite == "all") {
    append(suites::concentric_exactness());
    append(suites::linearization(5));
  }
  if (suite == "frechet" || suite == "all")
    append(suites::frechet(std::max(1, std::min(seeds, 10))));
  if (suite == "all") {
    append(suites::geometry(S));
    append(suites::degeneracy());
  }
  if (report.checks.empty()) {
    std::cerr << "unknown suite: " << suite << "\n";
    return 2;
  }

  auto t1 = std::chrono::steady_clock::now();
  report.wall_clock_sec =
      std::chrono::duration<double>(t1 - t0).count();
  if (!out_path.empty()) report.write(out_path);

  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << "  err=" << std::scientific << std::setprecision(3)
              << c.max_rel_err;
    if (c.observed_order != 0) std::cout << "  order=" << c.observed_order;
    std::cout << "\n";
  }
  if (!report.all_pass()) {
    std::cout << "verification FAILED\n";
    return 1;
  }
  std::cout << "all checks passed\n";
  return 0;
}

int run_curvature(const std::string& surface_cfg, const std::string& height,
                  const std::string& out_path) {
  Json cfg = surface_cfg.empty() ? Json({{"kind", "sphere"}})
                                 : load_config(surface_cfg);
  ReferenceSurface S = surface_from_config(cfg);
  HeightField h = height_from_spec(S, height);
  h.check_gate();
  FdPatch oracle = direct_interface_patch(S, h);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw ConfigError("cannot open " + out_path);
    os = &file;
  }
  (*os) << "u,v,H_formula,H_oracle,abs_err\n";
  (*os) << std::setprecision(12);
  const ParamGrid& g = S.grid();
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      Vec2 s = g.node(i, j);
      double Hf = mean_curvature_gamma(S, h, s);
      double Ho = oracle.mean_curvature(i, j);
      (*os) << s[0] << "," << s[1] << "," << Hf << "," << Ho << ","
            << std::abs(Hf - Ho) << "\n";
    }
  }
  return 0;
}

int run_norms(const std::string& func, const std::string& csv,
              const std::string& norm) {
  NormSpec spec = NormSpec::parse(norm);
  Sampled f;
  if (!csv.empty()) {
    std::ifstream in(csv);
    if (!in) throw ConfigError("cannot open " + csv);
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    if (vals.size() < 8) throw ConfigError("csv needs at least 8 samples");
    f = Sampled({{0.0, 1.0, int(vals.size()), false}}, false);
    for (size_t i = 0; i < vals.size(); ++i) f[i] = vals[i];
  } else {
    int n = 256;
    if (func == "linear") {
      f = Sampled::from_function({{0.0, 1.0, n, false}}, false,
                                 [](const std::vector<double>& c) {
                                   return c[0];
                                 });
    } else if (func == "sin") {
      f = Sampled::from_function({{0.0, 2 * kPi, n, true}}, false,
                                 [](const std::vector<double>& c) {
                                   return std::sin(c[0]);
                                 });
    } else if (func == "const") {
      f = Sampled::from_function({{0.0, 1.0, n, false}}, false,
                                 [](const std::vector<double>&) {
                                   return 3.0;
                                 });
    } else {
      throw ConfigError("unknown builtin function: " + func);
    }
  }
  std::cout << std::setprecision(12) << evaluate_norm(f, spec) << "\n";
  return 0;
}

int run_probe(double s, double r, double q, int trials, int n, unsigned seed,
              const std::string& out_path) {
  ProductProbeResult res = product_estimate_probe(s, r, q, trials, n, seed);
  nlohmann::ordered_json j;
  j["s"] = s;
  j["r"] = r;
  j["q"] = q;
  j["trials"] = trials;
  j["grid_n"] = n;
  j["max_ratio"] = res.max_ratio;
  j["median_ratio"] = res.median_ratio;
  j["skipped"] = res.skipped;
  std::string text = j.dump(2);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << text << "\n";
  }
  std::cout << text << "\n";
  return 0;
}

int run_evolve(const std::string& cfg_path, const std::string& out_prefix) {
  Json cfg = load_config(cfg_path);
  ReferenceSurface S = surface_from_config(cfg);
  EvolutionConfig ec = evolution_from_config(cfg);
  FluidParams fp = fluid_from_config(cfg);
  VectorField u = velocity_from_spec(cfg.value("velocity", "radial:0.2"));
  HeightField h0f = height_from_spec(S, cfg.value("height", "const:0.01"));
  GridScalar h0 = h0f.samples();
  SurfaceVecFn b = random_tangent_field(S, cfg.value("b_seed", 8), 0.1);

  BoxVectorField B0;
  B0.n = ec.box.n;
  for (int c = 0; c < 3; ++c) B0.comp[c].assign(ec.box.size(), 0.0);
  double amp = cfg.value("B_amplitude", 0.01);
  for (int i = 1; i < ec.box.n - 1; ++i)
    for (int j = 1; j < ec.box.n - 1; ++j)
      for (int k = 1; k < ec.box.n - 1; ++k) {
        Vec3 x = ec.box.point(i, j, k);
        double w = amp;
        for (int d = 0; d < 3; ++d)
          w *= std::sin(kPi * (x[d] - ec.box.lo[d]) /
                        (ec.box.hi[d] - ec.box.lo[d]));
        B0.comp[0][ec.box.index(i, j, k)] = w;
      }

  FixedPointTrace tr = fixed_point_probe(S, fp, u, B0, h0, b, ec);

  // height snapshots
  {
    std::ofstream csv(out_prefix + "_height.csv");
    csv << "t,u,v,h\n" << std::setprecision(12);
    auto traj = integrate_height(S, h0, u, b, ec);
    const int steps = int(traj.size());
    for (int ti = 0; ti < steps; ++ti) {
      double t = ti * ec.horizon / std::max(1, steps - 1);
      const ParamGrid& g = S.grid();
      for (int i = 0; i < g.nu; i += 4)
        for (int j = 0; j < g.nv; j += 4)
          csv << t << "," << g.u(i) << "," << g.v(j) << ","
              << traj[ti].at(i, j) << "\n";
    }
  }
  nlohmann::ordered_json j;
  j["horizon"] = tr.horizon;
  j["iterations"] = tr.iterations;
  j["residuals"] = tr.residuals;
  j["ratios"] = tr.ratios;
  j["converged"] = tr.converged;
  j["diverged"] = tr.diverged;
  std::ofstream out(out_prefix + "_trace.json");
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return tr.diverged ? 1 : 0;
}

int run_report(const std::string& path) {
  Json j = load_config(path);
  if (!j.contains("checks")) throw ConfigError("not a report file");
  int failed = 0;
  for (const auto& c : j.at("checks")) {
    bool pass = c.value("pass", false);
    if (!pass) ++failed;
    std::cout << (pass ? "PASS " : "FAIL ") << c.value("name", "?") << " ref="
              << c.value("ref", "?") << " err=" << c.value("max_rel_err", 0.0)
              << "\n";
  }
  std::cout << (failed == 0 ? "report clean\n" : "report has failures\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal-parameterization toolkit for two-phase interfaces"};
  app.require_subcommand(1);

  std::string surface_cfg, suite = "all", out_path, height = "const:0.1";
  std::string func = "linear", csv, norm = "W:0.5:2";
  std::string evolve_cfg, out_prefix = "evolve";
  std::string report_path;
  int seeds = 10;
  double probe_s = 0.5, probe_r = 0.5, probe_q = 2.0;
  int probe_trials = 200, probe_n = 33;
  unsigned probe_seed = 1;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--surface", surface_cfg, "surface config (JSON)");
  verify->add_option("--suite", suite,
                     "identities | frechet | curvature | all");
  verify->add_option("--seeds", seeds, "number of randomized draws");
  verify->add_option("--out", out_path, "report JSON path");

  auto* curv = app.add_subcommand("curvature", "curvature table as CSV");
  curv->add_option("--surface", surface_cfg, "surface config (JSON)");
  curv->add_option("--height", height, "height spec, e.g. const:0.1");
  curv->add_option("--out", out_path, "CSV path (stdout if omitted)");

  auto* norms_cmd = app.add_subcommand("norms", "evaluate a norm");
  norms_cmd->add_option("--func", func, "builtin: linear | sin | const");
  norms_cmd->add_option("--csv", csv, "whitespace-separated samples");
  norms_cmd->add_option("--norm", norm, "spec, e.g. W:0.5:2 or Ck:1 or S1:6");

  auto* probe = app.add_subcommand("probe", "product-estimate probe");
  probe->add_option("--s", probe_s, "time fractional order");
  probe->add_option("--r", probe_r, "space fractional order");
  probe->add_option("--q", probe_q, "integrability");
  probe->add_option("--trials", probe_trials, "trial count");
  probe->add_option("--grid", probe_n, "grid nodes per axis");
  probe->add_option("--seed", probe_seed, "rng seed");
  probe->add_option("--out", out_path, "JSON output path");

  auto* evolve = app.add_subcommand("evolve", "evolution / fixed-point run");
  evolve->add_option("--config", evolve_cfg, "run config (JSON)")->required();
  evolve->add_option("--out-prefix", out_prefix, "output file prefix");

  auto* report = app.add_subcommand("report", "pretty-print a report");
  report->add_option("file", report_path, "report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) return run_verify(surface_cfg, suite, seeds, out_path);
    if (curv->parsed()) return run_curvature(surface_cfg, height, out_path);
    if (norms_cmd->parsed()) return run_norms(func, csv, norm);
    if (probe->parsed())
      return run_probe(probe_s, probe_r, probe_q, probe_trials, probe_n,
                       probe_seed, out_path);
    if (evolve->parsed()) return run_evolve(evolve_cfg, out_prefix);
    if (report->parsed()) return run_report(report_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
