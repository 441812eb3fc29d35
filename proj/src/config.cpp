#include "hanzawa/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace hanzawa {

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

ReferenceSurface surface_from_config(const Json& cfg) {
  const Json& s = cfg.contains("surface") ? cfg.at("surface") : cfg;
  if (!s.contains("kind")) throw ConfigError("surface config needs a kind");
  std::string kind = s.at("kind").get<std::string>();
  int nu = 48, nv = 96;
  if (s.contains("grid")) {
    nu = s.at("grid").value("nu", nu);
    nv = s.at("grid").value("nv", nv);
  }
  std::optional<double> rho0;
  if (s.contains("rho0")) rho0 = s.at("rho0").get<double>();
  const Json params = s.value("params", Json::object());
  try {
    if (kind == "sphere")
      return ReferenceSurface::sphere(params.value("R", 1.0), nu, nv, rho0);
    if (kind == "torus")
      return ReferenceSurface::torus(params.value("R", 2.0),
                                     params.value("r", 0.5), nu, nv, rho0);
    if (kind == "ellipsoid")
      return ReferenceSurface::ellipsoid(params.value("a", 1.0),
                                         params.value("b", 1.0),
                                         params.value("c", 1.0), nu, nv, rho0);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid surface config: ") + e.what());
  }
  throw ConfigError("unknown surface kind: " + kind);
}

FluidParams fluid_from_config(const Json& cfg) {
  if (!cfg.contains("fluid")) return FluidParams{};
  const Json& f = cfg.at("fluid");
  return FluidParams(f.value("nu_plus", 1.0), f.value("nu_minus", 1.0),
                     f.value("sigma", 1.0), f.value("kappa", 1.0));
}

HanzawaSettings hanzawa_settings_from_config(const Json& cfg) {
  HanzawaSettings out;
  if (cfg.contains("hanzawa")) {
    const Json& h = cfg.at("hanzawa");
    out.delta0 = h.value("delta0", out.delta0);
    out.newton_tol = h.value("newton_tol", out.newton_tol);
    out.newton_max_iter = h.value("newton_max_iter", out.newton_max_iter);
    if (!(out.delta0 > 0 && out.delta0 < 1))
      throw ConfigError("delta0 must lie in (0,1)");
  }
  return out;
}

EvolutionConfig evolution_from_config(const Json& cfg) {
  EvolutionConfig out;
  const Json& e = cfg.contains("evolution") ? cfg.at("evolution") : cfg;
  if (e.contains("box")) {
    const Json& b = e.at("box");
    Vec3 lo(b.value("lo", std::vector<double>{0, 0, 0}).data());
    Vec3 hi(b.value("hi", std::vector<double>{1, 1, 1}).data());
    out.box = BoxGrid(lo, hi, b.value("n", 16));
  }
  out.dt = e.value("dt", out.dt);
  out.horizon = e.value("T", out.horizon);
  out.sigma = e.value("sigma", out.sigma);
  out.q = e.value("q", out.q);
  out.max_iterations = e.value("max_iterations", out.max_iterations);
  out.delta0 = e.value("delta0", out.delta0);
  out.T0 = e.value("T0", out.T0);
  out.eps0 = e.value("eps0", out.eps0);
  out.eps1 = e.value("eps1", out.eps1);
  if (!(out.dt > 0) || !(out.horizon > 0) || out.horizon > out.T0)
    throw ConfigError("need 0 < dt and 0 < T <= T0");
  return out;
}

HeightField height_from_spec(const ReferenceSurface& S,
                             const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  double a = colon == std::string::npos ? 0.0
                                        : std::stod(spec.substr(colon + 1));
  if (name == "const") return HeightField::constant(S, a);
  if (name == "x3") {
    ScalarField g;
    g.value = [a](double, const Vec3& x) { return a * x[2]; };
    g.grad = [a](double, const Vec3&) { return Vec3(0, 0, a); };
    g.hess = [](double, const Vec3&) { return Mat3::Zero(); };
    g.dt = [](double, const Vec3&) { return 0.0; };
    return HeightField::from_ambient(S, g);
  }
  if (name == "bump") {
    ScalarField g;
    g.value = [a](double, const Vec3& x) {
      return a * std::sin(x[0]) * std::cos(2 * x[1] + 0.3) *
             std::cos(x[2] - 0.2);
    };
    return HeightField::from_ambient(S, g);
  }
  throw ConfigError("unknown height spec: " + spec);
}

VectorField velocity_from_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  double a = colon == std::string::npos ? 1.0
                                        : std::stod(spec.substr(colon + 1));
  if (name == "zero") return VectorField::zero();
  if (name == "radial") {
    // u = a * x (linear expansion)
    VectorField u;
    u.value = [a](double, const Vec3& x) -> Vec3 { return a * x; };
    u.grad = [a](double, const Vec3&) -> Mat3 {
      return a * Mat3::Identity();
    };
    u.hess = [](double, const Vec3&) {
      return std::array<Mat3, 3>{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
    };
    u.dt = [](double, const Vec3&) { return Vec3::Zero(); };
    return u;
  }
  if (name == "swirl") return random_solenoidal_field(7, 3, a);
  throw ConfigError("unknown velocity spec: " + spec);
}

}  // namespace hanzawa
