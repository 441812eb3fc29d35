#include <doctest.h>

#include <random>

#include "hanzawa/evolution.hpp"
#include "hanzawa/verify.hpp"

using namespace hanzawa;

namespace {

BoxVectorField zero_field(const BoxGrid& g) {
  BoxVectorField f;
  f.n = g.n;
  for (int c = 0; c < 3; ++c) f.comp[c].assign(g.size(), 0.0);
  return f;
}

}  // namespace

TEST_CASE("parabolic solver basics") {
  EvolutionConfig cfg;
  cfg.box = BoxGrid(Vec3::Zero(), Vec3::Ones(), 9);
  cfg.dt = 0.01;
  cfg.horizon = 0.05;
  SUBCASE("zero data stays zero") {
    BoxVectorField B0 = zero_field(cfg.box);
    auto src = [](double, const Vec3&) { return Vec3::Zero(); };
    ParabolicResult r = solve_parabolic(cfg.box, B0, src, cfg);
    for (const auto& st : r.states)
      for (int c = 0; c < 3; ++c)
        for (double v : st.comp[c]) CHECK(v == 0.0);
  }
  SUBCASE("boundary violations are rejected") {
    BoxVectorField B0 = zero_field(cfg.box);
    B0.comp[0][cfg.box.index(0, 3, 3)] = 1.0;
    auto src = [](double, const Vec3&) { return Vec3::Zero(); };
    CHECK_THROWS_AS(solve_parabolic(cfg.box, B0, src, cfg), ConfigError);
  }
}

TEST_CASE("eigenfunction decay matches the discrete amplification factor") {
  EvolutionConfig cfg;
  const int n = 17;
  cfg.box = BoxGrid(Vec3::Zero(), Vec3::Ones(), n);
  cfg.sigma = 1.0;
  cfg.dt = 0.02;
  cfg.horizon = 0.1;
  BoxVectorField B0 = zero_field(cfg.box);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x = cfg.box.point(i, j, k);
        B0.comp[0][cfg.box.index(i, j, k)] = std::sin(kPi * x[0]) *
                                             std::sin(kPi * x[1]) *
                                             std::sin(kPi * x[2]);
      }
  auto src = [](double, const Vec3&) { return Vec3::Zero(); };
  ParabolicResult r = solve_parabolic(cfg.box, B0, src, cfg);
  // discrete eigenvalue of the 7-point Laplacian for this mode
  const double dx = cfg.box.dx();
  const double lam = 3.0 * (4.0 / sq(dx)) * sq(std::sin(kPi * dx / 2));
  const int mid = cfg.box.index(n / 2, n / 2, n / 2);
  double expect = B0.comp[0][mid];
  for (size_t s = 1; s < r.states.size(); ++s) {
    expect /= (1.0 + cfg.sigma * lam * cfg.dt);
    CHECK(std::abs(r.states[s].comp[0][mid] - expect) < 1e-9);
  }
  // and the max norm never grows, including for large steps
  for (double big_dt : {0.1, 1.0}) {
    EvolutionConfig c2 = cfg;
    c2.dt = big_dt;
    c2.horizon = 3 * big_dt;
    ParabolicResult r2 = solve_parabolic(c2.box, B0, src, c2);
    double prev = 1e300;
    for (const auto& st : r2.states) {
      double m = 0;
      for (double v : st.comp[0]) m = std::max(m, std::abs(v));
      CHECK(m <= prev * (1 + 1e-12));
      prev = m;
    }
  }
}

TEST_CASE("manufactured solution convergence in space") {
  auto run = [](int n) {
    EvolutionConfig cfg;
    cfg.box = BoxGrid(Vec3::Zero(), Vec3::Ones(), n);
    cfg.sigma = 1.0;
    cfg.horizon = 0.02;
    cfg.dt = cfg.horizon * sq(8.0 / (n - 1)) / 2;
    auto exact = [](double t, const Vec3& x) {
      return std::exp(-t) * std::sin(kPi * x[0]) * std::sin(kPi * x[1]) *
             std::sin(kPi * x[2]);
    };
    BoxVectorField B0 = zero_field(cfg.box);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          B0.comp[0][cfg.box.index(i, j, k)] =
              exact(0.0, cfg.box.point(i, j, k));
    auto src = [&](double t, const Vec3& x) -> Vec3 {
      return Vec3((-1.0 + 3 * kPi * kPi) * exact(t, x), 0, 0);
    };
    ParabolicResult r = solve_parabolic(cfg.box, B0, src, cfg);
    double err = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          err = std::max(err, std::abs(r.states.back().comp[0][cfg.box.index(
                                           i, j, k)] -
                                       exact(cfg.horizon,
                                             cfg.box.point(i, j, k))));
    return err;
  };
  double e1 = run(9), e2 = run(17);
  CHECK(std::log2(e1 / e2) > 1.9);
}

TEST_CASE("height transport") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  SUBCASE("zero velocity freezes the height") {
    GridScalar h0 = GridScalar::sample(S.grid(), [&](const Vec2& s) {
      return 0.02 * S.point(s)[2];
    });
    EvolutionConfig cfg;
    cfg.horizon = 0.05;
    cfg.dt = 0.01;
    auto traj = integrate_height(S, h0, VectorField::zero(), nullptr, cfg);
    for (size_t i = 0; i < h0.values().size(); ++i)
      CHECK(traj.back().values()[i] == doctest::Approx(h0.values()[i]));
  }
  SUBCASE("uniform normal speed with arbitrary tangential b") {
    const double V = 0.5;
    VectorField u;
    u.value = [V](double, const Vec3& x) -> Vec3 { return V * x / x.norm(); };
    EvolutionConfig cfg;
    cfg.horizon = 0.1;
    cfg.dt = 1e-3;
    SurfaceVecFn b = random_tangent_field(S, 3, 1.0);
    GridScalar h0(S.grid(), 0.0);
    auto traj = integrate_height(S, h0, u, b, cfg);
    for (double v : traj.back().values())
      CHECK(std::abs(v - V * cfg.horizon) < 1e-10);
    // uniform height stays uniform
    double spread = 0;
    for (double v : traj.back().values())
      spread = std::max(spread,
                        std::abs(v - traj.back().values()[0]));
    CHECK(spread < 1e-12);
  }
  SUBCASE("radial expansion follows the exact ODE") {
    VectorField u;
    u.value = [](double, const Vec3& x) -> Vec3 { return x; };
    EvolutionConfig cfg;
    cfg.horizon = 0.1;
    cfg.dt = 1e-3;
    GridScalar h0(S.grid(), 0.0);
    auto traj = integrate_height(S, h0, u, nullptr, cfg);
    double expect = std::exp(cfg.horizon) - 1.0;
    for (double v : traj.back().values())
      CHECK(std::abs(v - expect) / expect < 1e-4);
  }
  SUBCASE("gate violation mid-run is a rejected step") {
    VectorField u;
    u.value = [](double, const Vec3& x) -> Vec3 { return 40.0 * x; };
    EvolutionConfig cfg;
    cfg.horizon = 0.2;
    cfg.dt = 0.05;
    GridScalar h0(S.grid(), 0.1);
    CHECK_THROWS_AS(integrate_height(S, h0, u, nullptr, cfg), NumericError);
  }
}

TEST_CASE("fixed point probe") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 12, 24, 0.9);
  FluidParams fp(1.0, 1.0, 1.0, 1.0);
  EvolutionConfig cfg;
  cfg.box = BoxGrid(Vec3(-1.6, -1.6, -1.6), Vec3(1.6, 1.6, 1.6), 10);
  cfg.dt = 0.0125 / 2;
  cfg.max_iterations = 4;

  auto seed_B = [&](double amp) {
    BoxVectorField B0 = zero_field(cfg.box);
    for (int i = 1; i < cfg.box.n - 1; ++i)
      for (int j = 1; j < cfg.box.n - 1; ++j)
        for (int k = 1; k < cfg.box.n - 1; ++k) {
          Vec3 x = cfg.box.point(i, j, k);
          double w = amp;
          for (int d = 0; d < 3; ++d)
            w *= std::sin(kPi * (x[d] + 1.6) / 3.2);
          B0.comp[0][cfg.box.index(i, j, k)] = w;
        }
    return B0;
  };

  SUBCASE("zero data converges immediately") {
    VectorField u = VectorField::zero();
    GridScalar h0(S.grid(), 0.0);
    cfg.horizon = 0.025;
    FixedPointTrace tr =
        fixed_point_probe(S, fp, u, zero_field(cfg.box), h0, nullptr, cfg);
    CHECK(tr.converged);
    CHECK(tr.residuals.front() < 1e-13);
  }
  SUBCASE("small data contracts and the ratio shrinks with the horizon") {
    VectorField u = random_solenoidal_field(3, 2, 0.05);
    GridScalar h0 = GridScalar::sample(S.grid(), [&](const Vec2& s) {
      return 0.01 * S.point(s)[2];
    });
    SurfaceVecFn b = random_tangent_field(S, 8, 0.1);
    std::vector<double> last_ratio;
    for (double T : {0.05, 0.025, 0.0125}) {
      cfg.horizon = T;
      FixedPointTrace tr =
          fixed_point_probe(S, fp, u, seed_B(0.01), h0, b, cfg);
      REQUIRE(!tr.ratios.empty());
      last_ratio.push_back(tr.ratios.back());
      CHECK(tr.ratios.back() < 1.0);
      CHECK(!tr.diverged);
    }
    CHECK(last_ratio[1] <= last_ratio[0] * 1.05);
    CHECK(last_ratio[2] <= last_ratio[1] * 1.05);
  }
  SUBCASE("large B still produces a trace (regression guard)") {
    VectorField u = random_solenoidal_field(5, 2, 0.05);
    GridScalar h0(S.grid(), 0.0);
    cfg.horizon = 0.025;
    FixedPointTrace tr =
        fixed_point_probe(S, fp, u, seed_B(10.0), h0, nullptr, cfg);
    CHECK(tr.iterations >= 2);
    CHECK(!tr.residuals.empty());
  }
  SUBCASE("determinism: identical configs give identical traces") {
    VectorField u = random_solenoidal_field(3, 2, 0.05);
    GridScalar h0 = GridScalar::sample(S.grid(), [&](const Vec2& s) {
      return 0.01 * S.point(s)[2];
    });
    cfg.horizon = 0.025;
    FixedPointTrace a =
        fixed_point_probe(S, fp, u, seed_B(0.01), h0, nullptr, cfg);
    FixedPointTrace b =
        fixed_point_probe(S, fp, u, seed_B(0.01), h0, nullptr, cfg);
    REQUIRE(a.residuals.size() == b.residuals.size());
    for (size_t i = 0; i < a.residuals.size(); ++i)
      CHECK(a.residuals[i] == b.residuals[i]);
  }
}

TEST_CASE("perturbed start below the initial-surface bound keeps the gate") {
  // nonzero h0 within the configured smallness bound: the trace must run
  // without tripping the validity gate for the probed horizon
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 12, 24, 0.9);
  FluidParams fp(1.0, 1.0, 1.0, 1.0);
  EvolutionConfig cfg;
  cfg.box = BoxGrid(Vec3(-1.6, -1.6, -1.6), Vec3(1.6, 1.6, 1.6), 10);
  cfg.dt = 0.0125 / 2;
  cfg.horizon = 0.025;
  cfg.max_iterations = 3;
  cfg.eps0 = 0.02;
  VectorField u = random_solenoidal_field(9, 2, 0.05);
  GridScalar h0 = GridScalar::sample(S.grid(), [&](const Vec2& s) {
    return cfg.eps0 * S.point(s)[0] * S.point(s)[2];
  });
  BoxVectorField B0;
  B0.n = cfg.box.n;
  for (int c = 0; c < 3; ++c) B0.comp[c].assign(cfg.box.size(), 0.0);
  CHECK_NOTHROW(fixed_point_probe(S, fp, u, B0, h0, nullptr, cfg));
}
