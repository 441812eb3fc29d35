#include <doctest.h>

#include <random>

#include "hanzawa/verify.hpp"

using namespace hanzawa;

TEST_CASE("alpha and beta basics") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 24, 48, 0.9);
  SUBCASE("constant height: alpha = 0, beta = 1") {
    HeightField h = HeightField::constant(S, 0.07);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
      Vec2 s = random_param(S, rng);
      CHECK(alpha_vec(S, h, s).norm() < 1e-12);
      CHECK(beta_scalar(S, h, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("alpha solves (I - h L) alpha = grad_S h") {
    ScalarField g;
    g.value = [](double, const Vec3& x) { return 0.01 * x[2]; };
    g.grad = [](double, const Vec3&) { return Vec3(0, 0, 0.01); };
    g.hess = [](double, const Vec3&) { return Mat3::Zero(); };
    HeightField h = HeightField::from_ambient(S, g);
    std::mt19937_64 rng(3);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      Vec2 s = random_param(S, rng);
      Mat3 A = Mat3::Identity() - h.value(s) * S.weingarten(s);
      Vec3 a = alpha_vec(S, h, s);
      worst = std::max(worst, (A * a - h.grad_sigma(s)).norm());
      // tangency
      CHECK(std::abs(a.dot(S.normal(s))) < 1e-12);
    }
    CHECK(worst < 1e-10);
  }
  SUBCASE("pythagoras: beta = 1/sqrt(1 + |alpha|^2)") {
    HeightField h = random_height(S, 5, 0.15);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 30; ++k) {
      Vec2 s = random_param(S, rng);
      Vec3 a = alpha_vec(S, h, s);
      double b = beta_scalar(S, h, s);
      CHECK(std::abs(b - 1.0 / std::sqrt(1.0 + a.squaredNorm())) < 1e-12);
    }
  }
}

TEST_CASE("interface normal") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 24, 48, 0.9);
  SUBCASE("zero and uniform heights keep the reference normal") {
    for (double c : {0.0, 0.1}) {
      HeightField h = HeightField::constant(S, c);
      std::mt19937_64 rng(5);
      for (int k = 0; k < 10; ++k) {
        Vec2 s = random_param(S, rng);
        CHECK((normal_gamma(S, h, s) - S.normal(s)).norm() < 1e-12);
      }
    }
  }
  SUBCASE("orthogonality against independently built tangents") {
    HeightField h = random_height(S, 7, 0.12);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 50; ++k) {
      Vec2 s = random_param(S, rng);
      InterfaceGeometry ig = interface_geometry(S, h, s);
      CHECK(std::abs(ig.n_gamma.norm() - 1.0) < 1e-10);
      CHECK(std::abs(ig.n_gamma.dot(ig.tau1_gamma)) < 1e-8);
      CHECK(std::abs(ig.n_gamma.dot(ig.tau2_gamma)) < 1e-8);
      CHECK(std::abs(ig.n_gamma.dot(S.normal(s)) - ig.beta) < 1e-10);
    }
  }
}

TEST_CASE("mean curvature of the deformed interface") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 24, 48, 0.9);
  SUBCASE("zero height reproduces tr L") {
    HeightField h = HeightField::constant(S, 0.0);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
      Vec2 s = random_param(S, rng);
      CHECK(mean_curvature_gamma(S, h, s) ==
            doctest::Approx(-2.0).epsilon(1e-12));
    }
  }
  SUBCASE("concentric spheres") {
    for (double c : {0.05, 0.1, 0.2}) {
      HeightField h = HeightField::constant(S, c);
      std::mt19937_64 rng(9);
      for (int k = 0; k < 10; ++k) {
        Vec2 s = random_param(S, rng);
        CHECK(std::abs(mean_curvature_gamma(S, h, s) + 2.0 / (1.0 + c)) <
              1e-9);
      }
    }
  }
  SUBCASE("sphere scaling law") {
    // (R, h) -> (lambda R, lambda h) scales curvature by 1/lambda
    ScalarField g;
    g.value = [](double, const Vec3& x) { return 0.02 * x[2]; };
    g.grad = [](double, const Vec3&) { return Vec3(0, 0, 0.02); };
    g.hess = [](double, const Vec3&) { return Mat3::Zero(); };
    ReferenceSurface S1 = ReferenceSurface::sphere(1.0, 24, 48);
    HeightField h1 = HeightField::from_ambient(S1, g);
    for (double lambda : {0.5, 2.0}) {
      ReferenceSurface SL = ReferenceSurface::sphere(lambda, 24, 48);
      // h_lambda(x) = lambda h(x / lambda)
      ScalarField gl;
      double lam = lambda;
      gl.value = [lam](double t, const Vec3& x) {
        (void)t;
        return lam * 0.02 * (x[2] / lam);
      };
      gl.grad = [](double, const Vec3&) { return Vec3(0, 0, 0.02); };
      gl.hess = [](double, const Vec3&) { return Mat3::Zero(); };
      HeightField hl = HeightField::from_ambient(SL, gl);
      std::mt19937_64 rng(10);
      for (int k = 0; k < 10; ++k) {
        Vec2 s = random_param(S1, rng);
        double H1 = mean_curvature_gamma(S1, h1, s);
        double HL = mean_curvature_gamma(SL, hl, s);
        CHECK(std::abs(HL - H1 / lambda) < 1e-8);
      }
    }
  }
  SUBCASE("direct-parameterization oracle at two resolutions") {
    for (auto Sk : {ReferenceSurface::sphere(1.0, 24, 48),
                    ReferenceSurface::torus(2.0, 0.5, 24, 48),
                    ReferenceSurface::ellipsoid(1.2, 1.0, 0.8, 24, 48)}) {
      ScalarField g = random_scalar_field(11, 2, 1.0);
      HeightField probe = HeightField::from_ambient(Sk, g);
      double amp = 0.05 * Sk.rho0() / std::max(probe.sup_abs(), 1e-12);
      HeightField h = HeightField::from_ambient(Sk, g.scaled(amp));
      auto max_err = [&](int refine) {
        FdPatch oracle = direct_interface_patch(Sk, h, refine);
        ParamGrid gg = Sk.grid();
        gg.nu *= refine;
        gg.nv *= refine;
        double e = 0;
        for (int i = 0; i < gg.nu; i += 3)
          for (int j = 0; j < gg.nv; j += 3)
            e = std::max(e, std::abs(oracle.mean_curvature(i, j) -
                                     mean_curvature_gamma(
                                         Sk, h, gg.node(i, j))));
        return e;
      };
      double e1 = max_err(1), e2 = max_err(2);
      CHECK(std::log2(e1 / std::max(e2, 1e-15)) > 1.8);
    }
  }
}

TEST_CASE("linearization at zero height") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 48, 96);
  SUBCASE("constant direction on the unit sphere") {
    SurfaceFn one = [](const Vec2&) { return 1.0; };
    std::mt19937_64 rng(12);
    for (int k = 0; k < 10; ++k) {
      Vec2 s = random_param(S, rng);
      CHECK(dh_gamma_zero(S, one, s) == doctest::Approx(2.0).epsilon(1e-8));
    }
  }
  SUBCASE("spherical harmonics: eigenvalue 2 - l(l+1)") {
    auto check_l = [&](int l, std::function<double(const Vec3&)> f) {
      GridScalar phi = GridScalar::sample(S.grid(), [&](const Vec2& s) {
        return f(S.point(s));
      });
      double fmax = 0;
      for (double v : phi.values()) fmax = std::max(fmax, std::abs(v));
      double tol = 30.0 * sq(kPi / 48);
      for (int i = 0; i < 48; i += 5) {
        for (int j = 0; j < 96; j += 7) {
          if (std::abs(phi.at(i, j)) < 0.2 * fmax) continue;
          double v = dh_gamma_zero(S, phi, i, j);
          CHECK(std::abs(v - (2.0 - l * (l + 1)) * phi.at(i, j)) <
                tol * fmax);
        }
      }
    };
    check_l(1, [](const Vec3& x) { return x[2]; });
    check_l(2, [](const Vec3& x) {
      return x[2] * x[2] - 0.5 * (x[0] * x[0] + x[1] * x[1]);
    });
    check_l(3, [](const Vec3& x) {
      return x[2] * (2 * x[2] * x[2] - 3 * (x[0] * x[0] + x[1] * x[1]));
    });
  }
}

TEST_CASE("frechet derivative of the mean curvature") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 24, 48, 0.9);
  SUBCASE("at h = 0 it reduces to the zero-height linearization") {
    HeightField h = HeightField::constant(S, 0.0);
    ScalarField g = random_scalar_field(13, 3, 0.5);
    HeightField phi = HeightField::from_ambient(S, g);
    std::mt19937_64 rng(14);
    for (int k = 0; k < 20; ++k) {
      Vec2 s = random_param(S, rng);
      double five_term = frechet_mean_curvature(S, h, phi, s);
      SurfaceFn pf = [&](const Vec2& q) { return phi.value(q); };
      double linear = dh_gamma_zero(S, pf, s);
      CHECK(std::abs(five_term - linear) < 1e-7);
    }
  }
  SUBCASE("concentric family: d/dc of -2/(1+c)") {
    HeightField h = HeightField::constant(S, 0.1);
    HeightField one = HeightField::constant(S, 1.0);
    std::mt19937_64 rng(15);
    for (int k = 0; k < 10; ++k) {
      Vec2 s = random_param(S, rng);
      double d = frechet_mean_curvature(S, h, one, s);
      CHECK(std::abs(d - 2.0 / sq(1.1)) < 1e-8);
    }
  }
  SUBCASE("central differences over random states") {
    std::mt19937_64 rng(16);
    const double eps = 1e-3;
    for (int draw = 0; draw < 20; ++draw) {
      HeightField h = random_height(S, 700 + draw, 0.1);
      HeightField phi = random_height(S, 800 + draw, 0.05);
      Vec2 s = random_param(S, rng);
      double an = frechet_mean_curvature(S, h, phi, s);
      double Hp = mean_curvature_gamma(S, h.axpy(eps, phi), s);
      double Hm = mean_curvature_gamma(S, h.axpy(-eps, phi), s);
      double fd = (Hp - Hm) / (2 * eps);
      CHECK(std::abs(fd - an) / std::max(1.0, std::abs(an)) < 1e-3);
    }
  }
}

TEST_CASE("curvature remainder is quadratically small") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 24, 48, 0.9);
  FluidParams fp(1.0, 1.0, 1.0, 1.0);
  ScalarField g = random_scalar_field(17, 3, 1.0);
  HeightField probe = HeightField::from_ambient(S, g);
  double unit = 1.0 / std::max(probe.sup_abs(), 1e-12);
  std::mt19937_64 rng(18);
  Vec2 s = random_param(S, rng);
  std::vector<double> eps = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> vals;
  for (double e : eps) {
    State z = State::zero(S, fp);
    z.h = HeightField::from_ambient(S, g.scaled(unit * e));
    vals.push_back(std::abs(cal_g2(z, 0.0, s)));
  }
  double order1 = std::log2(vals[0] / vals[1]);
  double order2 = std::log2(vals[1] / vals[2]);
  CHECK(order1 > 1.9);
  CHECK(order2 > 1.9);
  // and it vanishes at zero height
  State z0 = State::zero(S, fp);
  CHECK(std::abs(cal_g2(z0, 0.0, s)) < 1e-12);
}
