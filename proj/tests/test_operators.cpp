#include <doctest.h>

#include <random>

#include "hanzawa/verify.hpp"

using namespace hanzawa;

namespace {

State random_state(const ReferenceSurface& S, FluidParams fp, unsigned seed,
                   double height_frac = 0.1) {
  State z;
  z.S = &S;
  z.fluid = fp;
  z.u = {random_vector_field(seed * 5 + 1, 3, 0.8, 0.4),
         random_vector_field(seed * 5 + 2, 3, 0.8, 0.4)};
  z.B = random_vector_field(seed * 5 + 3, 3, 0.8, 0.4);
  z.p = {random_scalar_field(seed * 5 + 4, 3, 0.8, 0.4),
         random_scalar_field(seed * 5 + 5, 3, 0.8, 0.4)};
  z.varpi = [](const Vec2&) { return 0.0; };
  z.h = random_height(S, seed * 13, height_frac, 0.05);
  return z;
}

}  // namespace

TEST_CASE("jump bookkeeping") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32);
  SUBCASE("identical branches cancel") {
    ScalarField f = random_scalar_field(3, 3, 1.0);
    JumpScalarField j = JumpScalarField::continuous(f);
    CHECK(jump(j, 0.0, Vec3(1, 0, 0)) == 0.0);
  }
  SUBCASE("outer minus inner sign") {
    JumpScalarField j{ScalarField::constant(1.0), ScalarField::constant(3.0)};
    CHECK(jump(j, 0.0, Vec3(1, 0, 0)) == doctest::Approx(2.0));
  }
  SUBCASE("linear branches at the equator point") {
    ScalarField inner, outer;
    inner.value = [](double, const Vec3& x) { return x[0]; };
    outer.value = [](double, const Vec3& x) { return 2 * x[0]; };
    JumpScalarField j{inner, outer};
    CHECK(jump(j, 0.0, S.point(Vec2(kPi / 2, 0.0))) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("state varpi consistency") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  JumpVectorField u = {random_solenoidal_field(31, 2, 0.5),
                       random_solenoidal_field(32, 2, 0.5)};
  VectorField B = random_solenoidal_field(33, 2, 0.5);
  JumpScalarField p = {random_scalar_field(34, 2, 0.5),
                       random_scalar_field(35, 2, 0.5)};
  HeightField h = random_height(S, 36, 0.08);
  State z = pulled_back_state(S, fp, u, B, p, h);
  std::mt19937_64 rng(37);
  for (int k = 0; k < 30; ++k) {
    Vec2 s = random_param(S, rng);
    CHECK(std::abs(z.varpi_residual(0.0, s)) < 1e-9);
  }
}

TEST_CASE("transformation identities on the sphere analytic path") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  std::mt19937_64 rng(41);
  double worst[4] = {0, 0, 0, 0};
  for (int k = 0; k < 50; ++k) {
    VectorField u = random_vector_field(900 + k, 3, 1.0, 0.5);
    HeightField h = random_height(S, 950 + k, 0.12, 0.1);
    ThetaField th(S, h);
    Vec3 x = random_tube_point(S, rng, 0.75);
    worst[0] = std::max(worst[0], check_gradient_identity(u, th, 0.1, x));
    worst[1] = std::max(worst[1], check_divergence_identity(u, th, 0.1, x));
    worst[2] = std::max(worst[2], check_laplacian_identity(u, th, 0.1, x));
    worst[3] = std::max(worst[3], check_time_identity(u, th, 0.1, x));
  }
  CHECK(worst[0] < 1e-10);
  CHECK(worst[1] < 1e-10);
  CHECK(worst[2] < 1e-8);
  CHECK(worst[3] < 1e-8);
}

TEST_CASE("identities at zero height are exact") {
  ReferenceSurface S = ReferenceSurface::torus(2.0, 0.5, 16, 32);
  HeightField h = HeightField::constant(S, 0.0);
  ThetaField th(S, h);
  std::mt19937_64 rng(43);
  for (int k = 0; k < 10; ++k) {
    VectorField u = random_vector_field(700 + k, 3, 1.0, 0.5);
    Vec3 x = random_tube_point(S, rng);
    CHECK(check_gradient_identity(u, th, 0.0, x) < 1e-12);
    CHECK(check_divergence_identity(u, th, 0.0, x) < 1e-12);
    CHECK(check_laplacian_identity(u, th, 0.0, x) < 1e-12);
    CHECK(check_time_identity(u, th, 0.0, x) < 1e-12);
  }
}

TEST_CASE("identity checkers converge on the generic path") {
  for (auto S : {ReferenceSurface::torus(2.0, 0.5, 16, 32),
                 ReferenceSurface::ellipsoid(1.2, 1.0, 0.8, 16, 32)}) {
    std::mt19937_64 rng(47);
    double e_coarse = 0, e_fine = 0;
    for (int k = 0; k < 10; ++k) {
      VectorField u = random_vector_field(1100 + k, 3, 1.0, 0.5);
      HeightField h = random_height(S, 1150 + k, 0.12);
      Vec3 x = random_tube_point(S, rng, 0.7);
      ThetaField fine(S, h);
      fine.set_hess_step(1e-5);
      ThetaField coarse(S, h);
      coarse.set_hess_step(2e-5);
      e_fine = std::max(e_fine, check_laplacian_identity(u, fine, 0.0, x));
      e_coarse = std::max(e_coarse,
                          check_laplacian_identity(u, coarse, 0.0, x));
    }
    double order = std::log2(e_coarse / e_fine);
    CHECK(order > 1.8);
    CHECK(e_fine < 1e-6);
  }
}

TEST_CASE("linear operators") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  SUBCASE("static state with constant pressure") {
    State z = State::zero(S, fp);
    z.p = JumpScalarField::continuous(ScalarField::constant(2.0));
    CHECK(l1(z, 0.0, Vec3(1.2, 0, 0)).norm() < 1e-14);
  }
  SUBCASE("heat-kernel eigenfunction annihilates L2") {
    State z = State::zero(S, fp);
    ScalarField comp;
    double sig = fp.sigma;
    comp.value = [sig](double t, const Vec3& x) {
      return std::exp(-sig * kPi * kPi * 3.0 * t) * std::sin(kPi * x[0]) *
             std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
    };
    comp.grad = [sig](double t, const Vec3& x) -> Vec3 {
      double e = std::exp(-sig * kPi * kPi * 3.0 * t);
      return e * kPi *
             Vec3(std::cos(kPi * x[0]) * std::sin(kPi * x[1]) *
                      std::sin(kPi * x[2]),
                  std::sin(kPi * x[0]) * std::cos(kPi * x[1]) *
                      std::sin(kPi * x[2]),
                  std::sin(kPi * x[0]) * std::sin(kPi * x[1]) *
                      std::cos(kPi * x[2]));
    };
    comp.hess = nullptr;
    comp.dt = [sig](double t, const Vec3& x) {
      return -sig * kPi * kPi * 3.0 * std::exp(-sig * kPi * kPi * 3.0 * t) *
             std::sin(kPi * x[0]) * std::sin(kPi * x[1]) *
             std::sin(kPi * x[2]);
    };
    z.B = VectorField::from_components(comp, ScalarField::zero(),
                                       ScalarField::zero());
    std::mt19937_64 rng(53);
    for (int k = 0; k < 10; ++k) {
      Vec3 x = random_tube_point(S, rng);
      CHECK(l2(z, 0.3, x).norm() < 1e-9);
    }
  }
  SUBCASE("kinematic operator with normal velocity") {
    // u . n = V, dh/dt = V, b = 0  =>  L5 = 0
    const double V = 0.7;
    State z = State::zero(S, fp);
    VectorField u;
    u.value = [V](double, const Vec3& x) -> Vec3 {
      return V * x / x.norm();
    };
    z.u = JumpVectorField::continuous(u);
    z.h = HeightField::constant(S, 0.0, V);
    SurfaceVecFn b = [](const Vec2&) { return Vec3::Zero(); };
    std::mt19937_64 rng(54);
    for (int k = 0; k < 10; ++k)
      CHECK(std::abs(l5(z, b, 0.0, random_param(S, rng))) < 1e-12);
  }
}

TEST_CASE("nonlinear terms vanish with all their h factors") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  SUBCASE("u = B = 0 makes every G vanish at any valid h") {
    State z = State::zero(S, fp);
    z.h = random_height(S, 61, 0.1);
    z.p = JumpScalarField::continuous(ScalarField::constant(1.0));
    std::mt19937_64 rng(62);
    SurfaceVecFn b = random_tangent_field(S, 63, 0.5);
    for (int k = 0; k < 10; ++k) {
      Vec3 x = random_tube_point(S, rng, 0.6);
      Vec2 s = random_param(S, rng);
      CHECK(g1(z, 0.0, x).norm() < 1e-12);  // M1 grad p with grad p = 0
      CHECK(g2(z, 0.0, x).norm() < 1e-12);
      CHECK(std::abs(g3(z, 0.0, x)) < 1e-12);
      CHECK(std::abs(g5(z, b, 0.0, s)) < 1e-12);
      CHECK(std::abs(cal_g1(z, 0.0, s)) < 1e-12);
    }
  }
  SUBCASE("h = 0 kills the surface remainders term by term") {
    State z = random_state(S, fp, 9);
    z.h = HeightField::constant(S, 0.0);
    std::mt19937_64 rng(64);
    for (int k = 0; k < 10; ++k) {
      Vec2 s = random_param(S, rng);
      CHECK(std::abs(cal_g1(z, 0.1, s)) < 1e-12);
      CHECK(std::abs(cal_g2(z, 0.1, s)) < 1e-12);
      CHECK(cal_g3(z, 0.1, s).norm() < 1e-12);
      CHECK(g4(z, 0.1, s).norm() < 1e-12);
    }
  }
}

TEST_CASE("cal_g3 is tangent to the reference surface") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  State z = random_state(S, fp, 21);
  std::mt19937_64 rng(65);
  for (int k = 0; k < 20; ++k) {
    Vec2 s = random_param(S, rng);
    Vec3 v = cal_g3(z, 0.1, s);
    CHECK(std::abs(v.dot(S.normal(s))) < 1e-8 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("concentric-sphere surface remainder value") {
  // h == c, u == 0: G4 = (calG2 + kappa tr L^2 c) n with
  // calG2 = kappa (-2/(1+c) + 2 - 2c)
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 1.0, 1.0, 1.3);
  const double c = 0.1;
  State z = State::zero(S, fp);
  z.h = HeightField::constant(S, c);
  std::mt19937_64 rng(66);
  double expect_g2 = fp.kappa * (-2.0 / (1.0 + c) + 2.0 - 2.0 * c);
  for (int k = 0; k < 10; ++k) {
    Vec2 s = random_param(S, rng);
    CHECK(std::abs(cal_g2(z, 0.0, s) - expect_g2) < 1e-9);
    Vec3 expect_g4 = (expect_g2 + fp.kappa * 2.0 * c) * S.normal(s);
    CHECK((g4(z, 0.0, s) - expect_g4).norm() < 1e-9);
  }
}

TEST_CASE("full-system reduction at zero height") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  std::mt19937_64 rng(71);
  for (int fam = 0; fam < 3; ++fam) {
    JumpVectorField u = {random_solenoidal_field(80 + fam, 2, 0.7, 0.3),
                         random_solenoidal_field(90 + fam, 2, 0.7, 0.3)};
    VectorField B = random_solenoidal_field(100 + fam, 2, 0.7, 0.3);
    JumpScalarField p = {random_scalar_field(110 + fam, 2, 0.7, 0.3),
                         random_scalar_field(120 + fam, 2, 0.7, 0.3)};
    State z;
    z.S = &S;
    z.fluid = fp;
    z.u = u;
    z.B = B;
    z.p = p;
    z.varpi = [](const Vec2&) { return 0.0; };
    z.h = HeightField::constant(S, 0.0);
    for (int k = 0; k < 15; ++k) {
      Vec3 x = random_tube_point(S, rng, 0.7);
      double side = S.implicit_side(x);
      CHECK((l1(z, 0.1, x) - g1(z, 0.1, x) -
             momentum_residual(u, B, p, fp, side, 0.1, x))
                .norm() < 1e-10);
      CHECK((l2(z, 0.1, x) - g2(z, 0.1, x) -
             induction_residual(u, B, fp, side, 0.1, x))
                .norm() < 1e-10);
    }
  }
}

TEST_CASE("momentum reduction with composed fields at small height") {
  // L1(zbar) - G1(zbar) must equal the original momentum residual composed
  // with Theta.
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  JumpVectorField u = {random_solenoidal_field(131, 2, 0.6, 0.2),
                       random_solenoidal_field(132, 2, 0.6, 0.2)};
  VectorField B = random_solenoidal_field(133, 2, 0.6, 0.2);
  JumpScalarField p = {random_scalar_field(134, 2, 0.6, 0.2),
                       random_scalar_field(135, 2, 0.6, 0.2)};
  HeightField h = random_height(S, 136, 0.06);
  State zbar = pulled_back_state(S, fp, u, B, p, h);
  ThetaField th(S, h);
  std::mt19937_64 rng(72);
  for (int k = 0; k < 15; ++k) {
    Vec3 x = random_tube_point(S, rng, 0.6);
    double side = S.implicit_side(x);
    Vec3 lhs = l1(zbar, 0.1, x) - g1(zbar, 0.1, x);
    Vec3 rhs = momentum_residual(u, B, p, fp, side, 0.1, th.map(x));
    CHECK((lhs - rhs).norm() < 2e-8);
    Vec3 lhs2 = l2(zbar, 0.1, x) - g2(zbar, 0.1, x);
    Vec3 rhs2 = induction_residual(u, B, fp, side, 0.1, th.map(x));
    CHECK((lhs2 - rhs2).norm() < 2e-8);
    double lhs3 = l3(zbar, 0.1, x) - g3(zbar, 0.1, x);
    double rhs3 = u.branch(side).divergence(0.1, th.map(x));
    CHECK(std::abs(lhs3 - rhs3) < 1e-9);
  }
}

TEST_CASE("stress balance reconstruction") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 2.0, 0.7, 1.3);
  JumpVectorField u = {random_solenoidal_field(141, 2, 0.5),
                       random_solenoidal_field(142, 2, 0.5)};
  VectorField B = VectorField::zero();
  JumpScalarField p = {random_scalar_field(143, 2, 0.5),
                       random_scalar_field(144, 2, 0.5)};
  HeightField h = random_height(S, 145, 0.05);
  State zbar = pulled_back_state(S, fp, u, B, p, h);
  std::mt19937_64 rng(73);
  for (int k = 0; k < 20; ++k) {
    Vec2 s = random_param(S, rng);
    Vec3 lhs = l4(zbar, 0.0, s) - g4(zbar, 0.0, s);
    Vec3 rhs = stress_oracle_decomposed(S, fp, u, p, h, 0.0, s);
    CHECK((lhs - rhs).norm() < 5e-7);
  }
}

TEST_CASE("kinematic equation: b drops out of L5 - G5") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  FluidParams fp(1.0, 1.0, 1.0, 1.0);
  State z = random_state(S, fp, 33);
  SurfaceVecFn b1 = random_tangent_field(S, 151, 0.7);
  SurfaceVecFn b2 = random_tangent_field(S, 152, 1.3);
  std::mt19937_64 rng(74);
  for (int k = 0; k < 20; ++k) {
    Vec2 s = random_param(S, rng);
    double r1 = l5(z, b1, 0.1, s) - g5(z, b1, 0.1, s);
    double r2 = l5(z, b2, 0.1, s) - g5(z, b2, 0.1, s);
    CHECK(std::abs(r1 - r2) < 1e-12);
    // and the reduced form equals dh/dt - u.(n - M0 grad_S h)
    Vec3 x = S.point(s);
    Vec3 uval = z.u.outer.value(0.1, x);
    Vec3 a = alpha_vec(S, z.h, s);
    double direct = z.h.dt(s) - uval.dot(S.normal(s) - a);
    CHECK(std::abs(r1 - direct) < 1e-11);
  }
}

TEST_CASE("one-sided traces by offsets agree with direct branch evaluation") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  ScalarField f = random_scalar_field(161, 3, 1.0);
  std::mt19937_64 rng(75);
  for (int k = 0; k < 10; ++k) {
    Vec2 s = random_param(S, rng);
    Vec3 x = S.point(s);
    Vec3 n = S.normal(s);
    auto fn = [&](const Vec3& y) { return f.value(0.0, y); };
    double direct = f.value(0.0, x);
    CHECK(std::abs(trace_along_normal(fn, x, n, +1.0) - direct) < 1e-7);
    CHECK(std::abs(trace_along_normal(fn, x, n, -1.0) - direct) < 1e-7);
  }
}
