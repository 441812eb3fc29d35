#include <doctest.h>

#include <random>

#include "hanzawa/verify.hpp"

using namespace hanzawa;

TEST_CASE("cutoff plateaus and midpoint") {
  CHECK(Cutoff::eta(0.0) == 1.0);
  CHECK(Cutoff::eta(0.2) == 1.0);
  CHECK(Cutoff::eta(1.0) == 0.0);
  CHECK(Cutoff::eta(-0.8) == 0.0);
  CHECK(Cutoff::eta(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(Cutoff::eta(-0.5) == doctest::Approx(0.5).epsilon(1e-12));
  for (double t : {0.0, 0.3, 0.34, 0.5, 0.61, 0.7, 1.0}) {
    CHECK(Cutoff::eta(t) >= 0.0);
    CHECK(Cutoff::eta(t) <= 1.0);
  }
}

TEST_CASE("cutoff derivatives match finite differences") {
  for (double t : {0.36, 0.41, 0.5, 0.57, 0.64, -0.45}) {
    double fd1 = fd_central([](double a) { return Cutoff::eta(a); }, t, 1e-5);
    CHECK(Cutoff::eta_d(t) == doctest::Approx(fd1).epsilon(1e-7));
    double fd2 = fd_central([](double a) { return Cutoff::eta_d(a); }, t, 1e-5);
    CHECK(Cutoff::eta_dd(t) == doctest::Approx(fd2).epsilon(1e-6));
  }
}

TEST_CASE("map basics") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  SUBCASE("zero height is the identity") {
    HeightField h = HeightField::constant(S, 0.0);
    ThetaField th(S, h);
    std::mt19937_64 rng(2);
    for (int k = 0; k < 30; ++k) {
      Vec3 x = random_tube_point(S, rng);
      CHECK((th.map(x) - x).norm() < 1e-15);
      CHECK((th.inverse(x) - x).norm() < 1e-15);
    }
  }
  SUBCASE("uniform height displaces along the normal") {
    HeightField h = HeightField::constant(S, 0.05);
    ThetaField th(S, h);
    CHECK((th.map(Vec3(1, 0, 0)) - Vec3(1.05, 0, 0)).norm() < 1e-14);
    CHECK((th.inverse(Vec3(1.05, 0, 0)) - Vec3(1, 0, 0)).norm() < 1e-12);
  }
  SUBCASE("outside the cutoff support the map is the identity") {
    HeightField h = HeightField::constant(S, 0.05);
    ThetaField th(S, h);
    Vec3 x = Vec3(1 + 0.8 * 0.9, 0, 0);  // d/rho0 = 0.8 > 2/3
    CHECK((th.map(x) - x).norm() == 0.0);
    CHECK(th.grad_theta(x).norm() == 0.0);
  }
  SUBCASE("surface points land on the graph of h") {
    ScalarField g = random_scalar_field(3, 3, 0.03);
    HeightField h = HeightField::from_ambient(S, g);
    ThetaField th(S, h);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 20; ++k) {
      Vec2 s = random_param(S, rng);
      Vec3 expect = S.point(s) + h.value(s) * S.normal(s);
      CHECK((th.map(S.point(s)) - expect).norm() < 1e-12);
    }
  }
}

TEST_CASE("height gate") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  HeightField h = HeightField::constant(S, 0.5);  // 0.5 > 0.3 * 0.9
  CHECK_THROWS_AS(ThetaField(S, h), GateError);
  HeightField ok = HeightField::constant(S, 0.2);
  CHECK_NOTHROW(ThetaField(S, ok));
}

TEST_CASE("inverse round trip on random tube points") {
  for (auto S : {ReferenceSurface::sphere(1.0, 16, 32),
                 ReferenceSurface::torus(2.0, 0.5, 16, 32)}) {
    // keep the fiber map monotone: sup|h| * max|eta'| < rho0
    double amp = 0.8 / Cutoff::max_slope();
    HeightField h = random_height(S, 77, amp);
    ThetaField th(S, h);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
      Vec3 x = random_tube_point(S, rng, 0.95);
      Vec3 y = th.map(x);
      CHECK((th.inverse(y) - x).norm() < 1e-9);
    }
  }
}

TEST_CASE("grad theta matches finite differences of the map") {
  std::mt19937_64 rng(11);
  for (auto S : {ReferenceSurface::sphere(1.0, 16, 32),
                 ReferenceSurface::torus(2.0, 0.5, 16, 32),
                 ReferenceSurface::ellipsoid(1.2, 1.0, 0.8, 16, 32)}) {
    for (int draw = 0; draw < 15; ++draw) {
      HeightField h = random_height(S, 100 + draw, 0.1);
      ThetaField th(S, h);
      Vec3 x = random_tube_point(S, rng, 0.7);
      Mat3 G = th.grad_theta(x);
      Mat3 Gfd;
      const double step = 1e-5;
      for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = 1.0;
        Gfd.row(i) = ((th.displacement(x + step * e) -
                       th.displacement(x - step * e)) /
                      (2 * step))
                         .transpose();
      }
      double scale = std::max(1.0, G.norm());
      CHECK((G - Gfd).norm() / scale < 1e-6);
    }
  }
}

TEST_CASE("sphere closed form: grad theta for constant height") {
  // h == c on the unit sphere, on the surface itself: eta = 1, eta' = 0,
  // so grad theta = c * grad(x/|x|) = c (I - n n^T).
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  const double c = 0.04;
  HeightField h = HeightField::constant(S, c);
  ThetaField th(S, h);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    Vec2 s = random_param(S, rng);
    Vec3 x = S.point(s);
    Mat3 P = Mat3::Identity() - x * x.transpose();
    CHECK((th.grad_theta(x) - c * P).norm() < 1e-12);
  }
}

TEST_CASE("pullback coefficients") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  SUBCASE("zero height degeneracy") {
    HeightField h = HeightField::constant(S, 0.0);
    ThetaField th(S, h);
    std::mt19937_64 rng(13);
    for (int k = 0; k < 20; ++k) {
      Vec3 x = random_tube_point(S, rng);
      Vec2 s = random_param(S, rng);
      CHECK((th.m0(s) - Mat3::Identity()).norm() < 1e-14);
      CHECK(th.m1(x).norm() < 1e-14);
      CHECK(th.m2(x).norm() < 1e-14);
      CHECK(th.m3(x).norm() < 1e-14);
      CHECK(th.m4(x).norm() < 1e-14);
    }
  }
  SUBCASE("uniform height M0 on the unit sphere") {
    HeightField h = HeightField::constant(S, 0.1);
    ThetaField th(S, h);
    std::mt19937_64 rng(14);
    for (int k = 0; k < 10; ++k) {
      Vec2 s = random_param(S, rng);
      Vec3 n = S.normal(s);
      Mat3 P = Mat3::Identity() - n * n.transpose();
      Mat3 expect = n * n.transpose() + P / 1.1;
      CHECK((th.m0(s) - expect).norm() < 1e-12);
    }
  }
  SUBCASE("M0 determinant gate") {
    // on a small sphere a negative height soon drives det(I - h L) below
    // the 1/2 floor: (1 - |h|/R)^2 < 1/2 for |h|/R > 1 - sqrt(1/2)
    ReferenceSurface S3 = ReferenceSurface::sphere(0.3, 16, 32);
    HeightField h3 = HeightField::constant(S3, -0.09);
    h3.set_delta0(0.99);
    ThetaField th3(S3, h3, false);
    CHECK_THROWS_AS(th3.m0(Vec2(1.0, 1.0)), GateError);
  }
  SUBCASE("M4 symmetry and inverse identities") {
    HeightField h = random_height(S, 201, 0.15);
    ThetaField th(S, h);
    std::mt19937_64 rng(15);
    for (int k = 0; k < 25; ++k) {
      Vec3 x = random_tube_point(S, rng, 0.7);
      Mat3 G = th.grad_theta(x);
      Mat3 J = Mat3::Identity() + G;
      Mat3 Jinv = th.grad_theta_inverse(x);
      CHECK((J * Jinv - Mat3::Identity()).norm() < 1e-10);
      // (grad Theta)^{-1} = I - (I + grad theta)^{-1} grad theta
      CHECK((Jinv - (Mat3::Identity() - th.m1(x))).norm() < 1e-10);
      Mat3 M4 = th.m4(x);
      CHECK((M4 - M4.transpose()).norm() < 1e-10);
    }
  }
  SUBCASE("M0 maps tangent vectors to tangent vectors, fixes the normal") {
    HeightField h = random_height(S, 301, 0.15);
    ThetaField th(S, h);
    std::mt19937_64 rng(16);
    for (int k = 0; k < 20; ++k) {
      Vec2 s = random_param(S, rng);
      TangentFrame fr = S.frame(s);
      Mat3 M0 = th.m0(s);
      CHECK((M0 * fr.n - fr.n).norm() < 1e-12);
      CHECK(std::abs((M0 * fr.tau1).dot(fr.n)) < 1e-12);
      CHECK(std::abs((M0 * fr.tau2).dot(fr.n)) < 1e-12);
    }
  }
}

TEST_CASE("M2 agrees with a finite-difference Laplacian of the inverse") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  std::mt19937_64 rng(17);
  double amp = 0.6 / Cutoff::max_slope();
  for (int draw = 0; draw < 5; ++draw) {
    HeightField h = random_height(S, 400 + draw, amp);
    ThetaField th(S, h);
    for (int k = 0; k < 10; ++k) {
      Vec3 x = random_tube_point(S, rng, 0.5);
      Vec3 m2 = th.m2(x);
      Vec3 y = th.map(x);
      const double d = 2e-4;
      Vec3 lap = Vec3::Zero();
      for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e[a] = 1.0;
        lap += th.inverse(y + d * e) - 2 * th.inverse(y) +
               th.inverse(y - d * e);
      }
      lap /= d * d;
      double scale = std::max(1.0, m2.norm());
      CHECK((m2 - lap).norm() / scale < 1e-4);
    }
  }
}

TEST_CASE("time derivative of the inverse equals minus M3") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 16, 32, 0.9);
  double amp = 0.5 / Cutoff::max_slope();
  HeightField h = random_height(S, 501, amp, 0.4 / Cutoff::max_slope());
  ThetaField th(S, h);
  std::mt19937_64 rng(19);
  const double dt = 1e-5;
  HeightField hp = h.shifted_in_time(dt);
  HeightField hm = h.shifted_in_time(-dt);
  ThetaField thp(S, hp), thm(S, hm);
  for (int k = 0; k < 20; ++k) {
    Vec3 x = random_tube_point(S, rng, 0.6);
    Vec3 y = th.map(x);
    Vec3 fd = (thp.inverse(y) - thm.inverse(y)) / (2 * dt);
    Vec3 m3 = th.m3(x);
    double scale = std::max(1.0, m3.norm());
    CHECK((fd + m3).norm() / scale < 1e-5);
  }
}

TEST_CASE("extended height restriction equals the height") {
  ReferenceSurface S = ReferenceSurface::torus(2.0, 0.5, 16, 32);
  HeightField h = random_height(S, 601, 0.1);
  ThetaField th(S, h);
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    Vec2 s = random_param(S, rng);
    Vec3 x = S.point(s);
    ThetaDerivs d = th.derivs(x);
    CHECK((d.theta - h.value(s) * S.normal(s)).norm() < 1e-10);
  }
}

TEST_CASE("grid-backed heights run the same machinery") {
  ReferenceSurface S = ReferenceSurface::sphere(1.0, 32, 64, 0.9);
  ScalarField g = random_scalar_field(31, 2, 0.05);
  HeightField exact = HeightField::from_ambient(S, g);
  HeightField gridded = HeightField::from_samples(S, exact.samples());
  ThetaField ta(S, exact), tb(S, gridded);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 10; ++k) {
    Vec3 x = random_tube_point(S, rng, 0.5);
    CHECK((ta.map(x) - tb.map(x)).norm() < 1e-5);
  }
}
