#pragma once

#include <array>
#include <functional>
#include <random>

#include "hanzawa/core.hpp"

namespace hanzawa {

// Closed-form scalar function on (t, Omega) carrying analytic first and
// second spatial derivatives and a time derivative. Missing derivative
// callbacks fall back to central differences of the value.
struct ScalarField {
  std::function<double(double, const Vec3&)> value;
  std::function<Vec3(double, const Vec3&)> grad;
  std::function<Mat3(double, const Vec3&)> hess;
  std::function<double(double, const Vec3&)> dt;

  double operator()(double t, const Vec3& x) const { return value(t, x); }

  Vec3 gradient(double t, const Vec3& x) const;
  Mat3 hessian(double t, const Vec3& x) const;
  double time_derivative(double t, const Vec3& x) const;

  static ScalarField constant(double c);
  static ScalarField zero() { return constant(0.0); }

  ScalarField scaled(double a) const;
  ScalarField plus(const ScalarField& other, double weight = 1.0) const;

  // Spot check that the supplied analytic derivatives are consistent with
  // finite differences of the value at sampled points.
  void self_test(const Vec3& lo, const Vec3& hi, int points = 100,
                 unsigned seed = 1234, double rel_tol = 1e-6) const;
};

// Vector counterpart. Gradient convention: (grad u)_ij = d_i u_j.
// hess[k](i, j) = d_i d_j u_k.
struct VectorField {
  std::function<Vec3(double, const Vec3&)> value;
  std::function<Mat3(double, const Vec3&)> grad;
  std::function<std::array<Mat3, 3>(double, const Vec3&)> hess;
  std::function<Vec3(double, const Vec3&)> dt;

  Vec3 operator()(double t, const Vec3& x) const { return value(t, x); }

  Mat3 gradient(double t, const Vec3& x) const;
  std::array<Mat3, 3> hessian(double t, const Vec3& x) const;
  Vec3 time_derivative(double t, const Vec3& x) const;
  Vec3 laplacian(double t, const Vec3& x) const;
  double divergence(double t, const Vec3& x) const;

  static VectorField zero();
  static VectorField from_components(const ScalarField& f0,
                                     const ScalarField& f1,
                                     const ScalarField& f2);

  VectorField scaled(double a) const;
  VectorField plus(const VectorField& other, double weight = 1.0) const;

  void self_test(const Vec3& lo, const Vec3& hi, int points = 100,
                 unsigned seed = 1234, double rel_tol = 1e-6) const;
};

// Two-branch field across the interface: `inner` lives on the -n side,
// `outer` on the +n side. Both branches extend smoothly past the interface
// so one-sided traces can be evaluated directly.
struct JumpScalarField {
  ScalarField inner, outer;
  const ScalarField& branch(double side) const {
    return side >= 0 ? outer : inner;
  }
  static JumpScalarField continuous(const ScalarField& f) { return {f, f}; }
  JumpScalarField scaled(double a) const {
    return {inner.scaled(a), outer.scaled(a)};
  }
  JumpScalarField plus(const JumpScalarField& o, double w = 1.0) const {
    return {inner.plus(o.inner, w), outer.plus(o.outer, w)};
  }
};

struct JumpVectorField {
  VectorField inner, outer;
  const VectorField& branch(double side) const {
    return side >= 0 ? outer : inner;
  }
  static JumpVectorField continuous(const VectorField& f) { return {f, f}; }
  JumpVectorField scaled(double a) const {
    return {inner.scaled(a), outer.scaled(a)};
  }
  JumpVectorField plus(const JumpVectorField& o, double w = 1.0) const {
    return {inner.plus(o.inner, w), outer.plus(o.outer, w)};
  }
};

struct FluidParams {
  double nu_plus = 1.0;   // viscosity on the inner (+) phase
  double nu_minus = 1.0;  // viscosity on the outer (-) phase
  double sigma = 1.0;     // magnetic diffusivity
  double kappa = 1.0;     // surface tension coefficient

  FluidParams() = default;
  FluidParams(double np, double nm, double s, double k)
      : nu_plus(np), nu_minus(nm), sigma(s), kappa(k) {
    if (!(nu_plus > 0) || !(nu_minus > 0) || !(sigma > 0) || !(kappa > 0))
      throw ConfigError("fluid parameters must be positive");
  }

  // Viscosity by side of the reference surface: d < 0 is the inner phase.
  double nu(double signed_distance) const {
    return signed_distance < 0 ? nu_plus : nu_minus;
  }
};

// Library of small deterministic analytic fields used by the verification
// suites: random trigonometric polynomials with exact derivatives.
ScalarField random_scalar_field(unsigned seed, int terms = 3,
                                double amplitude = 1.0,
                                double time_rate = 0.0);
VectorField random_vector_field(unsigned seed, int terms = 3,
                                double amplitude = 1.0,
                                double time_rate = 0.0);
// Divergence-free random field built as a curl of a random potential.
VectorField random_solenoidal_field(unsigned seed, int terms = 3,
                                    double amplitude = 1.0,
                                    double time_rate = 0.0);

}  // namespace hanzawa
