#pragma once

#include <memory>
#include <vector>

#include "hanzawa/interface_geometry.hpp"

namespace hanzawa {

// The transformed-problem state z = (u, B, p, varpi, h) on the fixed
// geometry. u and p are jump-aware (one branch per phase), varpi is the
// surface trace of the pressure jump. Directions for Frechet derivatives
// share the same shape.
struct State {
  const ReferenceSurface* S = nullptr;
  FluidParams fluid;
  JumpVectorField u;
  VectorField B;
  JumpScalarField p;
  SurfaceFn varpi;
  HeightField h;

  static State zero(const ReferenceSurface& S, FluidParams fp);
  State axpy(double w, const State& dir) const;  // z + w * dir

  // varpi(s) - jump(p)(Phi + h n), the State well-formedness residual.
  double varpi_residual(double t, const Vec2& s) const;
};

using Direction = State;

// --- basic jump machinery ----------------------------------------------------

double jump(const JumpScalarField& f, double t, const Vec3& x);
Vec3 jump(const JumpVectorField& f, double t, const Vec3& x);

// jump of nu^{+-} (grad f + grad f^T) at a surface point; traces evaluated
// branch-wise (analytic branches extend smoothly across Sigma).
Mat3 jump_viscous_stress(const JumpVectorField& u, const FluidParams& fp,
                         double t, const Vec3& x);

// One-sided trace by offsets along +-n with Richardson extrapolation; the
// default path evaluates branches directly, this exists for fields that are
// only defined strictly off the interface.
double trace_along_normal(const std::function<double(const Vec3&)>& f,
                          const Vec3& x0, const Vec3& n, double side);

// --- composition with Theta ---------------------------------------------------

// Pullback f-bar = f o Theta with chain-rule derivatives (exact given the
// theta derivatives; the generic surface path differences grad theta once
// for the Hessian terms).
ScalarField compose_with_theta(const ScalarField& f,
                               std::shared_ptr<const ThetaField> th);
VectorField compose_with_theta(const VectorField& f,
                               std::shared_ptr<const ThetaField> th);
JumpScalarField compose_with_theta(const JumpScalarField& f,
                                   std::shared_ptr<const ThetaField> th);
JumpVectorField compose_with_theta(const JumpVectorField& f,
                                   std::shared_ptr<const ThetaField> th);

// Builds the transformed state from original-frame fields: every component
// composed with Theta_h and varpi set to the composed pressure jump.
State pulled_back_state(const ReferenceSurface& S, const FluidParams& fp,
                        const JumpVectorField& u, const VectorField& B,
                        const JumpScalarField& p, const HeightField& h);

// --- transformation identity checkers -----------------------------------------

// |LHS - RHS| for the pullback identities; u is an analytic field in the
// original frame, evaluated off the interface when jump-aware data is used.
double check_gradient_identity(const VectorField& u, const ThetaField& th,
                               double t, const Vec3& x);
double check_divergence_identity(const VectorField& u, const ThetaField& th,
                                 double t, const Vec3& x);
double check_laplacian_identity(const VectorField& u, const ThetaField& th,
                                double t, const Vec3& x);
double check_time_identity(const VectorField& u, const ThetaField& th,
                           double t, const Vec3& x);

// --- linear parts --------------------------------------------------------------

Vec3 l1(const State& z, double t, const Vec3& x);
Vec3 l2(const State& z, double t, const Vec3& x);
double l3(const State& z, double t, const Vec3& x);
Vec3 l4(const State& z, double t, const Vec2& s);
double l5(const State& z, const SurfaceVecFn& b, double t, const Vec2& s);

// --- nonlinear parts -----------------------------------------------------------

Vec3 g1(const State& z, double t, const Vec3& x);
Vec3 g2(const State& z, double t, const Vec3& x);
double g3(const State& z, double t, const Vec3& x);
Vec3 g4(const State& z, double t, const Vec2& s);
double g5(const State& z, const SurfaceVecFn& b, double t, const Vec2& s);

// Surface-tension remainders. cal_g2 subtracts the full affine part of the
// curvature at h = 0 (value and linearization), so it vanishes at h = 0 and
// is quadratically small; the equilibrium term kappa tr L appears explicitly
// in the stress reconstruction instead.
double cal_g1(const State& z, double t, const Vec2& s);
double cal_g2(const State& z, double t, const Vec2& s);
Vec3 cal_g3(const State& z, double t, const Vec2& s);

// --- original-frame residuals (oracles) ----------------------------------------

Vec3 momentum_residual(const JumpVectorField& u, const VectorField& B,
                       const JumpScalarField& p, const FluidParams& fp,
                       double side, double t, const Vec3& y);
Vec3 induction_residual(const JumpVectorField& u, const VectorField& B,
                        const FluidParams& fp, double side, double t,
                        const Vec3& y);
// R = -jump(nu(grad u + grad u^T) - p I) n_Gamma - kappa H n_Gamma at the
// deformed point, expressed on Sigma (composed with Theta).
Vec3 stress_residual_pulled(const ReferenceSurface& S, const FluidParams& fp,
                            const JumpVectorField& u, const JumpScalarField& p,
                            const HeightField& h, double t, const Vec2& s);
// The decomposition of that residual that L4 - G4 must reproduce:
// (1/beta) (P R + (R.n)(n + alpha)) + kappa (tr L) n.
Vec3 stress_oracle_decomposed(const ReferenceSurface& S, const FluidParams& fp,
                              const JumpVectorField& u,
                              const JumpScalarField& p, const HeightField& h,
                              double t, const Vec2& s);

// --- Frechet catalogue ----------------------------------------------------------

enum class FrechetOp {
  M0,
  M1,
  M2,
  M3,
  M4,
  Alpha,
  Beta,
  HGamma,
  CalG1,
  CalG2,
  CalG3,
  G1,
  G2,
  G3,
  G4,
  G5
};

const char* frechet_op_name(FrechetOp op);
std::vector<FrechetOp> all_frechet_ops();

// Evaluation point: surface ops read s, ambient ops read x.
struct EvalPoint {
  Vec2 s = Vec2::Zero();
  Vec3 x = Vec3::Zero();
};

Eigen::VectorXd frechet_value(FrechetOp op, const State& z,
                              const SurfaceVecFn& b, double t,
                              const EvalPoint& pt);
Eigen::VectorXd frechet_derivative(FrechetOp op, const State& z,
                                   const Direction& dir, const SurfaceVecFn& b,
                                   double t, const EvalPoint& pt);

struct FrechetCheck {
  FrechetOp op;
  std::vector<double> eps;
  std::vector<double> rel_err;
  double observed_order = 0;  // fitted between the first two usable rungs
  bool pass = false;
  double noise_floor = 1e-11;
};

// Central-difference ladder (F(z + eps dir) - F(z - eps dir)) / (2 eps)
// against the closed-form derivative. Order is reported between consecutive
// rungs whose error sits above the noise floor.
FrechetCheck frechet_check(FrechetOp op, const State& z, const Direction& dir,
                           const SurfaceVecFn& b, double t,
                           const EvalPoint& pt,
                           const std::vector<double>& eps_ladder,
                           double rel_tol);

}  // namespace hanzawa
