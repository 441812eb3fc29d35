#pragma once

#include "hanzawa/height.hpp"

namespace hanzawa {

// Smooth cutoff: 1 on |t| <= 1/3, 0 on |t| >= 2/3, built as the bump
// quotient psi(2/3-|t|) / (psi(2/3-|t|) + psi(|t|-1/3)) with
// psi(r) = exp(-1/r) for r > 0. Plateau values are exact.
struct Cutoff {
  static double eta(double t);
  static double eta_d(double t);
  static double eta_dd(double t);
  // sup |eta'|; bounds the fiber slope h may contribute before the map stops
  // being monotone along normal fibers.
  static double max_slope();
};

// Everything the pullback formulas need about theta at one point.
struct ThetaDerivs {
  bool in_support = false;  // theta == 0 outside
  Vec3 theta = Vec3::Zero();
  Mat3 grad = Mat3::Zero();  // (grad theta)_ij = d_i theta_j
  std::array<Mat3, 3> hess{Mat3::Zero(), Mat3::Zero(),
                           Mat3::Zero()};  // hess[k](i,j) = d_i d_j theta_k
  Vec3 dt = Vec3::Zero();  // d/dt theta
};

// The diffeomorphism Theta_h(x) = x + eta(d/rho0) h(Pi x) n(Pi x), its
// displacement, derivatives, inverse, and the pullback coefficient fields.
// Immutable; all evaluations are const and thread-safe.
class ThetaField {
 public:
  ThetaField(const ReferenceSurface& S, const HeightField& h,
             bool enforce_gate = true);

  const ReferenceSurface& surface() const { return *S_; }
  const HeightField& height() const { return *h_; }

  Vec3 displacement(const Vec3& x) const;  // theta_h(x)
  Vec3 map(const Vec3& x) const;           // Theta_h(x)
  // Damped Newton along the normal fiber through Pi(y).
  Vec3 inverse(const Vec3& y) const;

  Mat3 grad_theta(const Vec3& x) const;
  // need_hess controls whether second derivatives are assembled (the
  // generic path obtains them by differencing grad_theta).
  ThetaDerivs derivs(const Vec3& x, bool need_hess = false) const;

  // Pullback coefficients.
  Mat3 m0(const Vec2& s) const;  // (I - h L)^{-1}, adjugate / determinant
  Mat3 m1(const Vec3& x) const;  // (I + grad theta)^{-1} grad theta
  Vec3 m2(const Vec3& x) const;  // (laplace Theta^{-1}) o Theta
  // Row vector d_t theta (I - M1); contracts from the left with grad fields.
  Vec3 m3(const Vec3& x) const;
  Mat3 m4(const Vec3& x) const;  // (grad Theta)^{-T} (grad Theta)^{-1} - I

  // (grad Theta)^{-1} = (I + grad theta)^{-1}
  Mat3 grad_theta_inverse(const Vec3& x) const;

  // Step used by the generic second-derivative differencing; exposed so the
  // verification sweeps can run Richardson order fits.
  double hess_step() const { return hess_step_; }
  void set_hess_step(double s) { hess_step_ = s; }

 private:
  ThetaDerivs derivs_generic(const Vec3& x, bool need_hess) const;
  ThetaDerivs derivs_sphere_exact(const Vec3& x) const;
  bool sphere_exact() const;

  const ReferenceSurface* S_;
  const HeightField* h_;
  double hess_step_ = 1e-5;
};

// Directional derivatives of the pullback coefficients in a height direction
// phi. Assembled from the theta-derivatives of the base height and of the
// direction; `th` and `tphi` must live on the same surface.
Mat3 dm0(const ThetaField& th, const HeightField& phi, const Vec2& s);
Mat3 dm1(const ThetaField& th, const ThetaField& tphi, const Vec3& x);
Vec3 dm2(const ThetaField& th, const ThetaField& tphi, const Vec3& x);
Vec3 dm3(const ThetaField& th, const ThetaField& tphi, const Vec3& x);
Mat3 dm4(const ThetaField& th, const ThetaField& tphi, const Vec3& x);

// 3x3 adjugate (used by the specified adjugate/determinant route for M0).
Mat3 adjugate3(const Mat3& A);

}  // namespace hanzawa
