#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hanzawa/core.hpp"
#include "hanzawa/grid.hpp"

namespace hanzawa {

enum class SurfaceKind { Sphere, Ellipsoid, Torus };

// Covariant tangent vectors (columns of the parameterization Jacobian),
// their dual basis, and the unit outward normal at one parameter point.
struct TangentFrame {
  Vec3 tau1, tau2;  // covariant basis
  Vec3 dual1, dual2;  // tau^i . tau_j = delta_ij
  Vec3 n;  // unit outward normal
  Mat2 metric;  // first fundamental form

  Mat3 projector() const { return Mat3::Identity() - n * n.transpose(); }
};

struct ProjectionResult {
  Vec2 s;  // parameter of the foot point
  double d = 0;  // signed distance, positive on the outward side
  int iterations = 0;
};

// A closed parameterized surface in R^3 with analytic first and second
// parameter derivatives, nearest-point projection, and signed distance.
// All evaluations are pure; the object is immutable after construction.
class ReferenceSurface {
 public:
  struct Params {
    double R = 1.0;  // sphere / torus major radius
    double r = 0.5;  // torus minor radius
    double a = 1.0, b = 1.0, c = 1.0;  // ellipsoid semi-axes
  };

  ReferenceSurface(SurfaceKind kind, Params p, int nu, int nv,
                   std::optional<double> rho0 = std::nullopt);

  static ReferenceSurface sphere(double R, int nu, int nv,
                                 std::optional<double> rho0 = std::nullopt) {
    Params p;
    p.R = R;
    return ReferenceSurface(SurfaceKind::Sphere, p, nu, nv, rho0);
  }
  static ReferenceSurface torus(double R, double r, int nu, int nv,
                                std::optional<double> rho0 = std::nullopt) {
    Params p;
    p.R = R;
    p.r = r;
    return ReferenceSurface(SurfaceKind::Torus, p, nu, nv, rho0);
  }
  static ReferenceSurface ellipsoid(double a, double b, double c, int nu,
                                    int nv,
                                    std::optional<double> rho0 = std::nullopt) {
    Params p;
    p.a = a;
    p.b = b;
    p.c = c;
    return ReferenceSurface(SurfaceKind::Ellipsoid, p, nu, nv, rho0);
  }

  SurfaceKind kind() const { return kind_; }
  const Params& params() const { return params_; }
  const ParamGrid& grid() const { return grid_; }
  double rho0() const { return rho0_; }
  double reach() const { return reach_; }

  // Phi and its parameter derivatives (all closed form).
  Vec3 point(const Vec2& s) const;
  Mat32 jacobian(const Vec2& s) const;
  void second_derivatives(const Vec2& s, Vec3& phi_uu, Vec3& phi_uv,
                          Vec3& phi_vv) const;

  Vec3 normal(const Vec2& s) const;
  TangentFrame frame(const Vec2& s) const;

  // Weingarten tensor L = -grad_S n extended by zero on the normal,
  // assembled from the second fundamental form in the dual basis.
  Mat3 weingarten(const Vec2& s) const;
  // Weingarten tensor of the parallel surface through Phi(s) + d n(s),
  // i.e. L(s) evaluated where the ambient normal-field derivative needs it.
  double mean_curvature(const Vec2& s) const;  // tr L
  Mat3 projector(const Vec2& s) const;

  // Nearest-point projection of an ambient point in the tube B(Sigma; rho0).
  // Sphere and torus are closed form; the ellipsoid runs a damped Newton
  // iteration on the orthogonality conditions (max 50 iters, tol 1e-12).
  ProjectionResult project(const Vec3& x) const;

  // Signed distance; thin wrapper over project().
  double signed_distance(const Vec3& x) const { return project(x).d; }

  bool in_tube(const Vec3& x) const;

  // Sign of the phase a point belongs to: negative inside the surface
  // (the + phase), positive outside. Defined on all of R^3.
  double implicit_side(const Vec3& x) const;

  std::string describe() const;

 private:
  void validate() const;
  ProjectionResult project_newton(const Vec3& x, Vec2 s0) const;

  SurfaceKind kind_;
  Params params_;
  ParamGrid grid_;
  double rho0_ = 0;
  double reach_ = 0;
};

// Surface scalar given by the restriction of an ambient closed-form function,
// carrying exact surface gradients through the chain rule. This is the
// high-accuracy path used by the verification suites.
struct AmbientScalar;

}  // namespace hanzawa
