#pragma once

#include <functional>

#include "hanzawa/fields.hpp"
#include "hanzawa/surface.hpp"

namespace hanzawa {

using SurfaceFn = std::function<double(const Vec2&)>;
using SurfaceVecFn = std::function<Vec3(const Vec2&)>;

// Surface differential operators realized over the parameter grid.
//
// Two routes are provided. The callable route differentiates a closed-form
// function of the parameters by short centered stencils (step small against
// the parameter scale, so the error is at the rounding floor); the grid route
// uses the 4th-order node stencils of GridScalar. Both map parameter
// derivatives through the dual frame.

// d/ds of a callable, 4th order, default step tuned for trig-scale functions.
Vec2 param_gradient(const SurfaceFn& f, const Vec2& s, double step = 1e-3);

Vec3 surface_grad(const ReferenceSurface& S, const SurfaceFn& f, const Vec2& s,
                  double step = 1e-3);

// (grad_S F)_ij = (grad_S F_j)_i for a vector-valued surface function.
Mat3 surface_grad_vec(const ReferenceSurface& S, const SurfaceVecFn& F,
                      const Vec2& s, double step = 1e-3);

double surface_div(const ReferenceSurface& S, const SurfaceVecFn& F,
                   const Vec2& s, double step = 1e-3);

// Laplace-Beltrami via the metric form (1/sqrt g) d_i(sqrt g g^{ij} d_j f).
double laplace_beltrami(const ReferenceSurface& S, const SurfaceFn& f,
                        const Vec2& s, double step = 1e-3);

// Grid-sample route (node-only).
Vec3 surface_grad(const ReferenceSurface& S, const GridScalar& f, int i,
                  int j);
double laplace_beltrami(const ReferenceSurface& S, const GridScalar& f, int i,
                        int j);

// Restriction of an ambient closed-form field to the surface, with exact
// parameter derivatives through the chain rule.
class RestrictedScalar {
 public:
  RestrictedScalar(const ReferenceSurface& S, ScalarField g, double t = 0.0)
      : S_(&S), g_(std::move(g)), t_(t) {}

  double value(const Vec2& s) const { return g_.value(t_, S_->point(s)); }
  Vec2 param_grad(const Vec2& s) const {
    Mat32 J = S_->jacobian(s);
    Vec3 gg = g_.gradient(t_, S_->point(s));
    return Vec2(J.col(0).dot(gg), J.col(1).dot(gg));
  }
  Mat2 param_hess(const Vec2& s) const {
    Mat32 J = S_->jacobian(s);
    Vec3 phi_uu, phi_uv, phi_vv;
    S_->second_derivatives(s, phi_uu, phi_uv, phi_vv);
    Vec3 x = S_->point(s);
    Vec3 gg = g_.gradient(t_, x);
    Mat3 H = g_.hessian(t_, x);
    Mat2 out;
    out(0, 0) = J.col(0).dot(H * J.col(0)) + gg.dot(phi_uu);
    out(0, 1) = J.col(0).dot(H * J.col(1)) + gg.dot(phi_uv);
    out(1, 0) = out(0, 1);
    out(1, 1) = J.col(1).dot(H * J.col(1)) + gg.dot(phi_vv);
    return out;
  }
  // grad_S f = P grad g on the surface.
  Vec3 surface_gradient(const Vec2& s) const {
    return S_->projector(s) * g_.gradient(t_, S_->point(s));
  }
  const ScalarField& ambient() const { return g_; }

 private:
  const ReferenceSurface* S_;
  ScalarField g_;
  double t_;
};

// Generic finite-difference geometry pipeline over point samples of an
// arbitrary parameterized patch (no analytic derivatives). This is the
// independent oracle used against the curvature formula path: it sees only
// the map s -> Psi(s) on a grid.
class FdPatch {
 public:
  // orientation_hint: FD normals are flipped to have positive dot with it.
  FdPatch(const ParamGrid& grid, std::function<Vec3(const Vec2&)> psi,
          std::function<Vec3(const Vec2&)> orientation_hint);

  Vec3 point(int i, int j) const;
  Vec3 normal(int i, int j) const;
  // Mean curvature tr(I^{-1} II) in the convention -div_S n (so the unit
  // sphere with outward orientation gives -2).
  double mean_curvature(int i, int j) const;

 private:
  Vec3 sample(int i, int j) const { return pts_[grid_.index(i, j)]; }
  Vec3 wrapped(int i, int j) const {
    auto [ii, jj] = grid_.wrap(i, j);
    return pts_[grid_.index(ii, jj)];
  }
  Vec3 d_du(int i, int j) const;
  Vec3 d_dv(int i, int j) const;
  Vec3 d2_duu(int i, int j) const;
  Vec3 d2_dvv(int i, int j) const;
  Vec3 d2_duv(int i, int j) const;

  ParamGrid grid_;
  std::vector<Vec3> pts_;
  std::function<Vec3(const Vec2&)> hint_;
};

}  // namespace hanzawa
