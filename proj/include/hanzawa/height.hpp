#pragma once

#include <memory>
#include <optional>

#include "hanzawa/surface_fields.hpp"

namespace hanzawa {

// Height function h on the reference surface. Canonical storage is the grid
// sample array; a smooth evaluator rides along for off-node queries (the tube
// machinery needs h at arbitrary projected points). Ambient-backed heights
// additionally carry exact surface derivatives, which is what the
// high-accuracy verification paths run on.
class HeightField {
 public:
  HeightField() = default;

  static HeightField constant(const ReferenceSurface& S, double c,
                              double c_dot = 0.0);
  // h := g|_Sigma (and dh/dt := g_dot|_Sigma), exact chain-rule derivatives.
  static HeightField from_ambient(const ReferenceSurface& S, ScalarField g,
                                  std::optional<ScalarField> g_dot = {});
  static HeightField from_function(const ReferenceSurface& S, SurfaceFn h,
                                   SurfaceFn h_dot = nullptr);
  // Grid samples only (CSV ingestion, evolution states); off-node values come
  // from bicubic interpolation.
  static HeightField from_samples(const ReferenceSurface& S, GridScalar values,
                                  std::optional<GridScalar> dt_values = {});

  const ReferenceSurface& surface() const { return *S_; }
  const GridScalar& samples() const { return samples_; }
  const GridScalar& dt_samples() const { return dt_samples_; }
  bool has_time_derivative() const { return has_dot_; }
  bool ambient_backed() const { return static_cast<bool>(ambient_); }
  const ScalarField* ambient() const { return ambient_ ? &*ambient_ : nullptr; }
  const ScalarField* ambient_dot() const {
    return ambient_dot_ ? &*ambient_dot_ : nullptr;
  }

  double value(const Vec2& s) const { return eval_(s); }
  double dt(const Vec2& s) const { return dot_eval_ ? dot_eval_(s) : 0.0; }

  // Parameter derivatives (d/du h, d/dv h): exact for ambient-backed fields,
  // small-step stencils otherwise.
  Vec2 param_grad(const Vec2& s) const;
  Vec3 grad_sigma(const Vec2& s) const;
  Vec3 grad_sigma_dt(const Vec2& s) const;  // grad_S of dh/dt

  double delta0() const { return delta0_; }
  void set_delta0(double d) { delta0_ = d; }
  double sup_abs() const { return sup_abs_; }

  // Validity gate: sup|h| < delta0 * rho0. Throws GateError otherwise.
  void check_gate() const;
  bool passes_gate() const { return sup_abs_ < delta0_ * S_->rho0(); }

  // h + w * phi (shapes must match; ambient backing survives when both have
  // it, so derived fields stay exact along Frechet ladders).
  HeightField axpy(double w, const HeightField& phi) const;
  // The linear-in-time family h + dt * (dh/dt), used by the time-derivative
  // identity checks.
  HeightField shifted_in_time(double dt) const;

  SurfaceFn as_fn() const {
    auto e = eval_;
    return [e](const Vec2& s) { return e(s); };
  }

 private:
  void finalize();

  const ReferenceSurface* S_ = nullptr;
  SurfaceFn eval_, dot_eval_;
  std::optional<ScalarField> ambient_, ambient_dot_;
  GridScalar samples_, dt_samples_;
  bool has_dot_ = false;
  double delta0_ = 0.3;
  double sup_abs_ = 0.0;
  double step_ = 1e-3;
};

}  // namespace hanzawa
