#include "hanzawa/height.hpp"

#include <sstream>

namespace hanzawa {

void HeightField::finalize() {
  samples_ = GridScalar::sample(S_->grid(), eval_);
  if (dot_eval_)
    dt_samples_ = GridScalar::sample(S_->grid(), dot_eval_);
  else
    dt_samples_ = GridScalar(S_->grid(), 0.0);
  sup_abs_ = 0.0;
  for (double v : samples_.values()) sup_abs_ = std::max(sup_abs_, std::abs(v));
}

HeightField HeightField::constant(const ReferenceSurface& S, double c,
                                  double c_dot) {
  return from_ambient(S, ScalarField::constant(c),
                      ScalarField::constant(c_dot));
}

HeightField HeightField::from_ambient(const ReferenceSurface& S, ScalarField g,
                                      std::optional<ScalarField> g_dot) {
  HeightField h;
  h.S_ = &S;
  h.ambient_ = g;
  ScalarField gc = g;
  const ReferenceSurface* sp = &S;
  h.eval_ = [gc, sp](const Vec2& s) { return gc.value(0.0, sp->point(s)); };
  if (g_dot) {
    h.ambient_dot_ = *g_dot;
    ScalarField gd = *g_dot;
    h.dot_eval_ = [gd, sp](const Vec2& s) {
      return gd.value(0.0, sp->point(s));
    };
    h.has_dot_ = true;
  }
  h.finalize();
  return h;
}

HeightField HeightField::from_function(const ReferenceSurface& S, SurfaceFn f,
                                       SurfaceFn f_dot) {
  HeightField h;
  h.S_ = &S;
  h.eval_ = std::move(f);
  if (f_dot) {
    h.dot_eval_ = std::move(f_dot);
    h.has_dot_ = true;
  }
  h.finalize();
  return h;
}

HeightField HeightField::from_samples(const ReferenceSurface& S,
                                      GridScalar values,
                                      std::optional<GridScalar> dt_values) {
  if (values.grid().size() != S.grid().size() ||
      values.grid().nu != S.grid().nu)
    throw ShapeError("height samples do not match the surface grid");
  HeightField h;
  h.S_ = &S;
  auto data = std::make_shared<GridScalar>(std::move(values));
  h.eval_ = [data](const Vec2& s) { return data->interpolate(s); };
  if (dt_values) {
    auto dot = std::make_shared<GridScalar>(std::move(*dt_values));
    h.dot_eval_ = [dot](const Vec2& s) { return dot->interpolate(s); };
    h.has_dot_ = true;
  }
  h.finalize();
  return h;
}

Vec2 HeightField::param_grad(const Vec2& s) const {
  if (ambient_) return RestrictedScalar(*S_, *ambient_).param_grad(s);
  return param_gradient(eval_, s, step_);
}

Vec3 HeightField::grad_sigma(const Vec2& s) const {
  if (ambient_) return RestrictedScalar(*S_, *ambient_).surface_gradient(s);
  return surface_grad(*S_, eval_, s, step_);
}

Vec3 HeightField::grad_sigma_dt(const Vec2& s) const {
  if (!has_dot_) return Vec3::Zero();
  if (ambient_dot_)
    return RestrictedScalar(*S_, *ambient_dot_).surface_gradient(s);
  return surface_grad(*S_, dot_eval_, s, step_);
}

void HeightField::check_gate() const {
  if (!passes_gate()) {
    std::ostringstream os;
    os << "height field too large: sup|h|=" << sup_abs_ << " >= delta0*rho0="
       << delta0_ * S_->rho0();
    throw GateError(os.str());
  }
}

HeightField HeightField::axpy(double w, const HeightField& phi) const {
  if (phi.S_ != S_) throw ShapeError("height fields on different surfaces");
  HeightField out;
  out.S_ = S_;
  out.delta0_ = delta0_;
  SurfaceFn a = eval_, b = phi.eval_;
  out.eval_ = [a, b, w](const Vec2& s) { return a(s) + w * b(s); };
  if (has_dot_ || phi.has_dot_) {
    SurfaceFn ad = dot_eval_, bd = phi.dot_eval_;
    out.dot_eval_ = [ad, bd, w](const Vec2& s) {
      return (ad ? ad(s) : 0.0) + w * (bd ? bd(s) : 0.0);
    };
    out.has_dot_ = true;
  }
  if (ambient_ && phi.ambient_) {
    out.ambient_ = ambient_->plus(*phi.ambient_, w);
    if (ambient_dot_ && phi.ambient_dot_)
      out.ambient_dot_ = ambient_dot_->plus(*phi.ambient_dot_, w);
    else if (ambient_dot_)
      out.ambient_dot_ = ambient_dot_;
    else if (phi.ambient_dot_)
      out.ambient_dot_ = phi.ambient_dot_->scaled(w);
  }
  out.finalize();
  return out;
}

HeightField HeightField::shifted_in_time(double dt) const {
  if (!has_dot_)
    throw ConfigError("time shift needs a height field with dh/dt");
  // The family h(t) = h + t*dh/dt keeps its rate; the rate field itself has
  // no time derivative.
  HeightField rate;
  rate.S_ = S_;
  rate.eval_ = dot_eval_;
  if (ambient_dot_) rate.ambient_ = ambient_dot_;
  rate.finalize();
  return axpy(dt, rate);
}

}  // namespace hanzawa
