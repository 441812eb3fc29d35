#include "hanzawa/hanzawa_map.hpp"

#include <sstream>

namespace hanzawa {

// --- cutoff ------------------------------------------------------------------

namespace {

// psi(r) = exp(-1/r), with the underflow region clipped to exact zero.
double psi(double r) {
  if (r <= 1e-3) return 0.0;
  return std::exp(-1.0 / r);
}
double psi_d(double r) {
  if (r <= 1e-3) return 0.0;
  return std::exp(-1.0 / r) / (r * r);
}
double psi_dd(double r) {
  if (r <= 1e-3) return 0.0;
  return std::exp(-1.0 / r) * (1.0 / (r * r * r * r) - 2.0 / (r * r * r));
}

}  // namespace

double Cutoff::eta(double t) {
  double a = std::abs(t);
  if (a <= 1.0 / 3) return 1.0;
  if (a >= 2.0 / 3) return 0.0;
  double A = psi(2.0 / 3 - a), B = psi(a - 1.0 / 3);
  return A / (A + B);
}

double Cutoff::eta_d(double t) {
  double a = std::abs(t);
  if (a <= 1.0 / 3 || a >= 2.0 / 3) return 0.0;
  double sgn = t >= 0 ? 1.0 : -1.0;
  double A = psi(2.0 / 3 - a), B = psi(a - 1.0 / 3);
  double Ad = -psi_d(2.0 / 3 - a), Bd = psi_d(a - 1.0 / 3);
  double d = (Ad * B - A * Bd) / sq(A + B);
  return sgn * d;
}

double Cutoff::eta_dd(double t) {
  double a = std::abs(t);
  if (a <= 1.0 / 3 || a >= 2.0 / 3) return 0.0;
  double A = psi(2.0 / 3 - a), B = psi(a - 1.0 / 3);
  double Ad = -psi_d(2.0 / 3 - a), Bd = psi_d(a - 1.0 / 3);
  double Add = psi_dd(2.0 / 3 - a), Bdd = psi_dd(a - 1.0 / 3);
  double S = A + B, Sd = Ad + Bd, Sdd = Add + Bdd;
  // (A/S)'' = A''/S - 2 A' S'/S^2 - A S''/S^2 + 2 A S'^2 / S^3
  return Add / S - 2 * Ad * Sd / (S * S) - A * Sdd / (S * S) +
         2 * A * Sd * Sd / (S * S * S);
}

double Cutoff::max_slope() {
  // symmetric quotient peaks mid-transition; scan once and cache
  static const double cached = [] {
    double m = 0;
    for (int i = 0; i <= 4000; ++i) {
      double t = 1.0 / 3 + (i / 4000.0) / 3.0;
      m = std::max(m, std::abs(eta_d(t)));
    }
    return m;
  }();
  return cached;
}

// --- ThetaField ---------------------------------------------------------------

ThetaField::ThetaField(const ReferenceSurface& S, const HeightField& h,
                       bool enforce_gate)
    : S_(&S), h_(&h) {
  if (&h.surface() != &S)
    throw ShapeError("height field belongs to a different surface");
  if (enforce_gate) h.check_gate();
}

bool ThetaField::sphere_exact() const {
  return S_->kind() == SurfaceKind::Sphere && h_->ambient_backed();
}

Vec3 ThetaField::displacement(const Vec3& x) const {
  if (!S_->in_tube(x)) return Vec3::Zero();
  ProjectionResult pr = S_->project(x);
  double e = Cutoff::eta(pr.d / S_->rho0());
  if (e == 0.0) return Vec3::Zero();
  return e * h_->value(pr.s) * S_->normal(pr.s);
}

Vec3 ThetaField::map(const Vec3& x) const { return x + displacement(x); }

Vec3 ThetaField::inverse(const Vec3& y) const {
  if (!S_->in_tube(y)) return y;
  ProjectionResult pr = S_->project(y);
  double hval = h_->value(pr.s);
  if (hval == 0.0) return y;
  const double rho0 = S_->rho0();
  // Solve f(d) = d + eta(d/rho0) h - d_y = 0 along the fiber.
  auto f = [&](double d) { return d + Cutoff::eta(d / rho0) * hval - pr.d; };
  auto fp = [&](double d) { return 1.0 + Cutoff::eta_d(d / rho0) * hval / rho0; };
  double lo = -rho0, hi = rho0;
  double d = pr.d - Cutoff::eta(pr.d / rho0) * hval;  // first guess
  d = std::clamp(d, lo, hi);
  double fd = f(d);
  int it = 0;
  const int max_iter = 200;
  for (; it < max_iter && std::abs(fd) > 1e-14; ++it) {
    if (fd > 0)
      hi = d;
    else
      lo = d;
    double deriv = fp(d);
    double step = (std::abs(deriv) > 1e-12) ? -fd / deriv : 0.0;
    double cand = d + step;
    if (step == 0.0 || cand <= lo || cand >= hi) cand = 0.5 * (lo + hi);
    // Damping: keep the bracket shrinking.
    double fcand = f(cand);
    int halvings = 0;
    while (std::abs(fcand) > std::abs(fd) && halvings < 40) {
      cand = 0.5 * (cand + d);
      fcand = f(cand);
      ++halvings;
    }
    d = cand;
    fd = fcand;
  }
  if (std::abs(fd) > 1e-12) {
    std::ostringstream os;
    os << "fiber Newton for the inverse map did not converge, residual " << fd;
    throw NumericError(os.str());
  }
  return S_->point(pr.s) + d * S_->normal(pr.s);
}

Mat3 ThetaField::grad_theta(const Vec3& x) const {
  return derivs(x, false).grad;
}

ThetaDerivs ThetaField::derivs(const Vec3& x, bool need_hess) const {
  if (sphere_exact()) {
    ThetaDerivs d = derivs_sphere_exact(x);
    return d;
  }
  return derivs_generic(x, need_hess);
}

ThetaDerivs ThetaField::derivs_generic(const Vec3& x, bool need_hess) const {
  ThetaDerivs out;
  if (!S_->in_tube(x)) return out;
  ProjectionResult pr = S_->project(x);
  const double rho0 = S_->rho0();
  double e = Cutoff::eta(pr.d / rho0);
  double e1 = Cutoff::eta_d(pr.d / rho0) / rho0;
  if (e == 0.0 && e1 == 0.0) return out;
  out.in_support = true;

  Vec3 n = S_->normal(pr.s);
  Mat3 L = S_->weingarten(pr.s);
  Mat3 P = Mat3::Identity() - n * n.transpose();
  Mat3 gradPi = P * (Mat3::Identity() - pr.d * L).inverse();

  double hval = h_->value(pr.s);
  Vec3 gsh = h_->grad_sigma(pr.s);
  Vec3 grad_hbb = gradPi * gsh;

  Vec3 nb = e * n;
  Mat3 grad_nbb = e1 * n * n.transpose() - e * gradPi * L;

  out.theta = hval * nb;
  out.grad = grad_hbb * nb.transpose() + hval * grad_nbb;
  out.dt = h_->dt(pr.s) * nb;

  if (need_hess) {
    // Second derivatives by differencing the closed-form first derivatives.
    const double step = hess_step_;
    for (int j = 0; j < 3; ++j) {
      Vec3 ej = Vec3::Zero();
      ej[j] = 1.0;
      Mat3 gp = derivs_generic(x + step * ej, false).grad;
      Mat3 gm = derivs_generic(x - step * ej, false).grad;
      Mat3 dj = (gp - gm) / (2 * step);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i) out.hess[k](i, j) = dj(i, k);
    }
    for (int k = 0; k < 3; ++k)
      out.hess[k] = 0.5 * (out.hess[k] + out.hess[k].transpose()).eval();
  }
  return out;
}

ThetaDerivs ThetaField::derivs_sphere_exact(const Vec3& x) const {
  ThetaDerivs out;
  const double R = S_->params().R;
  const double rho0 = S_->rho0();
  const double nrm = x.norm();
  if (std::abs(nrm - R) >= rho0) return out;
  const double targ = (nrm - R) / rho0;
  const double e = Cutoff::eta(targ);
  const double e1 = Cutoff::eta_d(targ) / rho0;
  const double e2 = Cutoff::eta_dd(targ) / (rho0 * rho0);
  if (e == 0.0 && e1 == 0.0 && e2 == 0.0) return out;
  out.in_support = true;

  const Vec3 xh = x / nrm;
  const ScalarField& g = *h_->ambient();
  const Vec3 c = R * xh;  // projection point
  const double gval = g.value(0.0, c);
  const Vec3 gg = g.gradient(0.0, c);
  const Mat3 gh = g.hessian(0.0, c);

  // dc_ik = d_i c_k = R (delta - xh xh^T)/|x|
  const Mat3 Pm = Mat3::Identity() - xh * xh.transpose();
  const Mat3 dc = (R / nrm) * Pm;

  // hbb(x) = g(c(x))
  const Vec3 grad_h = dc * gg;
  // T_ijk = d_i d_j c_k
  auto T = [&](int i, int j, int k) {
    double v = -(Pm(i, k)) * xh[j] - Pm(i, j) * xh[k] - xh[i] * Pm(k, j);
    return (R / (nrm * nrm)) * v;
  };
  Mat3 hess_h;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double v = dc.row(i).dot((gh * dc.col(j)));
      for (int k = 0; k < 3; ++k) v += T(i, j, k) * gg[k];
      hess_h(i, j) = v;
    }
  }

  // nbb(x) = eta * xh ; (grad nbb)_ij = e1 xh_i xh_j + e Pm_ij / |x|
  const Vec3 nb = e * xh;
  const Mat3 grad_nb = e1 * xh * xh.transpose() + (e / nrm) * Pm;
  // d_i d_j nbb_k
  auto dxh = [&](int i, int j) { return Pm(i, j) / nrm; };
  auto hess_nb = [&](int i, int j, int k) {
    double v = e2 * xh[i] * xh[j] * xh[k];
    v += e1 * (dxh(i, j) * xh[k] + xh[j] * dxh(i, k));
    v += e1 * xh[i] * Pm(j, k) / nrm;
    v += e * (-Pm(j, k) * xh[i] / (nrm * nrm) -
              (dxh(i, j) * xh[k] + xh[j] * dxh(i, k)) / nrm);
    return v;
  };

  out.theta = gval * nb;
  out.grad = grad_h * nb.transpose() + gval * grad_nb;
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        out.hess[k](i, j) = hess_h(i, j) * nb[k] + grad_h[i] * grad_nb(j, k) +
                            grad_h[j] * grad_nb(i, k) +
                            gval * hess_nb(i, j, k);
      }
    }
  }
  if (h_->has_time_derivative()) {
    const ScalarField* gd = h_->ambient_dot();
    double hdot = gd ? gd->value(0.0, c) : 0.0;
    out.dt = hdot * nb;
  }
  return out;
}

Mat3 ThetaField::m0(const Vec2& s) const {
  Mat3 A = Mat3::Identity() - h_->value(s) * S_->weingarten(s);
  double det = A.determinant();
  if (std::abs(det) < 0.5) {
    std::ostringstream os;
    os << "pullback gate: |det(I - h L)| = " << std::abs(det) << " < 0.5";
    throw GateError(os.str());
  }
  return adjugate3(A) / det;
}

Mat3 ThetaField::grad_theta_inverse(const Vec3& x) const {
  Mat3 A = Mat3::Identity() + derivs(x).grad;
  double det = A.determinant();
  if (std::abs(det) < 0.2)
    throw GateError("pullback gate: grad Theta nearly singular");
  return A.inverse();
}

Mat3 ThetaField::m1(const Vec3& x) const {
  ThetaDerivs d = derivs(x);
  if (!d.in_support) return Mat3::Zero();
  Mat3 A = Mat3::Identity() + d.grad;
  double det = A.determinant();
  if (std::abs(det) < 0.2)
    throw GateError("pullback gate: grad Theta nearly singular");
  return A.inverse() * d.grad;
}

Vec3 ThetaField::m2(const Vec3& x) const {
  ThetaDerivs d = derivs(x, true);
  if (!d.in_support) return Vec3::Zero();
  Mat3 B = (Mat3::Identity() + d.grad).inverse();
  // dB[j] = d_j (grad Theta)^{-1} = -B (d_j grad theta) B,
  // (d_j grad theta)_{ik} = hess[k](i, j)
  std::array<Mat3, 3> dB;
  for (int j = 0; j < 3; ++j) {
    Mat3 dg;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) dg(i, k) = d.hess[k](i, j);
    dB[j] = -B * dg * B;
  }
  Vec3 m2v = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    double acc = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc += B(i, j) * dB[j](i, k);
    m2v[k] = acc;
  }
  return m2v;
}

Vec3 ThetaField::m3(const Vec3& x) const {
  ThetaDerivs d = derivs(x);
  if (!d.in_support) return Vec3::Zero();
  Mat3 A = Mat3::Identity() + d.grad;
  Mat3 M1 = A.inverse() * d.grad;
  // row vector: d_t theta (I - M1)
  return (Mat3::Identity() - M1).transpose() * d.dt;
}

Mat3 ThetaField::m4(const Vec3& x) const {
  ThetaDerivs d = derivs(x);
  if (!d.in_support) return Mat3::Zero();
  Mat3 B = (Mat3::Identity() + d.grad).inverse();
  return B.transpose() * B - Mat3::Identity();
}

Mat3 adjugate3(const Mat3& A) {
  Mat3 adj;
  adj(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  adj(0, 1) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
  adj(0, 2) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
  adj(1, 0) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
  adj(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
  adj(1, 2) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
  adj(2, 0) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
  adj(2, 1) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
  adj(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
  return adj;
}

// --- directional derivatives ---------------------------------------------------

Mat3 dm0(const ThetaField& th, const HeightField& phi, const Vec2& s) {
  Mat3 M0 = th.m0(s);
  Mat3 L = th.surface().weingarten(s);
  return phi.value(s) * M0 * L * M0;
}

Mat3 dm1(const ThetaField& th, const ThetaField& tphi, const Vec3& x) {
  // D M1 [h] phi = (I + grad theta)^{-1} grad(phi nbb) (I + grad theta)^{-1}
  Mat3 B = (Mat3::Identity() + th.derivs(x).grad).inverse();
  Mat3 gphi = tphi.derivs(x).grad;
  return B * gphi * B;
}

Vec3 dm2(const ThetaField& th, const ThetaField& tphi, const Vec3& x) {
  ThetaDerivs dh = th.derivs(x, true);
  ThetaDerivs dp = tphi.derivs(x, true);
  Mat3 B = (Mat3::Identity() + dh.grad).inverse();
  auto dgrad = [](const ThetaDerivs& d, int j) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) m(i, k) = d.hess[k](i, j);
    return m;
  };
  // E := D[(grad Theta)^{-1}] phi = -B grad(phi nbb) B
  Mat3 E = -B * dp.grad * B;
  // d_j B and d_j E by the product rule
  std::array<Mat3, 3> dB, dE;
  for (int j = 0; j < 3; ++j) {
    Mat3 dgh = dgrad(dh, j);
    Mat3 dgp = dgrad(dp, j);
    dB[j] = -B * dgh * B;
    dE[j] = -(dB[j] * dp.grad * B + B * dgp * B + B * dp.grad * dB[j]);
  }
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 3; ++k) {
    double acc = 0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        acc += E(i, j) * dB[j](i, k);   // (DF phi) G
        acc += B(i, j) * dE[j](i, k);   // F (DG phi)
      }
    }
    out[k] = acc;
  }
  return out;
}

Vec3 dm3(const ThetaField& th, const ThetaField& tphi, const Vec3& x) {
  ThetaDerivs dh = th.derivs(x);
  ThetaDerivs dp = tphi.derivs(x);
  Mat3 B = (Mat3::Identity() + dh.grad).inverse();
  Mat3 M1 = B * dh.grad;
  Mat3 DF = -B * dp.grad * B;  // D[(I - M1)] phi = D[(I+grad theta)^{-1}] phi
  Vec3 row1 = DF.transpose() * dh.dt;
  Vec3 row2 = (Mat3::Identity() - M1).transpose() * dp.dt;
  return row1 + row2;
}

Mat3 dm4(const ThetaField& th, const ThetaField& tphi, const Vec3& x) {
  Mat3 B = (Mat3::Identity() + th.derivs(x).grad).inverse();
  Mat3 gphi = tphi.derivs(x).grad;
  Mat3 C = B * gphi;
  return -B.transpose() * (C + C.transpose()) * B;
}

}  // namespace hanzawa
