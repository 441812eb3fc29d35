#include "hanzawa/surface_fields.hpp"

namespace hanzawa {

Vec2 param_gradient(const SurfaceFn& f, const Vec2& s, double step) {
  Vec2 g;
  g[0] = fd_central([&](double a) { return f(Vec2(a, s[1])); }, s[0], step);
  g[1] = fd_central([&](double a) { return f(Vec2(s[0], a)); }, s[1], step);
  return g;
}

Vec3 surface_grad(const ReferenceSurface& S, const SurfaceFn& f, const Vec2& s,
                  double step) {
  TangentFrame fr = S.frame(s);
  Vec2 g = param_gradient(f, s, step);
  return g[0] * fr.dual1 + g[1] * fr.dual2;
}

Mat3 surface_grad_vec(const ReferenceSurface& S, const SurfaceVecFn& F,
                      const Vec2& s, double step) {
  TangentFrame fr = S.frame(s);
  Vec3 du, dv;
  for (int k = 0; k < 3; ++k) {
    du[k] = fd_central([&](double a) { return F(Vec2(a, s[1]))[k]; }, s[0],
                       step);
    dv[k] = fd_central([&](double a) { return F(Vec2(s[0], a))[k]; }, s[1],
                       step);
  }
  // (grad_S F)_ij = (grad_S F_j)_i = sum_a d_a F_j (tau^a)_i
  Mat3 out = Mat3::Zero();
  out += fr.dual1 * du.transpose();
  out += fr.dual2 * dv.transpose();
  return out;
}

double surface_div(const ReferenceSurface& S, const SurfaceVecFn& F,
                   const Vec2& s, double step) {
  return surface_grad_vec(S, F, s, step).trace();
}

namespace {

// sqrt(det g) * g^{-1} as a closed-form function of the parameters.
Mat2 metric_weight(const ReferenceSurface& S, const Vec2& s, double& sqrtg) {
  Mat32 J = S.jacobian(s);
  Mat2 g = J.transpose() * J;
  double det = g.determinant();
  sqrtg = std::sqrt(det);
  Mat2 inv;
  inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  inv /= det;
  return sqrtg * inv;
}

}  // namespace

double laplace_beltrami(const ReferenceSurface& S, const SurfaceFn& f,
                        const Vec2& s, double step) {
  // (1/sqrt g) sum_ij [ d_i A_ij d_j f + A_ij d_ij f ],  A = sqrt(g) g^{-1}.
  double sqrtg;
  Mat2 A = metric_weight(S, s, sqrtg);
  Mat2 dA_du, dA_dv;
  {
    double tmp;
    auto Au = [&](double a) { return metric_weight(S, Vec2(a, s[1]), tmp); };
    auto Av = [&](double a) { return metric_weight(S, Vec2(s[0], a), tmp); };
    dA_du = (-Au(s[0] + 2 * step) + 8 * Au(s[0] + step) - 8 * Au(s[0] - step) +
             Au(s[0] - 2 * step)) /
            (12 * step);
    dA_dv = (-Av(s[1] + 2 * step) + 8 * Av(s[1] + step) - 8 * Av(s[1] - step) +
             Av(s[1] - 2 * step)) /
            (12 * step);
  }
  Vec2 df = param_gradient(f, s, step);
  Mat2 d2f;
  d2f(0, 0) = fd_central2([&](double a) { return f(Vec2(a, s[1])); }, s[0],
                          step * 3);
  d2f(1, 1) = fd_central2([&](double a) { return f(Vec2(s[0], a)); }, s[1],
                          step * 3);
  d2f(0, 1) = d2f(1, 0) = fd_central(
      [&](double a) {
        return fd_central([&](double b) { return f(Vec2(a, b)); }, s[1], step);
      },
      s[0], step);
  double acc = 0;
  for (int j = 0; j < 2; ++j) {
    acc += dA_du(0, j) * df[j] + dA_dv(1, j) * df[j];
    acc += A(0, j) * d2f(0, j) + A(1, j) * d2f(1, j);
  }
  return acc / sqrtg;
}

Vec3 surface_grad(const ReferenceSurface& S, const GridScalar& f, int i,
                  int j) {
  if (f.grid().size() != S.grid().size())
    throw ShapeError("grid shape does not match the surface grid");
  TangentFrame fr = S.frame(S.grid().node(i, j));
  return f.d_du(i, j) * fr.dual1 + f.d_dv(i, j) * fr.dual2;
}

double laplace_beltrami(const ReferenceSurface& S, const GridScalar& f, int i,
                        int j) {
  if (f.grid().size() != S.grid().size())
    throw ShapeError("grid shape does not match the surface grid");
  Vec2 s = S.grid().node(i, j);
  double sqrtg;
  Mat2 A = metric_weight(S, s, sqrtg);
  const double step = 1e-3;
  double tmp;
  auto Au = [&](double a) { return metric_weight(S, Vec2(a, s[1]), tmp); };
  auto Av = [&](double a) { return metric_weight(S, Vec2(s[0], a), tmp); };
  Mat2 dA_du = (-Au(s[0] + 2 * step) + 8 * Au(s[0] + step) -
                8 * Au(s[0] - step) + Au(s[0] - 2 * step)) /
               (12 * step);
  Mat2 dA_dv = (-Av(s[1] + 2 * step) + 8 * Av(s[1] + step) -
                8 * Av(s[1] - step) + Av(s[1] - 2 * step)) /
               (12 * step);
  Vec2 df(f.d_du(i, j), f.d_dv(i, j));
  Mat2 d2f;
  d2f(0, 0) = f.d2_duu(i, j);
  d2f(1, 1) = f.d2_dvv(i, j);
  d2f(0, 1) = d2f(1, 0) = f.d2_duv(i, j);
  double acc = 0;
  for (int jj = 0; jj < 2; ++jj) {
    acc += dA_du(0, jj) * df[jj] + dA_dv(1, jj) * df[jj];
    acc += A(0, jj) * d2f(0, jj) + A(1, jj) * d2f(1, jj);
  }
  return acc / sqrtg;
}

// --- FdPatch ----------------------------------------------------------------

FdPatch::FdPatch(const ParamGrid& grid, std::function<Vec3(const Vec2&)> psi,
                 std::function<Vec3(const Vec2&)> orientation_hint)
    : grid_(grid) {
  pts_.resize(grid.size());
  for (int i = 0; i < grid.nu; ++i)
    for (int j = 0; j < grid.nv; ++j)
      pts_[grid.index(i, j)] = psi(grid.node(i, j));
  hint_ = std::move(orientation_hint);
}

Vec3 FdPatch::point(int i, int j) const { return sample(i, j); }

Vec3 FdPatch::d_du(int i, int j) const {
  return (-wrapped(i + 2, j) + 8 * wrapped(i + 1, j) - 8 * wrapped(i - 1, j) +
          wrapped(i - 2, j)) /
         (12 * grid_.du());
}
Vec3 FdPatch::d_dv(int i, int j) const {
  return (-wrapped(i, j + 2) + 8 * wrapped(i, j + 1) - 8 * wrapped(i, j - 1) +
          wrapped(i, j - 2)) /
         (12 * grid_.dv());
}
Vec3 FdPatch::d2_duu(int i, int j) const {
  return (-wrapped(i + 2, j) + 16 * wrapped(i + 1, j) - 30 * wrapped(i, j) +
          16 * wrapped(i - 1, j) - wrapped(i - 2, j)) /
         (12 * sq(grid_.du()));
}
Vec3 FdPatch::d2_dvv(int i, int j) const {
  return (-wrapped(i, j + 2) + 16 * wrapped(i, j + 1) - 30 * wrapped(i, j) +
          16 * wrapped(i, j - 1) - wrapped(i, j - 2)) /
         (12 * sq(grid_.dv()));
}
Vec3 FdPatch::d2_duv(int i, int j) const {
  auto dv_at = [&](int ii) -> Vec3 {
    return (-wrapped(ii, j + 2) + 8 * wrapped(ii, j + 1) -
            8 * wrapped(ii, j - 1) + wrapped(ii, j - 2)) /
           (12 * grid_.dv());
  };
  return (-dv_at(i + 2) + 8 * dv_at(i + 1) - 8 * dv_at(i - 1) + dv_at(i - 2)) /
         (12 * grid_.du());
}

Vec3 FdPatch::normal(int i, int j) const {
  Vec3 n = d_du(i, j).cross(d_dv(i, j));
  double nn = n.norm();
  if (nn < 1e-14) throw GeometryError("degenerate FD frame");
  n /= nn;
  if (hint_) {
    Vec3 hintv = hint_(grid_.node(i, j));
    if (n.dot(hintv) < 0) n = -n;
  }
  return n;
}

double FdPatch::mean_curvature(int i, int j) const {
  Vec3 tu = d_du(i, j), tv = d_dv(i, j);
  Mat2 g;
  g << tu.dot(tu), tu.dot(tv), tu.dot(tv), tv.dot(tv);
  Vec3 n = normal(i, j);
  Mat2 II;
  II(0, 0) = n.dot(d2_duu(i, j));
  II(0, 1) = II(1, 0) = n.dot(d2_duv(i, j));
  II(1, 1) = n.dot(d2_dvv(i, j));
  return (g.inverse() * II).trace();
}

}  // namespace hanzawa
