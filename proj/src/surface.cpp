#include "hanzawa/surface.hpp"

#include <Eigen/SVD>
#include <sstream>

namespace hanzawa {

namespace {

ParamGrid make_grid(SurfaceKind kind, int nu, int nv) {
  ParamGrid g;
  g.nu = nu;
  g.nv = nv;
  switch (kind) {
    case SurfaceKind::Sphere:
    case SurfaceKind::Ellipsoid:
      g.u0 = 0;
      g.u1 = kPi;  // colatitude
      g.v0 = 0;
      g.v1 = 2 * kPi;  // longitude
      g.wrap_u = WrapU::PoleShift;
      if (nv % 2 != 0)
        throw ConfigError("sphere-type grids need an even longitude count");
      break;
    case SurfaceKind::Torus:
      g.u0 = 0;
      g.u1 = 2 * kPi;  // tube angle
      g.v0 = 0;
      g.v1 = 2 * kPi;  // azimuth
      g.wrap_u = WrapU::Periodic;
      break;
  }
  return g;
}

double default_rho0(SurfaceKind kind, const ReferenceSurface::Params& p) {
  switch (kind) {
    case SurfaceKind::Sphere:
      return 0.9 * p.R;
    case SurfaceKind::Torus:
      return 0.9 * std::min(p.r, p.R - p.r);
    case SurfaceKind::Ellipsoid: {
      double lo = std::min({p.a, p.b, p.c});
      double hi = std::max({p.a, p.b, p.c});
      return 0.9 * lo * lo / hi;
    }
  }
  return 0;
}

double reach_estimate(SurfaceKind kind, const ReferenceSurface::Params& p) {
  switch (kind) {
    case SurfaceKind::Sphere:
      return p.R;
    case SurfaceKind::Torus:
      return std::min(p.r, p.R - p.r);
    case SurfaceKind::Ellipsoid: {
      double lo = std::min({p.a, p.b, p.c});
      double hi = std::max({p.a, p.b, p.c});
      return lo * lo / hi;  // smallest radius of curvature
    }
  }
  return 0;
}

}  // namespace

ReferenceSurface::ReferenceSurface(SurfaceKind kind, Params p, int nu, int nv,
                                   std::optional<double> rho0)
    : kind_(kind), params_(p), grid_(make_grid(kind, nu, nv)) {
  if (nu < 8 || nv < 8) throw ConfigError("grid must be at least 8x8");
  if (kind == SurfaceKind::Torus && p.R <= p.r)
    throw ConfigError("torus needs major radius > minor radius");
  reach_ = reach_estimate(kind, p);
  rho0_ = rho0.value_or(default_rho0(kind, p));
  if (!(rho0_ > 0) || rho0_ >= reach_)
    throw ConfigError("rho0 must lie in (0, reach)");
  validate();
}

Vec3 ReferenceSurface::point(const Vec2& s) const {
  if (!grid_.contains(s))
    throw DomainError("parameter outside the non-periodic domain");
  const double u = s[0], v = s[1];
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double R = params_.R;
      return Vec3(R * std::sin(u) * std::cos(v), R * std::sin(u) * std::sin(v),
                  R * std::cos(u));
    }
    case SurfaceKind::Ellipsoid:
      return Vec3(params_.a * std::sin(u) * std::cos(v),
                  params_.b * std::sin(u) * std::sin(v),
                  params_.c * std::cos(u));
    case SurfaceKind::Torus: {
      const double R = params_.R, r = params_.r;
      const double w = R + r * std::cos(u);
      return Vec3(w * std::cos(v), w * std::sin(v), r * std::sin(u));
    }
  }
  return Vec3::Zero();
}

Mat32 ReferenceSurface::jacobian(const Vec2& s) const {
  const double u = s[0], v = s[1];
  Mat32 J;
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double R = params_.R;
      J.col(0) = Vec3(R * std::cos(u) * std::cos(v),
                      R * std::cos(u) * std::sin(v), -R * std::sin(u));
      J.col(1) = Vec3(-R * std::sin(u) * std::sin(v),
                      R * std::sin(u) * std::cos(v), 0);
      break;
    }
    case SurfaceKind::Ellipsoid: {
      J.col(0) = Vec3(params_.a * std::cos(u) * std::cos(v),
                      params_.b * std::cos(u) * std::sin(v),
                      -params_.c * std::sin(u));
      J.col(1) = Vec3(-params_.a * std::sin(u) * std::sin(v),
                      params_.b * std::sin(u) * std::cos(v), 0);
      break;
    }
    case SurfaceKind::Torus: {
      const double R = params_.R, r = params_.r;
      const double w = R + r * std::cos(u);
      J.col(0) = Vec3(-r * std::sin(u) * std::cos(v),
                      -r * std::sin(u) * std::sin(v), r * std::cos(u));
      J.col(1) = Vec3(-w * std::sin(v), w * std::cos(v), 0);
      break;
    }
  }
  return J;
}

void ReferenceSurface::second_derivatives(const Vec2& s, Vec3& phi_uu,
                                          Vec3& phi_uv, Vec3& phi_vv) const {
  const double u = s[0], v = s[1];
  switch (kind_) {
    case SurfaceKind::Sphere:
    case SurfaceKind::Ellipsoid: {
      const double a = kind_ == SurfaceKind::Sphere ? params_.R : params_.a;
      const double b = kind_ == SurfaceKind::Sphere ? params_.R : params_.b;
      const double c = kind_ == SurfaceKind::Sphere ? params_.R : params_.c;
      phi_uu = Vec3(-a * std::sin(u) * std::cos(v),
                    -b * std::sin(u) * std::sin(v), -c * std::cos(u));
      phi_uv = Vec3(-a * std::cos(u) * std::sin(v),
                    b * std::cos(u) * std::cos(v), 0);
      phi_vv =
          Vec3(-a * std::sin(u) * std::cos(v), -b * std::sin(u) * std::sin(v),
               0);
      break;
    }
    case SurfaceKind::Torus: {
      const double R = params_.R, r = params_.r;
      const double w = R + r * std::cos(u);
      phi_uu = Vec3(-r * std::cos(u) * std::cos(v),
                    -r * std::cos(u) * std::sin(v), -r * std::sin(u));
      phi_uv =
          Vec3(r * std::sin(u) * std::sin(v), -r * std::sin(u) * std::cos(v),
               0);
      phi_vv = Vec3(-w * std::cos(v), -w * std::sin(v), 0);
      break;
    }
  }
}

Vec3 ReferenceSurface::normal(const Vec2& s) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return point(s) / params_.R;
    case SurfaceKind::Ellipsoid: {
      Vec3 x = point(s);
      Vec3 n(x[0] / sq(params_.a), x[1] / sq(params_.b), x[2] / sq(params_.c));
      return n.normalized();
    }
    case SurfaceKind::Torus: {
      const double u = s[0], v = s[1];
      return Vec3(std::cos(u) * std::cos(v), std::cos(u) * std::sin(v),
                  std::sin(u));
    }
  }
  return Vec3::Zero();
}

TangentFrame ReferenceSurface::frame(const Vec2& s) const {
  TangentFrame f;
  Mat32 J = jacobian(s);
  f.tau1 = J.col(0);
  f.tau2 = J.col(1);
  f.metric = J.transpose() * J;
  double det = f.metric.determinant();
  if (!(det > 1e-24)) throw GeometryError("degenerate tangent frame");
  Mat2 ginv = f.metric.inverse();
  Mat32 dual = J * ginv;
  f.dual1 = dual.col(0);
  f.dual2 = dual.col(1);
  f.n = normal(s);
  return f;
}

Mat3 ReferenceSurface::weingarten(const Vec2& s) const {
  TangentFrame f = frame(s);
  Vec3 phi_uu, phi_uv, phi_vv;
  second_derivatives(s, phi_uu, phi_uv, phi_vv);
  Mat2 II;
  II(0, 0) = f.n.dot(phi_uu);
  II(0, 1) = II(1, 0) = f.n.dot(phi_uv);
  II(1, 1) = f.n.dot(phi_vv);
  const Vec3 dual[2] = {f.dual1, f.dual2};
  Mat3 L = Mat3::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      L += II(i, j) * dual[i] * dual[j].transpose();
  return L;
}

double ReferenceSurface::mean_curvature(const Vec2& s) const {
  return weingarten(s).trace();
}

Mat3 ReferenceSurface::projector(const Vec2& s) const {
  Vec3 n = normal(s);
  return Mat3::Identity() - n * n.transpose();
}

bool ReferenceSurface::in_tube(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return std::abs(x.norm() - params_.R) < rho0_;
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x[0], x[1]);
      const double dd = std::hypot(rho - params_.R, x[2]) - params_.r;
      return std::abs(dd) < rho0_;
    }
    case SurfaceKind::Ellipsoid: {
      // Cheap reject via the scaled radius, exact answer via projection.
      Vec3 q(x[0] / params_.a, x[1] / params_.b, x[2] / params_.c);
      double lo = std::min({params_.a, params_.b, params_.c});
      if (std::abs(q.norm() - 1.0) * lo > 2.0 * rho0_) return false;
      try {
        return std::abs(project(x).d) < rho0_;
      } catch (const Error&) {
        return false;
      }
    }
  }
  return false;
}

double ReferenceSurface::implicit_side(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::Sphere:
      return x.norm() - params_.R;
    case SurfaceKind::Torus: {
      const double rho = std::hypot(x[0], x[1]);
      return std::hypot(rho - params_.R, x[2]) - params_.r;
    }
    case SurfaceKind::Ellipsoid:
      return sq(x[0] / params_.a) + sq(x[1] / params_.b) +
             sq(x[2] / params_.c) - 1.0;
  }
  return 0;
}

ProjectionResult ReferenceSurface::project(const Vec3& x) const {
  switch (kind_) {
    case SurfaceKind::Sphere: {
      const double R = params_.R;
      const double nrm = x.norm();
      if (std::abs(nrm - R) >= rho0_)
        throw ProjectionError("point outside the tubular neighborhood");
      ProjectionResult res;
      res.d = nrm - R;
      res.s = Vec2(std::acos(std::clamp(x[2] / nrm, -1.0, 1.0)),
                   std::atan2(x[1], x[0]));
      if (res.s[1] < 0) res.s[1] += 2 * kPi;
      return res;
    }
    case SurfaceKind::Torus: {
      const double R = params_.R, r = params_.r;
      const double rho = std::hypot(x[0], x[1]);
      const double d = std::hypot(rho - R, x[2]) - r;
      if (std::abs(d) >= rho0_)
        throw ProjectionError("point outside the tubular neighborhood");
      ProjectionResult res;
      res.d = d;
      double v = std::atan2(x[1], x[0]);
      double u = std::atan2(x[2], rho - R);
      if (v < 0) v += 2 * kPi;
      if (u < 0) u += 2 * kPi;
      res.s = Vec2(u, v);
      return res;
    }
    case SurfaceKind::Ellipsoid: {
      // Radial scaling onto the surface gives the Newton seed.
      Vec3 q(x[0] / params_.a, x[1] / params_.b, x[2] / params_.c);
      double t = q.norm();
      if (t < 1e-12) throw ProjectionError("point at the center");
      Vec3 p0 = x / t;
      Vec2 s0(std::acos(std::clamp(p0[2] / params_.c, -1.0, 1.0)),
              std::atan2(p0[1] / params_.b, p0[0] / params_.a));
      if (s0[1] < 0) s0[1] += 2 * kPi;
      ProjectionResult res = project_newton(x, s0);
      if (std::abs(res.d) >= rho0_)
        throw ProjectionError("point outside the tubular neighborhood");
      return res;
    }
  }
  throw ProjectionError("unreachable");
}

ProjectionResult ReferenceSurface::project_newton(const Vec3& x,
                                                  Vec2 s0) const {
  // Solve (x - Phi(s)) . tau_i(s) = 0 by damped Newton.
  const int max_iter = 50;
  const double tol = 1e-12;
  Vec2 s = s0;
  auto residual = [&](const Vec2& sv) -> Vec2 {
    Mat32 J = jacobian(sv);
    Vec3 diff = x - point(sv);
    return Vec2(diff.dot(J.col(0)), diff.dot(J.col(1)));
  };
  Vec2 g = residual(s);
  int it = 0;
  std::ostringstream trace;
  for (; it < max_iter; ++it) {
    if (g.norm() < tol) break;
    Mat32 J = jacobian(s);
    Vec3 phi_uu, phi_uv, phi_vv;
    second_derivatives(s, phi_uu, phi_uv, phi_vv);
    Vec3 diff = x - point(s);
    Mat2 Jac;
    Jac(0, 0) = -J.col(0).dot(J.col(0)) + diff.dot(phi_uu);
    Jac(0, 1) = -J.col(0).dot(J.col(1)) + diff.dot(phi_uv);
    Jac(1, 0) = Jac(0, 1);
    Jac(1, 1) = -J.col(1).dot(J.col(1)) + diff.dot(phi_vv);
    Vec2 step = Jac.fullPivLu().solve(-g);
    double lambda = 1.0;
    Vec2 s_next = s + step;
    Vec2 g_next = residual(s_next);
    int halvings = 0;
    while (g_next.norm() > g.norm() && halvings < 30) {
      lambda *= 0.5;
      s_next = s + lambda * step;
      g_next = residual(s_next);
      ++halvings;
    }
    trace << "iter " << it << " |g|=" << g.norm() << "\n";
    s = s_next;
    g = g_next;
  }
  if (g.norm() >= tol * 10 && g.norm() >= 1e-10)
    throw NumericError("projection Newton did not converge:\n" + trace.str());
  // Clamp longitude into [0, 2pi) and colatitude into (0, pi).
  s[1] = std::fmod(s[1], 2 * kPi);
  if (s[1] < 0) s[1] += 2 * kPi;
  ProjectionResult res;
  res.s = s;
  res.iterations = it;
  Vec3 diff = x - point(s);
  res.d = diff.dot(normal(s)) >= 0 ? diff.norm() : -diff.norm();
  return res;
}

void ReferenceSurface::validate() const {
  const double tol_geom = 1e-8;
  for (int i = 0; i < grid_.nu; ++i) {
    for (int j = 0; j < grid_.nv; ++j) {
      Vec2 s = grid_.node(i, j);
      Mat32 J = jacobian(s);
      Eigen::JacobiSVD<Mat32> svd(J);
      double smin = svd.singularValues()(1);
      double smax = svd.singularValues()(0);
      if (!(smin > 1e-10 * smax))
        throw GeometryError("parameterization is not an immersion at a node");
      Vec3 n = normal(s);
      if (std::abs(n.norm() - 1.0) > 1e-12)
        throw GeometryError("normal is not unit");
      Mat3 L = weingarten(s);
      if ((L * n).norm() > tol_geom)
        throw GeometryError("Weingarten tensor does not annihilate the normal");
      Mat3 P = Mat3::Identity() - n * n.transpose();
      Mat3 T = P * L * P;
      if ((T - T.transpose()).norm() > tol_geom)
        throw GeometryError("Weingarten tensor is not tangentially symmetric");
    }
  }
  if (kind_ == SurfaceKind::Ellipsoid) {
    // Injectivity sampling of F(x, r) = x + r n(x) on the configured tube.
    for (int i = 0; i < grid_.nu; i += std::max(1, grid_.nu / 8)) {
      for (int j = 0; j < grid_.nv; j += std::max(1, grid_.nv / 8)) {
        Vec2 s = grid_.node(i, j);
        for (double f : {-0.95, -0.5, 0.5, 0.95}) {
          double r = f * rho0_;
          Vec3 x = point(s) + r * normal(s);
          ProjectionResult pr = project_newton(x, s);
          if ((point(pr.s) - point(s)).norm() > 1e-6 ||
              std::abs(pr.d - r) > 1e-6)
            throw GeometryError(
                "rho0 fails the injectivity sampling check on the ellipsoid");
        }
      }
    }
  }
}

std::string ReferenceSurface::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SurfaceKind::Sphere:
      os << "sphere R=" << params_.R;
      break;
    case SurfaceKind::Ellipsoid:
      os << "ellipsoid (" << params_.a << "," << params_.b << "," << params_.c
         << ")";
      break;
    case SurfaceKind::Torus:
      os << "torus (R=" << params_.R << ", r=" << params_.r << ")";
      break;
  }
  os << " grid " << grid_.nu << "x" << grid_.nv << " rho0=" << rho0_;
  return os.str();
}

// ---------------------------------------------------------------------------

double GridScalar::interpolate(const Vec2& s) const {
  const ParamGrid& g = grid_;
  auto cubic = [](double fm1, double f0, double f1, double f2, double t) {
    // Catmull-Rom
    return f0 + 0.5 * t *
                    (f1 - fm1 +
                     t * (2 * fm1 - 5 * f0 + 4 * f1 - f2 +
                          t * (3 * (f0 - f1) + f2 - fm1)));
  };
  double fu = (s[0] - g.u0) / g.du() - 0.5;
  double fv = (s[1] - g.v0) / g.dv() - 0.5;
  int i0 = static_cast<int>(std::floor(fu));
  int j0 = static_cast<int>(std::floor(fv));
  double tu = fu - i0, tv = fv - j0;
  double rows[4];
  for (int di = -1; di <= 2; ++di) {
    double c[4];
    for (int dj = -1; dj <= 2; ++dj) c[dj + 1] = wrapped(i0 + di, j0 + dj);
    rows[di + 1] = cubic(c[0], c[1], c[2], c[3], tv);
  }
  return cubic(rows[0], rows[1], rows[2], rows[3], tu);
}

}  // namespace hanzawa
