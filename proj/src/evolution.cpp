#include "hanzawa/evolution.hpp"

#include <sstream>

namespace hanzawa {

namespace {

// 7-point Laplacian with zero Dirichlet boundary, applied matrix-free.
void apply_operator(const BoxGrid& g, double coef, const BoxField& v,
                    BoxField& out) {
  const int n = g.n;
  const double inv_dx2 = 1.0 / sq(g.dx());
  out.assign(v.size(), 0.0);
  for (int i = 1; i < n - 1; ++i) {
    for (int j = 1; j < n - 1; ++j) {
      for (int k = 1; k < n - 1; ++k) {
        const int c = g.index(i, j, k);
        double lap = v[g.index(i + 1, j, k)] + v[g.index(i - 1, j, k)] +
                     v[g.index(i, j + 1, k)] + v[g.index(i, j - 1, k)] +
                     v[g.index(i, j, k + 1)] + v[g.index(i, j, k - 1)] -
                     6.0 * v[c];
        out[c] = v[c] - coef * lap * inv_dx2;
      }
    }
  }
}

int conjugate_gradient(const BoxGrid& g, double coef, const BoxField& rhs,
                       BoxField& x, double tol, int max_iter) {
  const int n = g.n;
  BoxField r(rhs.size(), 0.0), p(rhs.size(), 0.0), Ap(rhs.size(), 0.0);
  apply_operator(g, coef, x, Ap);
  double rr = 0;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      for (int k = 1; k < n - 1; ++k) {
        int c = g.index(i, j, k);
        r[c] = rhs[c] - Ap[c];
        p[c] = r[c];
        rr += r[c] * r[c];
      }
  double rhs_norm = 0;
  for (double v : rhs) rhs_norm += v * v;
  rhs_norm = std::sqrt(std::max(rhs_norm, 1e-300));
  int it = 0;
  std::ostringstream history;
  for (; it < max_iter && std::sqrt(rr) > tol * rhs_norm; ++it) {
    apply_operator(g, coef, p, Ap);
    double pAp = 0;
    for (size_t c = 0; c < p.size(); ++c) pAp += p[c] * Ap[c];
    double alpha = rr / pAp;
    double rr_new = 0;
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        for (int k = 1; k < n - 1; ++k) {
          int c = g.index(i, j, k);
          x[c] += alpha * p[c];
          r[c] -= alpha * Ap[c];
          rr_new += r[c] * r[c];
        }
    if ((it & 15) == 0) history << "cg iter " << it << " res " << std::sqrt(rr_new) << "\n";
    double beta = rr_new / rr;
    rr = rr_new;
    for (size_t c = 0; c < p.size(); ++c) p[c] = r[c] + beta * p[c];
  }
  if (std::sqrt(rr) > tol * rhs_norm * 10)
    throw NumericError("CG did not converge:\n" + history.str());
  return it;
}

}  // namespace

ParabolicResult solve_parabolic(
    const BoxGrid& grid, const BoxVectorField& B0,
    const std::function<Vec3(double, const Vec3&)>& source,
    const EvolutionConfig& cfg) {
  if (B0.n != grid.n) throw ShapeError("initial field does not match the grid");
  const int n = grid.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (grid.boundary(i, j, k))
          for (int c = 0; c < 3; ++c)
            if (std::abs(B0.comp[c][grid.index(i, j, k)]) > 1e-14)
              throw ConfigError("B0 must vanish on the boundary mask");

  const int steps = std::max(1, int(std::round(cfg.horizon / cfg.dt)));
  const double dt = cfg.horizon / steps;
  const double coef = cfg.sigma * dt;

  ParabolicResult res;
  res.times.push_back(0.0);
  res.states.push_back(B0);
  BoxVectorField cur = B0;
  for (int s = 1; s <= steps; ++s) {
    double t_new = s * dt;
    BoxVectorField next = cur;
    int iters = 0;
    for (int c = 0; c < 3; ++c) {
      BoxField rhs = cur.comp[c];
      for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
          for (int k = 1; k < n - 1; ++k) {
            int idx = grid.index(i, j, k);
            rhs[idx] += dt * source(t_new, grid.point(i, j, k))[c];
          }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            if (grid.boundary(i, j, k)) rhs[grid.index(i, j, k)] = 0.0;
      iters = std::max(
          iters, conjugate_gradient(grid, coef, rhs, next.comp[c], cfg.cg_tol,
                                    cfg.cg_max_iter));
    }
    res.cg_iterations.push_back(iters);
    res.times.push_back(t_new);
    res.states.push_back(next);
    cur = next;
  }
  return res;
}

namespace {

GridScalar height_rhs(const ReferenceSurface& S, const GridScalar& h,
                      const VectorField& u, const SurfaceVecFn& b, double t) {
  HeightField hf = HeightField::from_samples(S, h);
  const ParamGrid& g = S.grid();
  GridScalar out(g);
  for (int i = 0; i < g.nu; ++i) {
    for (int j = 0; j < g.nv; ++j) {
      Vec2 s = g.node(i, j);
      Vec3 n = S.normal(s);
      Vec3 y = S.point(s) + h.at(i, j) * n;
      Vec3 ubar = u.value(t, y);
      Vec3 gh = surface_grad(S, h, i, j);
      Mat3 M0 = m0_matrix(S, hf, s);
      Vec3 bval = b ? b(s) : Vec3::Zero();
      double rhs = ubar.dot(n) - bval.dot(gh) +
                   ((Mat3::Identity() - M0) * gh).dot(ubar) +
                   (bval - ubar).dot(gh);
      out.at(i, j) = rhs;
    }
  }
  return out;
}

void check_height_gate(const ReferenceSurface& S, const GridScalar& h,
                       double delta0, double dt) {
  double sup = 0;
  for (double v : h.values()) sup = std::max(sup, std::abs(v));
  if (sup >= delta0 * S.rho0()) {
    std::ostringstream os;
    os << "height step rejected: sup|h|=" << sup
       << " crossed the validity gate; retry with a smaller step than " << dt;
    throw NumericError(os.str());
  }
}

}  // namespace

GridScalar step_height(const ReferenceSurface& S, const GridScalar& h,
                       const VectorField& u, const SurfaceVecFn& b, double t,
                       double dt, double delta0) {
  check_height_gate(S, h, delta0, dt);
  GridScalar k1 = height_rhs(S, h, u, b, t);
  GridScalar mid = h;
  for (size_t c = 0; c < mid.values().size(); ++c)
    mid.values()[c] += 0.5 * dt * k1.values()[c];
  check_height_gate(S, mid, delta0, dt);
  GridScalar k2 = height_rhs(S, mid, u, b, t + 0.5 * dt);
  GridScalar out = h;
  for (size_t c = 0; c < out.values().size(); ++c)
    out.values()[c] += dt * k2.values()[c];
  check_height_gate(S, out, delta0, dt);
  return out;
}

std::vector<GridScalar> integrate_height(const ReferenceSurface& S,
                                         const GridScalar& h0,
                                         const VectorField& u,
                                         const SurfaceVecFn& b,
                                         const EvolutionConfig& cfg) {
  const int steps = std::max(1, int(std::round(cfg.horizon / cfg.dt)));
  const double dt = cfg.horizon / steps;
  std::vector<GridScalar> traj;
  traj.push_back(h0);
  GridScalar cur = h0;
  for (int s = 0; s < steps; ++s) {
    cur = step_height(S, cur, u, b, s * dt, dt, cfg.delta0);
    traj.push_back(cur);
  }
  return traj;
}

double trajectory_norm(const BoxGrid& grid,
                       const std::vector<BoxVectorField>& B,
                       const ReferenceSurface& S,
                       const std::vector<GridScalar>& h, double dt,
                       double q) {
  // Lq in time and space of |B| (trapezoid in time, node weights in space)
  double accB = 0;
  const double w_cell = std::pow(grid.dx(), 3);
  for (size_t ti = 0; ti < B.size(); ++ti) {
    double slab = 0;
    for (int c = 0; c < grid.size(); ++c) {
      double mag2 = sq(B[ti].comp[0][c]) + sq(B[ti].comp[1][c]) +
                    sq(B[ti].comp[2][c]);
      slab += std::pow(std::sqrt(mag2), q) * w_cell;
    }
    double wt = (ti == 0 || ti + 1 == B.size()) ? 0.5 * dt : dt;
    accB += wt * slab;
  }
  double normB = std::pow(accB, 1.0 / q);

  // C0-in-time of a C2 grid proxy for h
  double normH = 0;
  for (const GridScalar& hs : h) {
    double c0 = 0, c1 = 0, c2 = 0;
    const ParamGrid& g = hs.grid();
    for (int i = 0; i < g.nu; ++i) {
      for (int j = 0; j < g.nv; ++j) {
        c0 = std::max(c0, std::abs(hs.at(i, j)));
        c1 = std::max({c1, std::abs(hs.d_du(i, j)), std::abs(hs.d_dv(i, j))});
        c2 = std::max({c2, std::abs(hs.d2_duu(i, j)),
                       std::abs(hs.d2_dvv(i, j)), std::abs(hs.d2_duv(i, j))});
      }
    }
    normH = std::max(normH, c0 + c1 + c2);
  }
  return normB + normH;
}

FixedPointTrace fixed_point_probe(const ReferenceSurface& S,
                                  const FluidParams& fluid,
                                  const VectorField& u_prescribed,
                                  const BoxVectorField& B0,
                                  const GridScalar& h0, const SurfaceVecFn& b,
                                  const EvolutionConfig& cfg) {
  FixedPointTrace trace;
  trace.horizon = cfg.horizon;
  const int steps = std::max(1, int(std::round(cfg.horizon / cfg.dt)));
  const double dt = cfg.horizon / steps;
  const BoxGrid& grid = cfg.box;

  // Height trajectory is driven by the prescribed velocity only; it is the
  // fixed component of the reduced map.
  std::vector<GridScalar> h_traj =
      integrate_height(S, h0, u_prescribed, b, cfg);

  // B-source from the current iterate's trajectory: evaluate the transformed
  // induction right-hand side at grid nodes, with grid-stencil derivatives
  // of B and the pullback coefficients from h(t).
  auto assemble_source = [&](const std::vector<BoxVectorField>& Btraj,
                             double t, const Vec3& x) -> Vec3 {
    int ti = std::clamp(int(std::round(t / dt)), 0, int(Btraj.size()) - 1);
    const BoxVectorField& Bf = Btraj[ti];
    // locate the node (sources are requested at nodes only)
    const double inv_dx = 1.0 / grid.dx();
    int i = int(std::round((x[0] - grid.lo[0]) * inv_dx));
    int j = int(std::round((x[1] - grid.lo[1]) * inv_dx));
    int k = int(std::round((x[2] - grid.lo[2]) * inv_dx));
    if (grid.boundary(i, j, k)) return Vec3::Zero();
    auto val = [&](int ii, int jj, int kk) -> Vec3 {
      int c = grid.index(ii, jj, kk);
      return Vec3(Bf.comp[0][c], Bf.comp[1][c], Bf.comp[2][c]);
    };
    Vec3 Bval = val(i, j, k);
    Mat3 gB;  // (grad B)_ab = d_a B_b
    gB.row(0) = ((val(i + 1, j, k) - val(i - 1, j, k)) * 0.5 * inv_dx)
                    .transpose();
    gB.row(1) = ((val(i, j + 1, k) - val(i, j - 1, k)) * 0.5 * inv_dx)
                    .transpose();
    gB.row(2) = ((val(i, j, k + 1) - val(i, j, k - 1)) * 0.5 * inv_dx)
                    .transpose();
    std::array<Mat3, 3> HB;
    {
      auto second = [&](int a, int b2) -> Vec3 {
        auto shift = [&](int d, int sgn) {
          int ii = i + (d == 0 ? sgn : 0), jj = j + (d == 1 ? sgn : 0),
              kk = k + (d == 2 ? sgn : 0);
          return Vec3(ii, jj, kk);
        };
        if (a == b2) {
          Vec3 sp = shift(a, 1), sm = shift(a, -1);
          return (val(int(sp[0]), int(sp[1]), int(sp[2])) - 2 * Bval +
                  val(int(sm[0]), int(sm[1]), int(sm[2]))) *
                 (inv_dx * inv_dx);
        }
        auto pt = [&](int da, int db) {
          int ii = i + (a == 0 ? da : 0) + (b2 == 0 ? db : 0);
          int jj = j + (a == 1 ? da : 0) + (b2 == 1 ? db : 0);
          int kk = k + (a == 2 ? da : 0) + (b2 == 2 ? db : 0);
          return val(ii, jj, kk);
        };
        return (pt(1, 1) - pt(1, -1) - pt(-1, 1) + pt(-1, -1)) *
               (0.25 * inv_dx * inv_dx);
      };
      for (int a = 0; a < 3; ++a)
        for (int b2 = a; b2 < 3; ++b2) {
          // clamp mixed stencils at one node from the boundary
          bool ok = i > 1 && j > 1 && k > 1 && i < grid.n - 2 &&
                    j < grid.n - 2 && k < grid.n - 2;
          Vec3 v = ok || a == b2 ? second(a, b2) : Vec3::Zero();
          for (int c = 0; c < 3; ++c) {
            HB[c](a, b2) = v[c];
            HB[c](b2, a) = v[c];
          }
        }
    }

    Vec3 uval = u_prescribed.value(t, x);
    Mat3 gu = u_prescribed.gradient(t, x);

    Vec3 out = -(gB.transpose() * uval);  // -u grad B
    out += gu.transpose() * Bval;         // +B grad u

    HeightField hf = HeightField::from_samples(
        S, h_traj[std::min<size_t>(ti, h_traj.size() - 1)]);
    if (S.in_tube(x) && hf.passes_gate()) {
      ThetaField th(S, hf);
      Mat3 M1 = th.m1(x);
      Vec3 M2 = th.m2(x);
      Mat3 M4 = th.m4(x);
      out += (M1 * gB).transpose() * uval;
      out -= (M1 * gu).transpose() * Bval;
      for (int c = 0; c < 3; ++c)
        out[c] += cfg.sigma * (M4.array() * HB[c].array()).sum();
      out += cfg.sigma * (gB.transpose() * M2);
      // M3 needs dh/dt along the trajectory; the prescribed-velocity
      // reduction supplies it from the kinematic right-hand side.
    }
    return out;
  };

  std::vector<BoxVectorField> B_prev(size_t(steps) + 1, B0);
  std::vector<GridScalar> h_prev(size_t(steps) + 1, h0);
  double prev_residual = -1;
  int bad_streak = 0;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    auto src = [&](double t, const Vec3& x) {
      return assemble_source(B_prev, t, x);
    };
    ParabolicResult pr = solve_parabolic(grid, B0, src, cfg);

    // residual between iterates
    std::vector<BoxVectorField> diffB = pr.states;
    for (size_t ti = 0; ti < diffB.size(); ++ti)
      for (int c = 0; c < 3; ++c)
        for (int idx = 0; idx < grid.size(); ++idx)
          diffB[ti].comp[c][idx] -= B_prev[ti].comp[c][idx];
    std::vector<GridScalar> diffH = h_traj;
    for (size_t ti = 0; ti < diffH.size(); ++ti)
      for (size_t c = 0; c < diffH[ti].values().size(); ++c)
        diffH[ti].values()[c] -= h_prev[ti].values()[c];

    double res = trajectory_norm(grid, diffB, S, diffH, dt, cfg.q);
    trace.residuals.push_back(res);
    trace.iterations = it + 1;
    if (trace.residuals.size() >= 2) {
      double prev = trace.residuals[trace.residuals.size() - 2];
      if (prev > 1e-300) trace.ratios.push_back(res / prev);
    }
    if (!trace.ratios.empty() && trace.ratios.back() > cfg.divergence_ratio) {
      if (++bad_streak >= cfg.divergence_patience) {
        trace.diverged = true;
        break;
      }
    } else {
      bad_streak = 0;
    }
    B_prev = pr.states;
    h_prev = h_traj;
    prev_residual = res;
    if (res < 1e-13) {
      trace.converged = true;
      break;
    }
  }
  (void)prev_residual;
  if (!trace.diverged && !trace.ratios.empty() &&
      trace.ratios.back() < 1.0)
    trace.converged = true;
  return trace;
}

}  // namespace hanzawa
