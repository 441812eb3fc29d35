#pragma once

#include "hanzawa/norms.hpp"
#include "hanzawa/operators.hpp"

namespace hanzawa {

// Axis-aligned box with n^3 nodes (boundary included) and a homogeneous
// Dirichlet mask on the outermost layer.
struct BoxGrid {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
  int n = 16;

  BoxGrid() = default;
  BoxGrid(const Vec3& l, const Vec3& h, int nn) : lo(l), hi(h), n(nn) {
    if (n < 8) throw ConfigError("box grid needs n >= 8");
    if (!((hi - lo).minCoeff() > 0)) throw ConfigError("degenerate box");
  }
  double dx() const { return (hi[0] - lo[0]) / (n - 1); }
  int index(int i, int j, int k) const { return (i * n + j) * n + k; }
  Vec3 point(int i, int j, int k) const {
    return lo + Vec3(i * dx(), j * dx(), k * dx());
  }
  bool boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 ||
           k == n - 1;
  }
  int size() const { return n * n * n; }
};

// One Cartesian component per entry; field value at node index.
using BoxField = std::vector<double>;
struct BoxVectorField {
  std::array<BoxField, 3> comp;
  int n = 0;
};

struct EvolutionConfig {
  BoxGrid box;
  double dt = 1e-2;
  double horizon = 0.1;  // T
  double sigma = 1.0;
  double cg_tol = 1e-10;
  int cg_max_iter = 5000;
  double q = 2.0;  // contraction-norm exponent
  int max_iterations = 8;
  double divergence_ratio = 2.0;
  int divergence_patience = 3;
  // smallness bookkeeping reported with traces
  double delta0 = 0.3, bound_M = 1.0, r0 = 1.0, T0 = 1.0, eps0 = 1e-2,
         eps1 = 1e-2;
};

struct ParabolicResult {
  std::vector<double> times;
  std::vector<BoxVectorField> states;
  std::vector<int> cg_iterations;
};

// Backward Euler in time, 7-point Laplacian in space, matrix-free CG per
// step (componentwise). B0 must vanish on the boundary mask.
ParabolicResult solve_parabolic(
    const BoxGrid& grid, const BoxVectorField& B0,
    const std::function<Vec3(double, const Vec3&)>& source,
    const EvolutionConfig& cfg);

// One RK2 (midpoint) step of the kinematic height equation with ambient
// velocity u; the right-hand side is evaluated on the surface grid.
GridScalar step_height(const ReferenceSurface& S, const GridScalar& h,
                       const VectorField& u, const SurfaceVecFn& b, double t,
                       double dt, double delta0);

// Full trajectory over [0, T].
std::vector<GridScalar> integrate_height(const ReferenceSurface& S,
                                         const GridScalar& h0,
                                         const VectorField& u,
                                         const SurfaceVecFn& b,
                                         const EvolutionConfig& cfg);

struct FixedPointTrace {
  std::vector<double> residuals;  // ||z^{k+1} - z^k|| per iteration
  std::vector<double> ratios;     // from iteration 2 on
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  double horizon = 0;
};

// Empirical contraction probe for the reduced (B, h) subsystem with
// prescribed analytic velocity and pressure.
FixedPointTrace fixed_point_probe(const ReferenceSurface& S,
                                  const FluidParams& fluid,
                                  const VectorField& u_prescribed,
                                  const BoxVectorField& B0,
                                  const GridScalar& h0, const SurfaceVecFn& b,
                                  const EvolutionConfig& cfg);

// Contraction norm: Lq-in-time-and-space of B plus a C0([0,T];C2) grid proxy
// for h.
double trajectory_norm(const BoxGrid& grid,
                       const std::vector<BoxVectorField>& B,
                       const ReferenceSurface& S,
                       const std::vector<GridScalar>& h, double dt, double q);

}  // namespace hanzawa
