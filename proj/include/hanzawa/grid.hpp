#pragma once

#include <vector>

#include "hanzawa/core.hpp"

namespace hanzawa {

// Wrap rule for the first (u) parameter direction.
//  - Periodic: index wraps mod nu (torus tube angle).
//  - PoleShift: colatitude-type direction on sphere/ellipsoid grids.
//    A ghost node past the pole maps to the antipodal longitude:
//    (-theta, phi) ~ (theta, phi + pi). Exact for any function on the
//    surface, so full-width centered stencils apply everywhere.
enum class WrapU { Periodic, PoleShift };

// Cell-centered structured parameter grid. u_i = u0 + (i+1/2) du,
// v_j = v0 + (j+1/2) dv. The v direction is always periodic.
struct ParamGrid {
  int nu = 0, nv = 0;
  double u0 = 0, u1 = 0, v0 = 0, v1 = 0;
  WrapU wrap_u = WrapU::Periodic;

  double du() const { return (u1 - u0) / nu; }
  double dv() const { return (v1 - v0) / nv; }
  double u(int i) const { return u0 + (i + 0.5) * du(); }
  double v(int j) const { return v0 + (j + 0.5) * dv(); }
  Vec2 node(int i, int j) const { return Vec2(u(i), v(j)); }
  int size() const { return nu * nv; }
  int index(int i, int j) const { return i * nv + j; }

  // Maps a possibly out-of-range (i, j) to the stored node it aliases.
  std::pair<int, int> wrap(int i, int j) const {
    int jj = ((j % nv) + nv) % nv;
    int ii = i;
    if (wrap_u == WrapU::Periodic) {
      ii = ((i % nu) + nu) % nu;
    } else {
      // Reflect across either pole, shifting longitude by half a period.
      while (ii < 0 || ii >= nu) {
        if (ii < 0)
          ii = -1 - ii;
        else
          ii = 2 * nu - 1 - ii;
        jj = (jj + nv / 2) % nv;
      }
    }
    return {ii, jj};
  }

  bool contains(const Vec2& s) const {
    if (wrap_u == WrapU::PoleShift && (s[0] < u0 || s[0] > u1)) return false;
    return true;
  }
};

// Scalar samples on a ParamGrid with 4th-order stencil differentiation.
class GridScalar {
 public:
  GridScalar() = default;
  GridScalar(const ParamGrid& g, double fill = 0.0)
      : grid_(g), data_(g.size(), fill) {}

  template <typename F>
  static GridScalar sample(const ParamGrid& g, F&& f) {
    GridScalar out(g);
    for (int i = 0; i < g.nu; ++i)
      for (int j = 0; j < g.nv; ++j) out.at(i, j) = f(g.node(i, j));
    return out;
  }

  const ParamGrid& grid() const { return grid_; }
  double& at(int i, int j) { return data_[grid_.index(i, j)]; }
  double at(int i, int j) const { return data_[grid_.index(i, j)]; }
  double wrapped(int i, int j) const {
    auto [ii, jj] = grid_.wrap(i, j);
    return data_[grid_.index(ii, jj)];
  }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double d_du(int i, int j) const {
    return (-wrapped(i + 2, j) + 8 * wrapped(i + 1, j) - 8 * wrapped(i - 1, j) +
            wrapped(i - 2, j)) /
           (12 * grid_.du());
  }
  double d_dv(int i, int j) const {
    return (-wrapped(i, j + 2) + 8 * wrapped(i, j + 1) - 8 * wrapped(i, j - 1) +
            wrapped(i, j - 2)) /
           (12 * grid_.dv());
  }
  double d2_duu(int i, int j) const {
    return (-wrapped(i + 2, j) + 16 * wrapped(i + 1, j) - 30 * wrapped(i, j) +
            16 * wrapped(i - 1, j) - wrapped(i - 2, j)) /
           (12 * sq(grid_.du()));
  }
  double d2_dvv(int i, int j) const {
    return (-wrapped(i, j + 2) + 16 * wrapped(i, j + 1) - 30 * wrapped(i, j) +
            16 * wrapped(i, j - 1) - wrapped(i, j - 2)) /
           (12 * sq(grid_.dv()));
  }
  double d2_duv(int i, int j) const {
    auto dv_at = [&](int ii) {
      return (-wrapped(ii, j + 2) + 8 * wrapped(ii, j + 1) -
              8 * wrapped(ii, j - 1) + wrapped(ii, j - 2)) /
             (12 * grid_.dv());
    };
    return (-dv_at(i + 2) + 8 * dv_at(i + 1) - 8 * dv_at(i - 1) +
            dv_at(i - 2)) /
           (12 * grid_.du());
  }

  // Bicubic (Catmull-Rom) interpolation honoring the wrap rules. Used when a
  // grid-backed field must be evaluated off its nodes.
  double interpolate(const Vec2& s) const;

 private:
  ParamGrid grid_;
  std::vector<double> data_;
};

}  // namespace hanzawa
