#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hanzawa/grid.hpp"
#include "hanzawa/surface.hpp"

namespace hanzawa {

// Rectilinear sampled function: optional leading time axis plus 1..3 spatial
// axes, uniformly spaced including endpoints (periodic axes omit the
// duplicate endpoint). Storage is row-major in axis order.
struct Axis {
  double a = 0, b = 1;
  int n = 2;
  bool periodic = false;
  double dx() const { return periodic ? (b - a) / n : (b - a) / (n - 1); }
  double coord(int i) const { return a + i * dx(); }
  // trapezoid weight
  double weight(int i) const {
    if (periodic) return dx();
    return (i == 0 || i == n - 1) ? 0.5 * dx() : dx();
  }
};

class Sampled {
 public:
  Sampled() = default;
  Sampled(std::vector<Axis> axes, bool leading_time);

  static Sampled from_function(
      std::vector<Axis> axes, bool leading_time,
      const std::function<double(const std::vector<double>&)>& f);

  const std::vector<Axis>& axes() const { return axes_; }
  bool has_time() const { return has_time_; }
  int spatial_dims() const { return int(axes_.size()) - (has_time_ ? 1 : 0); }
  size_t size() const { return data_.size(); }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  size_t index(const std::vector<int>& idx) const;
  void coords_of(size_t flat, std::vector<int>& idx) const;

  // Central-difference derivative along one axis (2nd order, one-sided at
  // non-periodic edges).
  Sampled derivative(int axis) const;

  double sup_norm() const;
  // Trapezoid L^q over all axes.
  double lq_norm(double q) const;
  // L^q over the spatial axes only, at one time index.
  double lq_space(double q, int time_index) const;
  int time_count() const { return has_time_ ? axes_[0].n : 1; }

  // Restriction to [0, T'] (truncates the time axis; T' snaps to the grid).
  Sampled truncated_time(double t_max) const;

  Sampled scaled(double a) const;
  Sampled plus(const Sampled& other, double w = 1.0) const;

 private:
  std::vector<Axis> axes_;
  bool has_time_ = false;
  std::vector<double> data_;
  std::vector<size_t> strides_;
};

// --- norm catalogue -------------------------------------------------------------

struct NormSpec {
  enum class Family { Ck, Lq, Wsq, Composite } family = Family::Lq;
  int k = 0;          // Ck order
  double s = 0.5;     // Wsq order (fractional part in (0,1) after floor)
  double q = 2.0;
  std::string composite;  // one of W1..W6, S1..S5, C0..C4
  // parse "Ck:1", "Lq:2", "W:0.5:2", "S1:6", "C2", ...
  static NormSpec parse(const std::string& text);
};

// Gagliardo seminorm over the spatial axes (no time axis allowed):
// double trapezoid sum, identical-node pairs skipped.
double gagliardo_seminorm(const Sampled& f, double s, double q);

// Banach-valued Gagliardo seminorm over the time axis with L^q spatial fibers.
double gagliardo_time_seminorm(const Sampled& f, double s, double q);

// Surface version: chordal distance kernel, area-element weights.
double surface_gagliardo_seminorm(const ReferenceSurface& S,
                                  const GridScalar& f, double s, double q);

// C^k norm: sum over derivative orders j <= k of the max sup-norm at order j.
double ck_norm(const Sampled& f, int k);
// C^k([0,T]; C^m) norm with the same sum convention.
double ck_cm_norm(const Sampled& f, int k, int m);

// W^{s,q}: integer part plus Gagliardo seminorms of the top derivatives.
double sobolev_norm(const Sampled& f, double s, double q);
// W^{s,q}([0,T]; L^q) in time.
double sobolev_time_norm(const Sampled& f, double s, double q);

struct CompositeResult {
  double value = 0;
  std::vector<std::pair<std::string, double>> members;
  bool omitted_member = false;  // S3 reports only its integer-order member
  std::string note;
};

// Composite intersection-space norms, realized as the SUM of member norms.
CompositeResult composite_norm(const Sampled& f, const std::string& name,
                               double q);

double evaluate_norm(const Sampled& f, const NormSpec& spec);

// --- product estimate probe -------------------------------------------------------

struct ProductProbeResult {
  std::vector<double> ratios;
  double max_ratio = 0;
  double median_ratio = 0;
  int skipped = 0;
};

// Empirical constant for |fg| <= C |f|_{C1C cap CC1} |g|_{WsqLq cap LqWrq}
// over randomized smooth f and rough g on [0,1] x [0,1].
ProductProbeResult product_estimate_probe(double s, double r, double q,
                                          int trials, int grid_n,
                                          unsigned seed);

}  // namespace hanzawa
