#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace hanzawa {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

// Error taxonomy. Every failure mode named in the module contracts maps to
// one of these so callers (and the CLI) can distinguish config mistakes from
// numerical breakdown.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
struct DomainError : Error {
  using Error::Error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct ProjectionError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct GateError : Error {
  using Error::Error;
};
struct ShapeError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct ParamError : Error {
  using Error::Error;
};
struct ResolutionError : Error {
  using Error::Error;
};

constexpr double kPi = 3.14159265358979323846;

// 4th-order central difference of a 1-D callable. Used for parameter-space
// derivatives of smooth closed-form functions; step defaults balance
// truncation against rounding for ~1e-11 absolute accuracy.
template <typename F>
double fd_central(F&& f, double x, double step = 1e-3) {
  return (-f(x + 2 * step) + 8 * f(x + step) - 8 * f(x - step) +
          f(x - 2 * step)) /
         (12 * step);
}

template <typename F>
double fd_central2(F&& f, double x, double step = 3e-3) {
  return (-f(x + 2 * step) + 16 * f(x + step) - 30 * f(x) +
          16 * f(x - step) - f(x - 2 * step)) /
         (12 * step * step);
}

inline double sq(double x) { return x * x; }

}  // namespace hanzawa
