#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pam2d {

using Index = Eigen::Index;
using Point = Eigen::Vector2d;
using PointSet = Eigen::Matrix2Xd;

/// A parameter outside the documented domain of an operation.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A resolution or stability guard was violated (step size, grid spacing, ...).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedOrder : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kPi = 3.14159265358979323846;

// Time steps must satisfy dt <= eps^2 / kDefaultStepGuardRatio for any
// functional that resolves the mollifier.
inline constexpr double kDefaultStepGuardRatio = 10.0;

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

}  // namespace pam2d
