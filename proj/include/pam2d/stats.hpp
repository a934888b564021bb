#pragma once

#include "pam2d/common.hpp"

#include <span>

namespace pam2d {

/// A Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

/// Tree summation; the result depends only on the input order, never on how
/// the producing loop was scheduled.
double pairwise_sum(std::span<const double> values);

inline double pairwise_sum(const Eigen::VectorXd& v) {
  return pairwise_sum(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

Estimate mean_estimate(std::span<const double> samples);

inline Estimate mean_estimate(const Eigen::VectorXd& v) {
  return mean_estimate(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

// Self-normalized importance-sampling mean sum(w x) / sum(w) with the
// delta-method standard error.
Estimate self_normalized_mean(std::span<const double> weights, std::span<const double> values);

/// True when |a - b| <= k * sqrt(se_a^2 + se_b^2) (with a tiny absolute floor).
bool within_se(double a, double b, double se_a, double se_b, double k);

}  // namespace pam2d
