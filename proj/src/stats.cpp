#include "pam2d/stats.hpp"

#include <cmath>
#include <vector>

namespace pam2d {

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate mean_estimate(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  if (samples.empty()) return {};
  const double mean = pairwise_sum(samples) / n;
  if (samples.size() < 2) return {mean, 0.0};
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - mean) * (samples[i] - mean);
  const double var = pairwise_sum(dev) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

Estimate self_normalized_mean(std::span<const double> weights, std::span<const double> values) {
  require(weights.size() == values.size(), "weights and values differ in length");
  require(!weights.empty(), "empty ensemble");
  const double total = pairwise_sum(weights);
  std::vector<double> wx(values.size());
  // shifting by the first value makes constant functionals come out exactly
  const double shift = values[0];
  for (std::size_t i = 0; i < values.size(); ++i) wx[i] = weights[i] * (values[i] - shift);
  const double mean = shift + pairwise_sum(wx) / total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double wn = weights[i] / total;
    wx[i] = wn * wn * (values[i] - mean) * (values[i] - mean);
  }
  return {mean, std::sqrt(pairwise_sum(wx))};
}

bool within_se(double a, double b, double se_a, double se_b, double k) {
  const double se = std::sqrt(se_a * se_a + se_b * se_b);
  return std::abs(a - b) <= k * se + 1e-12 * std::max(1.0, std::abs(b));
}

}  // namespace pam2d
