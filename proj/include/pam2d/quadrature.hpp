#pragma once

#include "pam2d/common.hpp"

#include <span>

namespace pam2d::quad {

/// Nodes and weights of an n-point rule.
struct Rule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch). Rules are cached.
const Rule& gauss_legendre(int n);

/// Gauss-Hermite rule for the standard normal law: sum w_i f(x_i) ~ E[f(Z)].
const Rule& gauss_hermite(int n);

template <class F>
double integrate(F&& f, double a, double b, int n = 32) {
  const Rule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Composite Gauss-Legendre over consecutive breakpoints.
template <class F>
double integrate_panels(F&& f, std::span<const double> breaks, int n = 32) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (breaks[k + 1] > breaks[k]) sum += integrate(f, breaks[k], breaks[k + 1], n);
  }
  return sum;
}

}  // namespace pam2d::quad
