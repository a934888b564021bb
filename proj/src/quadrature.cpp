#include "pam2d/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace pam2d::quad {
namespace {

// Golub-Welsch: eigen-decomposition of the Jacobi matrix with zero diagonal
// and off-diagonal b_k; the weights are mu0 * (first eigenvector component)^2.
template <class OffDiag>
Rule golub_welsch(int n, OffDiag off_diagonal, double mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = off_diagonal(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  Rule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, int n, Rule (*make)(int)) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(make(n));
  return *slot;
}

Rule make_legendre(int n) {
  return golub_welsch(n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
}

Rule make_hermite(int n) {
  return golub_welsch(n, [](int k) { return std::sqrt(static_cast<double>(k)); }, 1.0);
}

}  // namespace

const Rule& gauss_legendre(int n) {
  require(n >= 1, "quadrature order must be positive");
  static std::map<int, std::unique_ptr<Rule>> cache;
  return cached(cache, n, make_legendre);
}

const Rule& gauss_hermite(int n) {
  require(n >= 1, "quadrature order must be positive");
  static std::map<int, std::unique_ptr<Rule>> cache;
  return cached(cache, n, make_hermite);
}

}  // namespace pam2d::quad
