#pragma once

#include "pam2d/common.hpp"

#include <Eigen/Core>

#include <type_traits>

namespace pam2d {

/// Probabilists' Hermite polynomial: H_0 = 1, H_1 = x,
/// H_{n+1}(x) = x H_n(x) - n H_{n-1}(x), so that E[H_n(Z)^2] = n!.
template <class Scalar>
  requires(!std::is_base_of_v<Eigen::EigenBase<Scalar>, Scalar>)
Scalar hermite(int n, Scalar x) {
  require(n >= 0, "Hermite order must be nonnegative");
  if (n == 0) return Scalar(1);
  Scalar prev(1), cur = x;
  for (int k = 1; k < n; ++k) {
    const Scalar next = x * cur - Scalar(k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// H_0(x), ..., H_max(x) in one pass.
template <class Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> hermite_all(int max_order, Scalar x) {
  require(max_order >= 0, "Hermite order must be nonnegative");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> h(max_order + 1);
  h[0] = Scalar(1);
  if (max_order >= 1) h[1] = x;
  for (int k = 1; k < max_order; ++k) h[k + 1] = x * h[k] - Scalar(k) * h[k - 1];
  return h;
}

/// Elementwise H_n over an Eigen array.
template <class Derived>
Eigen::Array<typename Derived::Scalar, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> hermite(
    int n, const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([n](Scalar v) { return hermite<Scalar>(n, v); });
}

}  // namespace pam2d
