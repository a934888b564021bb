#pragma once

#include "pam2d/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <memory>
#include <vector>

namespace pam2d {

namespace detail {

// Unit-scale covariance phi * phi_rho (rho <= 1). Radial profiles are sampled
// uniformly in s = r^2, separable ones store the 1D factor sampled in |u|.
// values has two trailing zeros: the support edge and one padding entry.
struct UnitCovarianceTable {
  bool radial = true;
  double limit = 0.0;
  double inv_step = 0.0;
  std::vector<double> values;
};

std::shared_ptr<const UnitCovarianceTable> unit_covariance_table(Profile profile, double ratio);

}  // namespace detail

/// R_{eps1,eps2} = phi_eps1 * phi_eps2 (R_eps when the scales coincide),
/// evaluated by interpolation in a table built from direct convolution
/// quadrature. Immutable and cheap to copy; tables are shared.
class Covariance {
 public:
  Covariance(const Mollifier& mollifier, double eps);
  Covariance(const Mollifier& mollifier, double eps1, double eps2);

  double operator()(double dx, double dy) const {
    const detail::UnitCovarianceTable& t = *table_;
    if (t.radial) {
      const double s = std::min((dx * dx + dy * dy) * inv_scale_sq_, t.limit);
      return amplitude_ * lookup(t, s);
    }
    return amplitude_ * factor(t, std::abs(dx) * inv_scale_) * factor(t, std::abs(dy) * inv_scale_);
  }
  double operator()(const Point& x) const { return (*this)(x.x(), x.y()); }

  /// Separable profiles only: R(dx, dy) = axis_factor(dx) * axis_factor(dy).
  double axis_factor(double u) const;

  double at_origin() const { return origin_; }
  /// R vanishes for |x| >= range().
  double range() const { return range_; }
  double eps() const { return eps1_; }
  double eps1() const { return eps1_; }
  double eps2() const { return eps2_; }
  bool radial() const { return table_->radial; }
  const Mollifier& mollifier() const { return mollifier_; }

  /// phihat(eps1 k) phihat(eps2 k): the spectral density of R at frequency k.
  double spectral(double k1, double k2) const;

  /// Radial profile r -> R((r, 0)) as CSV with header "r,R_eps_r".
  void write_csv(std::ostream& out, int samples = 401) const;

 private:
  static double lookup(const detail::UnitCovarianceTable& t, double s) {
    const double pos = s * t.inv_step;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    return t.values[j] + frac * (t.values[j + 1] - t.values[j]);
  }
  static double factor(const detail::UnitCovarianceTable& t, double u) {
    return u >= t.limit ? 0.0 : lookup(t, u);
  }

  Mollifier mollifier_;
  double eps1_;
  double eps2_;
  double inv_scale_;
  double inv_scale_sq_;
  double amplitude_;
  double range_;
  double origin_;
  std::shared_ptr<const detail::UnitCovarianceTable> table_;
};

/// Covariance of the periodized field on a torus of side L: sum_n R(x + n L).
double torus_covariance(const Covariance& cov, const Point& x, double side);

/// C_eps = (1/pi) log(1/eps), eps in (0, 1].
double renormalization_constant(double eps);

}  // namespace pam2d
