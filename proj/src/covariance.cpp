#include "pam2d/covariance.hpp"

#include "pam2d/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

namespace pam2d {
namespace detail {
namespace {

constexpr int kTableIntervals = 4096;

// (phi * phi_rho)(r e_1) = int_{|v|<1} phi(v) phi(r e_1 - rho v) dv, in polar
// coordinates around the origin. Only the lens where both factors are nonzero
// is integrated, so the integrand vanishes smoothly at every panel edge.
double bump_convolution(double r, double rho) {
  const quad::Rule& rule = quad::gauss_legendre(64);
  const double v_lo = std::max(0.0, (r - 1.0) / rho);
  if (v_lo >= 1.0) return 0.0;
  auto radial_part = [&](double v) {
    const double pv = kBumpNormalization * std::exp(-1.0 / (1.0 - v * v)) * v;
    if (pv == 0.0) return 0.0;
    double theta_max = kPi;
    if (r > 0.0) {
      const double c = (r * r + rho * rho * v * v - 1.0) / (2.0 * r * rho * v);
      if (c >= 1.0) return 0.0;
      theta_max = c <= -1.0 ? kPi : std::acos(c);
    }
    auto angular = [&](double theta) {
      const double d2 = r * r + rho * rho * v * v - 2.0 * r * rho * v * std::cos(theta);
      return d2 < 1.0 ? kBumpNormalization * std::exp(-1.0 / (1.0 - d2)) : 0.0;
    };
    double inner = 0.0;
    const double half = 0.5 * theta_max;
    for (Index i = 0; i < rule.nodes.size(); ++i) inner += rule.weights[i] * angular(half * (1.0 + rule.nodes[i]));
    return 2.0 * half * inner * pv;
  };
  return quad::integrate(radial_part, v_lo, 1.0, 64);
}

double hat(double u) { return std::max(0.0, 1.0 - std::abs(u)); }

// (hat * hat_rho)(u); the integrand is piecewise linear-times-linear.
double hat_convolution(double u, double rho) {
  std::vector<double> breaks{-1.0, 0.0, 1.0, u - rho, u, u + rho};
  std::sort(breaks.begin(), breaks.end());
  for (double& b : breaks) b = std::clamp(b, -1.0, 1.0);
  auto integrand = [&](double z) { return hat(z) * hat((u - z) / rho) / rho; };
  return quad::integrate_panels(integrand, breaks, 4);
}

std::shared_ptr<const UnitCovarianceTable> build_table(Profile profile, double rho) {
  auto table = std::make_shared<UnitCovarianceTable>();
  table->radial = profile == Profile::standard_bump;
  table->limit = table->radial ? (1.0 + rho) * (1.0 + rho) : 1.0 + rho;
  table->inv_step = kTableIntervals / table->limit;
  // one zero beyond the edge so clamped lookups need no branch
  table->values.assign(kTableIntervals + 2, 0.0);
  for (int j = 0; j <= kTableIntervals; ++j) {
    const double arg = table->limit * j / kTableIntervals;
    table->values[j] = table->radial ? bump_convolution(std::sqrt(arg), rho) : hat_convolution(arg, rho);
  }
  table->values[kTableIntervals] = 0.0;
  return table;
}

}  // namespace

std::shared_ptr<const UnitCovarianceTable> unit_covariance_table(Profile profile, double ratio) {
  static std::mutex mutex;
  static std::map<std::pair<int, long long>, std::shared_ptr<const UnitCovarianceTable>> cache;
  const auto key = std::make_pair(static_cast<int>(profile), std::llround(ratio * 1e12));
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = build_table(profile, ratio);
  return slot;
}

}  // namespace detail

Covariance::Covariance(const Mollifier& mollifier, double eps) : Covariance(mollifier, eps, eps) {}

Covariance::Covariance(const Mollifier& mollifier, double eps1, double eps2)
    : mollifier_(mollifier), eps1_(eps1), eps2_(eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw InvalidParameter("covariance scales must be positive");
  const double wide = std::max(eps1, eps2);
  const double ratio = std::min(eps1, eps2) / wide;
  inv_scale_ = 1.0 / wide;
  inv_scale_sq_ = inv_scale_ * inv_scale_;
  amplitude_ = inv_scale_sq_;
  table_ = detail::unit_covariance_table(mollifier.profile(), ratio);
  range_ = (eps1 + eps2) * mollifier.support_radius();
  origin_ = (*this)(0.0, 0.0);
}

double Covariance::axis_factor(double u) const {
  if (table_->radial) throw InvalidParameter("axis_factor requires a separable profile");
  return inv_scale_ * factor(*table_, std::abs(u) * inv_scale_);
}

double Covariance::spectral(double k1, double k2) const {
  return mollifier_.fourier(eps1_ * k1, eps1_ * k2) * mollifier_.fourier(eps2_ * k1, eps2_ * k2);
}

void Covariance::write_csv(std::ostream& out, int samples) const {
  out << "r,R_eps_r\n";
  out.precision(17);
  for (int i = 0; i < samples; ++i) {
    const double r = range_ * i / (samples - 1);
    out << r << ',' << (*this)(r, 0.0) << '\n';
  }
}

double torus_covariance(const Covariance& cov, const Point& x, double side) {
  require(side > 0.0, "torus side must be positive");
  const int reach = static_cast<int>(std::ceil(cov.range() / side)) + 1;
  double sum = 0.0;
  for (int a = -reach; a <= reach; ++a) {
    for (int b = -reach; b <= reach; ++b) sum += cov(x.x() + a * side, x.y() + b * side);
  }
  return sum;
}

double renormalization_constant(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("renormalization needs eps in (0, 1]");
  return std::log(1.0 / eps) / kPi;
}

}  // namespace pam2d
