#pragma once

#include "pam2d/brownian.hpp"
#include "pam2d/covariance.hpp"

#include <cmath>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pam2d {

/// int_0^t int_0^s R(B_s - B_u) du ds by the midpoint rule in both times:
/// h^2 (sum_{i>j} R(Bbar_i - Bbar_j) + n R(0) / 2), Bbar_i the step midpoints.
/// Throws ConfigurationError unless dt <= eps^2 / guard_ratio.
double self_intersection_raw(const BrownianPath& path, const Covariance& cov,
                             double guard_ratio = kDefaultStepGuardRatio);

/// E[R(B_s - B_u)] for |s - u| = gap: (2 pi)^-2 int exp(-gap |k|^2 / 2) phihat(eps1 k) phihat(eps2 k) dk.
double expected_covariance(const Covariance& cov, double gap);

/// m(t) = int_0^t (t - r) E[R(B_r)] dr.
double mean_self_intersection(const Covariance& cov, double t);

/// Exact expectation of self_intersection_raw on an n-step path, so that the
/// centred functional has mean zero at every resolution. Cached.
double mean_self_intersection(const Covariance& cov, double t, Index n_steps);

/// gamma_eps(t, B) = self_intersection_raw - its expectation at the path's resolution.
double gamma_eps(const BrownianPath& path, const Covariance& cov, double guard_ratio = kDefaultStepGuardRatio);

/// int_0^t1 int_0^t2 R_{eps1,eps2}(B1_s - B2_u) ds du (midpoint rule). The two
/// paths must carry different seeds; the guard uses min(eps1, eps2).
double mutual_intersection(const BrownianPath& a, const BrownianPath& b, const Covariance& cross,
                           double guard_ratio = kDefaultStepGuardRatio);

/// m_eps(t) = C_eps t + t (mu1 + mu2 log t) + r_eps.
struct RenormLedger {
  double eps = 0.0;
  double t = 0.0;
  double c_eps = 0.0;
  double m_eps = 0.0;
  double r_eps = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;

  /// t (mu1 + mu2 log t) + r_eps, i.e. m_eps - C_eps t.
  double log_prefactor() const { return t * (mu1 + mu2 * std::log(t)) + r_eps; }
};

/// Ledger for one (eps, t). With n_steps > 0 the resolution-matched mean is used.
RenormLedger make_ledger(const Covariance& cov, double t, double mu1, double mu2, Index n_steps = 0);

struct RenormFit {
  std::vector<double> eps;     // decreasing
  std::vector<double> t_grid;
  Eigen::MatrixXd excess;      // m_eps(t) - C_eps t, rows = eps, cols = t
  std::vector<double> limit;   // eps -> 0 extrapolation of each column
  std::vector<double> log_slope;  // d m / d log(1/eps) between the two finest levels
  double mu1 = 0.0;
  double mu2 = 0.0;
  double residual = 0.0;   // max |limit - t (mu1 + mu2 log t)|
  double tolerance = 0.0;  // 1e-3 max |limit|
  std::vector<RenormLedger> ledger;  // eps-major
  std::vector<std::string> warnings;

  /// max_t |r_eps(t)| for each eps level.
  std::vector<double> remainder_magnitude() const;
};

/// Extrapolates m_eps(t) - C_eps t to eps -> 0 by Aitken's delta-squared on the
/// three finest levels, then fits t (mu1 + mu2 log t) by least squares.
RenormFit fit_renormalization(const Mollifier& mollifier, std::span<const double> eps_ladder,
                              std::span<const double> t_grid);

/// CSV with header "eps,t,C_eps,m_eps,r_eps,mu1,mu2".
void write_ledger_csv(std::ostream& out, std::span<const RenormLedger> rows);

}  // namespace pam2d
