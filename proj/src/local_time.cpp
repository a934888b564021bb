#include "pam2d/local_time.hpp"

#include "pam2d/pair_sum.hpp"
#include "pam2d/parallel.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/stats.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

namespace pam2d {
namespace {

double smaller_scale(const Covariance& cov) { return std::min(cov.eps1(), cov.eps2()); }
double wider_scale(const Covariance& cov) { return std::max(cov.eps1(), cov.eps2()); }

// Radial profiles: (1 / 2pi) int_0^inf exp(-gap k^2 / 2) S(k) k dk.
double expected_radial(const Covariance& cov, double gap) {
  const double wide = wider_scale(cov);
  double k_hi = 200.0 / wide;  // the tabulated transform vanishes beyond
  if (gap > 0.0) k_hi = std::min(k_hi, std::sqrt(2.0 * 46.0 / gap));
  // the transform oscillates on a scale of ~pi / wide in k
  const double width = std::min(2.0 / wide, k_hi / 8.0);
  const auto panels = static_cast<int>(std::clamp(std::ceil(k_hi / width), 8.0, 400.0));
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = k_hi * p / panels;
    const double b = k_hi * (p + 1) / panels;
    sum += quad::integrate(
        [&](double k) { return std::exp(-0.5 * gap * k * k) * cov.spectral(k, 0.0) * k; }, a, b, 16);
  }
  return sum / (2.0 * kPi);
}

// Separable profiles: [int g(u) q_gap(u) du]^2 with q the 1D heat kernel.
double expected_separable(const Covariance& cov, double gap) {
  const double wide = wider_scale(cov);
  const double rho = smaller_scale(cov) / wide;
  const double sd = std::sqrt(gap);
  const double window = std::min(cov.eps1() + cov.eps2(), 12.0 * sd);
  std::vector<double> breaks = {-window, window};
  for (double k : {1.0 + rho, 1.0, 1.0 - rho, rho, 0.0}) {
    for (double s : {-1.0, 1.0}) {
      const double u = s * k * wide;
      if (std::abs(u) < window) breaks.push_back(u);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  const double norm = 1.0 / std::sqrt(2.0 * kPi * gap);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    const int pieces = static_cast<int>(std::clamp(std::ceil((b - a) / sd), 1.0, 64.0));
    for (int j = 0; j < pieces; ++j) {
      sum += quad::integrate(
          [&](double u) { return cov.axis_factor(u) * norm * std::exp(-0.5 * u * u / gap); },
          a + (b - a) * j / pieces, a + (b - a) * (j + 1) / pieces, 16);
    }
  }
  return sum * sum;
}

void check_guard(const BrownianPath& path, const Covariance& cov, double ratio) {
  check_step_guard(path.dt(), smaller_scale(cov), ratio);
}

}  // namespace

double expected_covariance(const Covariance& cov, double gap) {
  require(gap >= 0.0, "time gap must be nonnegative");
  if (gap == 0.0) return cov.at_origin();
  return cov.radial() ? expected_radial(cov, gap) : expected_separable(cov, gap);
}

double mean_self_intersection(const Covariance& cov, double t) {
  require(t > 0.0, "time must be positive");
  // E[R(B_r)] changes character at r ~ eps^2: grade the panels geometrically
  const double eps = smaller_scale(cov);
  std::vector<double> breaks = {0.0};
  for (double r = eps * eps / 64.0; r < t; r *= 2.0) breaks.push_back(r);
  breaks.push_back(t);
  return quad::integrate_panels([&](double r) { return (t - r) * expected_covariance(cov, r); }, breaks, 16);
}

double mean_self_intersection(const Covariance& cov, double t, Index n_steps) {
  require(t > 0.0 && n_steps >= 1, "time and step count must be positive");
  using Key = std::tuple<int, double, double, double, Index>;
  static std::mutex mutex;
  static std::map<Key, double> cache;
  const Key key{static_cast<int>(cov.mollifier().profile()), cov.eps1(), cov.eps2(), t, n_steps};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  // midpoints k steps apart differ by a Gaussian of variance (k - 1/2) h per coordinate
  const double h = t / static_cast<double>(n_steps);
  Eigen::VectorXd terms(n_steps);
  parallel_for(n_steps, [&](Index k) {
    terms[k] = k == 0 ? 0.5 * static_cast<double>(n_steps) * cov.at_origin()
                      : static_cast<double>(n_steps - k) * expected_covariance(cov, (static_cast<double>(k) - 0.5) * h);
  });
  const double value = h * h * pairwise_sum(terms);
  std::lock_guard lock(mutex);
  cache.emplace(key, value);
  return value;
}

double self_intersection_raw(const BrownianPath& path, const Covariance& cov, double guard_ratio) {
  check_guard(path, cov, guard_ratio);
  const PointSet mid = path.midpoints();
  const double pairs = self_pair_sum(mid, cov.range(), [&cov](double dx, double dy) { return cov(dx, dy); });
  const double h = path.dt();
  return h * h * (pairs + 0.5 * static_cast<double>(path.steps()) * cov.at_origin());
}

double gamma_eps(const BrownianPath& path, const Covariance& cov, double guard_ratio) {
  const double raw = self_intersection_raw(path, cov, guard_ratio);
  return raw - mean_self_intersection(cov, path.t_end, path.steps());
}

double mutual_intersection(const BrownianPath& a, const BrownianPath& b, const Covariance& cross,
                           double guard_ratio) {
  if (a.seed == b.seed) throw InvalidParameter("mutual intersection needs independent paths (distinct seeds)");
  check_guard(a, cross, guard_ratio);
  check_guard(b, cross, guard_ratio);
  const double sum = cross_pair_sum(a.midpoints(), b.midpoints(), cross.range(),
                                    [&cross](double dx, double dy) { return cross(dx, dy); });
  return a.dt() * b.dt() * sum;
}

RenormLedger make_ledger(const Covariance& cov, double t, double mu1, double mu2, Index n_steps) {
  RenormLedger row;
  row.eps = cov.eps();
  row.t = t;
  row.c_eps = renormalization_constant(row.eps);
  row.m_eps = n_steps > 0 ? mean_self_intersection(cov, t, n_steps) : mean_self_intersection(cov, t);
  row.mu1 = mu1;
  row.mu2 = mu2;
  row.r_eps = row.m_eps - row.c_eps * t - t * (mu1 + mu2 * std::log(t));
  return row;
}

std::vector<double> RenormFit::remainder_magnitude() const {
  std::vector<double> out(eps.size(), 0.0);
  for (std::size_t i = 0; i < eps.size(); ++i)
    for (std::size_t j = 0; j < t_grid.size(); ++j)
      out[i] = std::max(out[i], std::abs(ledger[i * t_grid.size() + j].r_eps));
  return out;
}

RenormFit fit_renormalization(const Mollifier& mollifier, std::span<const double> eps_ladder,
                              std::span<const double> t_grid) {
  require(eps_ladder.size() >= 3, "renormalization fit needs at least three eps levels");
  require(t_grid.size() >= 2, "renormalization fit needs at least two times");
  for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
    require(eps_ladder[i] > 0.0 && eps_ladder[i] <= 1.0, "eps levels must lie in (0, 1]");
    require(i == 0 || eps_ladder[i] < eps_ladder[i - 1], "eps levels must be strictly decreasing");
  }
  for (double t : t_grid) require(t > 0.0 && t <= 0.5, "fit times must lie in (0, 0.5]");

  RenormFit fit;
  fit.eps.assign(eps_ladder.begin(), eps_ladder.end());
  fit.t_grid.assign(t_grid.begin(), t_grid.end());
  const auto ne = static_cast<Index>(fit.eps.size());
  const auto nt = static_cast<Index>(fit.t_grid.size());
  fit.excess.resize(ne, nt);
  Eigen::MatrixXd means(ne, nt);
  parallel_for(ne * nt, [&](Index k) {
    const Index i = k / nt, j = k % nt;
    const Covariance cov(mollifier, fit.eps[i]);
    means(i, j) = mean_self_intersection(cov, fit.t_grid[j]);
    fit.excess(i, j) = means(i, j) - renormalization_constant(fit.eps[i]) * fit.t_grid[j];
  });

  fit.limit.resize(nt);
  fit.log_slope.resize(nt);
  bool accelerated = true;
  for (Index j = 0; j < nt; ++j) {
    const double x0 = fit.excess(ne - 3, j), x1 = fit.excess(ne - 2, j), x2 = fit.excess(ne - 1, j);
    const double d1 = x1 - x0, d2 = x2 - x1;
    const double ratio = d2 / d1;
    if (std::isfinite(ratio) && ratio > 0.0 && ratio < 1.0) {
      fit.limit[j] = x2 - d2 * d2 / (d2 - d1);
    } else {
      fit.limit[j] = x2;
      accelerated = false;
    }
    fit.log_slope[j] = (means(ne - 1, j) - means(ne - 2, j)) / std::log(fit.eps[ne - 2] / fit.eps[ne - 1]);
  }
  if (!accelerated) fit.warnings.emplace_back("eps ladder not in the asymptotic regime; finest level used as the limit");

  Eigen::MatrixXd design(nt, 2);
  Eigen::VectorXd y(nt);
  for (Index j = 0; j < nt; ++j) {
    const double t = fit.t_grid[j];
    design(j, 0) = t;
    design(j, 1) = t * std::log(t);
    y[j] = fit.limit[j];
  }
  const Eigen::Vector2d mu = design.colPivHouseholderQr().solve(y);
  fit.mu1 = mu[0];
  fit.mu2 = mu[1];
  fit.residual = (design * mu - y).cwiseAbs().maxCoeff();
  fit.tolerance = 1e-3 * y.cwiseAbs().maxCoeff();
  if (fit.residual > fit.tolerance) fit.warnings.emplace_back("fit residual above tolerance");

  for (Index i = 0; i < ne; ++i) {
    for (Index j = 0; j < nt; ++j) {
      RenormLedger row;
      row.eps = fit.eps[i];
      row.t = fit.t_grid[j];
      row.c_eps = renormalization_constant(row.eps);
      row.m_eps = means(i, j);
      row.mu1 = fit.mu1;
      row.mu2 = fit.mu2;
      row.r_eps = row.m_eps - row.c_eps * row.t - row.t * (fit.mu1 + fit.mu2 * std::log(row.t));
      fit.ledger.push_back(row);
    }
  }
  return fit;
}

void write_ledger_csv(std::ostream& out, std::span<const RenormLedger> rows) {
  out << "eps,t,C_eps,m_eps,r_eps,mu1,mu2\n";
  out.precision(17);
  for (const RenormLedger& r : rows)
    out << r.eps << ',' << r.t << ',' << r.c_eps << ',' << r.m_eps << ',' << r.r_eps << ',' << r.mu1 << ',' << r.mu2
        << '\n';
}

}  // namespace pam2d
