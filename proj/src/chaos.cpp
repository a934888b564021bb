#include "pam2d/chaos.hpp"

#include "pam2d/hermite.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pam2d {

Variant variant_from_string(std::string_view name) {
  if (name == "stratonovich") return Variant::stratonovich;
  if (name == "wick") return Variant::wick;
  throw InvalidParameter("unknown variant '" + std::string(name) + "' (expected stratonovich or wick)");
}

std::string to_string(Variant variant) { return variant == Variant::wick ? "wick" : "stratonovich"; }

InitialCondition InitialCondition::constant(double value) {
  InitialCondition u;
  u.value_ = value;
  return u;
}

InitialCondition InitialCondition::function(std::function<double(const Point&)> f) {
  require(static_cast<bool>(f), "initial condition function is empty");
  InitialCondition u;
  u.f_ = std::move(f);
  return u;
}

InitialCondition InitialCondition::grid(PeriodicField field) {
  return function([field = std::move(field)](const Point& x) { return field(x); });
}

double phi_functional(const BrownianPath& path, const Mollifier& mollifier, double eps, const Point& x,
                      const Point& y, double guard_ratio) {
  PointSet ys(2, 1);
  ys.col(0) = y;
  return phi_functional(path, mollifier, eps, x, ys, guard_ratio)[0];
}

Eigen::VectorXd phi_functional(const BrownianPath& path, const Mollifier& mollifier, double eps, const Point& x,
                               const PointSet& ys, double guard_ratio) {
  require(eps > 0.0, "mollifier scale must be positive");
  check_step_guard(path.dt(), eps, guard_ratio);
  const double inv = 1.0 / eps;
  const double reach = eps * mollifier.support_radius();
  Eigen::VectorXd out(ys.cols());
  for (Index j = 0; j < ys.cols(); ++j) {
    const Point shift = x - ys.col(j);
    double sum = 0.0;
    for (Index k = 0; k < path.steps(); ++k) {
      const double dx = shift.x() + 0.5 * (path.positions(0, k) + path.positions(0, k + 1));
      const double dy = shift.y() + 0.5 * (path.positions(1, k) + path.positions(1, k + 1));
      if (std::abs(dx) >= reach || std::abs(dy) >= reach) continue;
      sum += mollifier.unit(dx * inv, dy * inv);
    }
    out[j] = path.dt() * inv * inv * sum;
  }
  return out;
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

void check_variant(const WeightedEnsemble& e, Variant variant) {
  if (variant == Variant::wick && !e.unit_weights)
    throw InvalidParameter("wick variant requires a unit-weight ensemble");
  if (variant == Variant::stratonovich && e.unit_weights)
    throw InvalidParameter("stratonovich variant requires a weighted ensemble");
}

double prefactor(const RenormLedger& ledger, Variant variant) {
  return variant == Variant::wick ? 1.0 : std::exp(ledger.log_prefactor());
}

void check_ledger(const RenormLedger& ledger, const WeightedEnsemble& e) {
  require(std::abs(ledger.t - e.t) <= 1e-12 * e.t, "ledger time differs from the ensemble time");
  require(ledger.eps > 0.0, "ledger scale must be positive");
}

}  // namespace

ChaosCoefficient chaos_coeff_mc(int n, const Point& x, std::span<const PointSet> points,
                                const WeightedEnsemble& ensemble, const RenormLedger& ledger,
                                const Mollifier& mollifier, const InitialCondition& u0, Variant variant) {
  require(n >= 0, "chaos order must be nonnegative");
  require(!points.empty(), "at least one evaluation tuple required");
  for (const PointSet& p : points) require(p.cols() == n, "each evaluation tuple needs n points");
  check_variant(ensemble, variant);
  check_ledger(ledger, ensemble);
  const double eps = ledger.eps;
  check_step_guard(ensemble.t / static_cast<double>(ensemble.n_steps), eps);

  ChaosCoefficient out;
  out.variant = variant;
  out.n = n;
  out.t = ensemble.t;
  out.eps = eps;
  out.x = x;
  out.prefactor = prefactor(ledger, variant);
  out.points.assign(points.begin(), points.end());

  const auto tuples = static_cast<Index>(points.size());
  PointSet all(2, tuples * n);
  for (Index j = 0; j < tuples; ++j)
    if (n > 0) all.middleCols(j * n, n) = points[static_cast<std::size_t>(j)];

  const Index paths = ensemble.size();
  const double shift = variant == Variant::wick ? 0.0 : ensemble.max_log_weight;
  Eigen::MatrixXd samples(paths, tuples);
  parallel_for(paths, [&](Index i) {
    const BrownianPath p = ensemble.path(i);
    const double weight = variant == Variant::wick ? 1.0 : std::exp(ensemble.log_weights[i] - shift);
    const double base = weight * u0(Point(x + p.end()));
    const Eigen::VectorXd phi = n > 0 ? phi_functional(p, mollifier, eps, x, all) : Eigen::VectorXd();
    std::vector<double> factors(static_cast<std::size_t>(n));
    for (Index j = 0; j < tuples; ++j) {
      // sorted factors: permuted tuples give bit-identical products
      for (int k = 0; k < n; ++k) factors[static_cast<std::size_t>(k)] = phi[j * n + k];
      std::sort(factors.begin(), factors.end());
      double v = base;
      for (double f : factors) v *= f;
      samples(i, j) = v;
    }
  });

  const double scale = out.prefactor * std::exp(shift) / factorial(n);
  out.values.resize(tuples);
  out.ses.resize(tuples);
  for (Index j = 0; j < tuples; ++j) {
    const Estimate e = mean_estimate(Eigen::VectorXd(samples.col(j)));
    out.values[j] = scale * e.value;
    out.ses[j] = scale * e.se;
  }
  return out;
}

namespace {

// int f(u) du over [lo, hi] in the variable v = log u, unit-width panels.
template <class F>
double integrate_log(F&& f, double lo, double hi) {
  if (!(hi > lo) || !(lo > 0.0)) return 0.0;
  const double a = std::log(lo), b = std::log(hi);
  const auto panels = static_cast<int>(std::ceil(b - a));
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double va = a + (b - a) * p / panels, vb = a + (b - a) * (p + 1) / panels;
    sum += quad::integrate(
        [&](double v) {
          const double u = std::exp(v);
          return f(u) * u;
        },
        va, vb, 10);
  }
  return sum;
}

// Values of a function of s on a grid uniform in log s over [lo, hi], cubic
// Lagrange interpolation in log s, zero below the grid.
class LogTable {
 public:
  LogTable(double lo, double hi, int size) : v0_(std::log(lo)), dv_((std::log(hi) - std::log(lo)) / (size - 1)), lo_(lo) {
    values_.resize(size);
  }
  double node(int j) const { return std::exp(v0_ + dv_ * j); }
  int size() const { return static_cast<int>(values_.size()); }
  double& operator[](int j) { return values_[static_cast<std::size_t>(j)]; }
  double operator()(double s) const {
    if (s < lo_) return 0.0;
    const double pos = (std::log(s) - v0_) / dv_;
    const int n = size();
    const int j0 = std::clamp(static_cast<int>(std::floor(pos)) - 1, 0, n - 4);
    double sum = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l *= (pos - (j0 + b)) / static_cast<double>(a - b);
      sum += l * values_[static_cast<std::size_t>(j0 + a)];
    }
    return sum;
  }

 private:
  double v0_, dv_, lo_;
  std::vector<double> values_;
};

// (q_v * u0)(y) = E[u0(y + sqrt(v) Z)] by a product Gauss-Hermite rule.
double heat_smoothed(const InitialCondition& u0, double v, const Point& y) {
  if (u0.is_constant()) return u0(y);
  if (v <= 0.0) return u0(y);
  const quad::Rule& r = quad::gauss_hermite(24);
  const double sd = std::sqrt(v);
  double sum = 0.0;
  for (Index i = 0; i < r.nodes.size(); ++i)
    for (Index j = 0; j < r.nodes.size(); ++j)
      sum += r.weights[i] * r.weights[j] * u0(Point(y + sd * Point(r.nodes[i], r.nodes[j])));
  return sum;
}

// Ordered-time integral of prod_k q_{s_k - s_{k-1}}(gaps_k) (q_{t - s_n} * u0)(last).
double ordered_integral(const std::vector<double>& gaps, double t, const Point& last, const InitialCondition& u0) {
  const int n = static_cast<int>(gaps.size());
  auto kernel = [](double u, double d) { return std::exp(-0.5 * d * d / u) / (2.0 * kPi * u); };
  // below d^2 / 200 the kernel is smaller than e^-100
  auto cutoff = [](double d) { return d * d / 200.0; };
  const double dmin = *std::min_element(gaps.begin(), gaps.end());
  const double lo = std::min(cutoff(dmin), t * 1e-3);

  std::function<double(double)> current = [&](double s) { return kernel(s, gaps[0]); };
  std::vector<LogTable> tables;
  tables.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) {
    LogTable table(lo, t, 600);
    const double d = gaps[static_cast<std::size_t>(k)];
    const auto prev = current;
    for (int j = 0; j < table.size(); ++j) {
      const double s = table.node(j);
      const double near = integrate_log([&](double u) { return kernel(u, d) * prev(s - u); }, cutoff(d), 0.5 * s);
      const double far = integrate_log([&](double w) { return kernel(s - w, d) * prev(w); }, lo, 0.5 * s);
      table[j] = near + far;
    }
    tables.push_back(std::move(table));
    const LogTable* tab = &tables.back();
    current = [tab](double s) { return (*tab)(s); };
  }
  const double head = integrate_log([&](double s) { return current(s) * heat_smoothed(u0, t - s, last); }, lo, 0.5 * t);
  const double tail = quad::integrate([&](double w) { return current(t - w) * heat_smoothed(u0, w, last); }, 0.0, 0.5 * t, 32);
  return head + tail;
}

}  // namespace

std::optional<double> wick_coeff_analytic(int n, double t, const Point& x, const PointSet& points,
                                          const InitialCondition& u0) {
  require(n >= 0 && t > 0.0, "order must be nonnegative and time positive");
  if (n > 6) throw UnsupportedOrder("analytic Wick coefficients are available up to order 6");
  require(points.cols() == n, "need n evaluation points");
  if (n == 0) return heat_smoothed(u0, t, x);
  for (Index i = 0; i < n; ++i) {
    if ((points.col(i) - x).norm() == 0.0) return std::nullopt;
    for (Index j = i + 1; j < n; ++j)
      if ((points.col(i) - points.col(j)).norm() == 0.0) return std::nullopt;
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  double sum = 0.0;
  do {
    std::vector<double> gaps(static_cast<std::size_t>(n));
    Point prev = x;
    for (int k = 0; k < n; ++k) {
      const Point y = points.col(order[static_cast<std::size_t>(k)]);
      gaps[static_cast<std::size_t>(k)] = (y - prev).norm();
      prev = y;
    }
    sum += ordered_integral(gaps, t, prev, u0);
  } while (std::next_permutation(order.begin(), order.end()));
  return sum / factorial(n);
}

ReplicaPairs replica_pairs(const WeightedEnsemble& a, const WeightedEnsemble& b, const RenormLedger& ledger,
                           const Mollifier& mollifier, const InitialCondition& u0, const Point& x, Variant variant) {
  require(a.size() == b.size(), "replica ensembles must have equal size");
  if (a.master_seed == b.master_seed) throw InvalidParameter("replica ensembles must use distinct master seeds");
  require(a.t == b.t && a.n_steps == b.n_steps, "replica ensembles must share t and resolution");
  check_variant(a, variant);
  check_variant(b, variant);
  check_ledger(ledger, a);

  ReplicaPairs out;
  out.prefactor = prefactor(ledger, variant);
  out.eps = ledger.eps;
  out.t = a.t;
  const Index n = a.size();
  out.log_weight.resize(n);
  out.initial.resize(n);
  out.overlap.resize(n);
  const Covariance cov(mollifier, ledger.eps);
  parallel_for(n, [&](Index i) {
    const BrownianPath pa = a.path(i);
    const BrownianPath pb = b.path(i);
    out.log_weight[i] = a.log_weights[i] + b.log_weights[i];
    out.initial[i] = u0(Point(x + pa.end())) * u0(Point(x + pb.end()));
    out.overlap[i] = mutual_intersection(pa, pb, cov);
  });
  return out;
}

namespace {

Eigen::VectorXd shifted_weights(const ReplicaPairs& pairs, double& shift) {
  shift = pairs.log_weight.size() ? pairs.log_weight.maxCoeff() : 0.0;
  return ((pairs.log_weight.array() - shift).exp() * pairs.initial.array()).matrix();
}

}  // namespace

Estimate coeff_norm_estimate(int n, const ReplicaPairs& pairs) {
  require(n >= 0, "chaos order must be nonnegative");
  double shift = 0.0;
  const Eigen::VectorXd w = shifted_weights(pairs, shift);
  const Eigen::VectorXd samples = (w.array() * pairs.overlap.array().pow(n)).matrix();
  const Estimate e = mean_estimate(samples);
  const double scale = pairs.prefactor * pairs.prefactor * std::exp(shift) / factorial(n);
  return {scale * e.value, scale * e.se};
}

TruncationReport truncated_second_moment(int max_order, const WeightedEnsemble& a, const WeightedEnsemble& b,
                                         const RenormLedger& ledger, const Mollifier& mollifier,
                                         const InitialCondition& u0, const Point& x) {
  require(max_order >= 0 && max_order <= 5, "truncation order must lie in [0, 5]");
  const ReplicaPairs pairs = replica_pairs(a, b, ledger, mollifier, u0, x, Variant::stratonovich);
  TruncationReport report;
  report.max_order = max_order;

  double shift = 0.0;
  const Eigen::VectorXd w = shifted_weights(pairs, shift);
  const double scale = pairs.prefactor * pairs.prefactor * std::exp(shift);
  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(w.size());
  Eigen::VectorXd power = Eigen::VectorXd::Ones(w.size());
  for (int n = 0; n <= max_order; ++n) {
    if (n > 0) power = (power.array() * pairs.overlap.array() / n).matrix();
    const Eigen::VectorXd term = (w.array() * power.array()).matrix();
    cumulative += term;
    const Estimate t = mean_estimate(term);
    const Estimate c = mean_estimate(cumulative);
    report.terms.push_back({scale * t.value, scale * t.se});
    report.partial_sums.push_back({scale * c.value, scale * c.se});
    if (n > 0 && report.partial_sums[n].value < report.partial_sums[n - 1].value) report.nondecreasing = false;
  }

  const Covariance cov(mollifier, ledger.eps);
  const Index n = a.size();
  Eigen::VectorXd exponent(n);
  parallel_for(n, [&](Index i) {
    exponent[i] = self_intersection_raw(a.path(i), cov) + self_intersection_raw(b.path(i), cov) + pairs.overlap[i];
  });
  const double top = exponent.maxCoeff();
  const Eigen::VectorXd target = ((exponent.array() - top).exp() * pairs.initial.array()).matrix();
  const Estimate e = mean_estimate(target);
  const double factor = std::exp(top - 2.0 * ledger.c_eps * a.t);
  report.target = {factor * e.value, factor * e.se};
  return report;
}

IsometryReport hermite_isometry_check(int n, const CellFunction& h, Index samples, std::uint64_t seed,
                                      int max_other) {
  require(n >= 0 && max_other >= 0, "orders must be nonnegative");
  require(samples >= 2, "need at least two samples");
  require(h.cell_area > 0.0 && h.values.size() > 0, "test function needs cells");
  if (!(std::abs(h.norm() - 1.0) <= 1e-10)) throw InvalidParameter("test function must have unit L2 norm");

  const int top = std::max(n, max_other);
  const Eigen::VectorXd coeff = std::sqrt(h.cell_area) * h.values;
  constexpr Index kBlock = 4096;
  const Index blocks = (samples + kBlock - 1) / kBlock;
  Eigen::MatrixXd products(samples, top + 1);  // column m: H_n H_m
  parallel_for(blocks, [&](Index blk) {
    Engine engine(stream_seed(seed, static_cast<std::uint64_t>(blk)));
    StandardNormal normal;
    const Index end = std::min(samples, (blk + 1) * kBlock);
    for (Index s = blk * kBlock; s < end; ++s) {
      double w = 0.0;
      for (Index c = 0; c < coeff.size(); ++c) w += coeff[c] * normal(engine);
      const Eigen::ArrayXd hs = hermite_all(top, w);
      products.row(s) = (hs[n] * hs).matrix().transpose();
    }
  });

  IsometryReport report;
  report.n = n;
  report.target = factorial(n);
  report.second_moment = mean_estimate(Eigen::VectorXd(products.col(n)));
  report.pass = within_se(report.second_moment.value, report.target, report.second_moment.se, 0.0, 4.0);
  for (int m = 0; m <= max_other; ++m) {
    if (m == n) continue;
    const Estimate e = mean_estimate(Eigen::VectorXd(products.col(m)));
    report.other_orders.push_back(m);
    report.cross_moments.push_back(e);
    if (!within_se(e.value, 0.0, e.se, 0.0, 4.0)) report.orthogonal = false;
  }
  return report;
}

void write_coefficients_csv(std::ostream& out, std::span<const ChaosCoefficient> rows) {
  int width = 0;
  for (const ChaosCoefficient& c : rows) width = std::max(width, c.n);
  out << "variant,n,t,x1,x2";
  for (int k = 1; k <= width; ++k) out << ",y" << k << "_1,y" << k << "_2";
  out << ",value,se\n";
  out.precision(17);
  for (const ChaosCoefficient& c : rows) {
    for (std::size_t j = 0; j < c.points.size(); ++j) {
      out << to_string(c.variant) << ',' << c.n << ',' << c.t << ',' << c.x.x() << ',' << c.x.y();
      for (int k = 0; k < width; ++k) {
        if (k < c.n)
          out << ',' << c.points[j](0, k) << ',' << c.points[j](1, k);
        else
          out << ",,";
      }
      out << ',' << c.values[static_cast<Index>(j)] << ',' << c.ses[static_cast<Index>(j)] << '\n';
    }
  }
}

}  // namespace pam2d
