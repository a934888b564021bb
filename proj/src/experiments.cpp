#include "pam2d/experiments.hpp"

#include "pam2d/brownian.hpp"
#include "pam2d/chaos.hpp"
#include "pam2d/covariance.hpp"
#include "pam2d/local_time.hpp"
#include "pam2d/noise.hpp"
#include "pam2d/parallel.hpp"
#include "pam2d/pde.hpp"
#include "pam2d/polymer.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/rng.hpp"
#include "pam2d/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace pam2d {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

class Csv {
 public:
  explicit Csv(const std::string& header) {
    out_.precision(17);
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << values, first = false), ...);
    out_ << '\n';
  }
  std::ostringstream& stream() { return out_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string indexed(const std::string& name, std::size_t i) { return name + "[" + std::to_string(i) + "]"; }

bool within_relative(double value, double reference, double tol) {
  return std::abs(value - reference) <= tol * std::abs(reference);
}

bool within_k_se(double value, double reference, double se, double k) {
  return std::abs(value - reference) <= k * se;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Seed streams per study, so that changing one study never shifts another.
enum SeedTag : std::uint64_t {
  kNoiseSeeds = 11,
  kNoiseIncrements = 12,
  kBrownianPaths = 13,
  kBridges = 14,
  kCentering = 21,
  kExponential = 22,
  kRefinement = 23,
  kRefinementBridges = 24,
  kPolymerWeighted = 31,
  kPolymerUnit = 32,
  kChaosEnsemble = 41,
  kHermite = 42,
  kWickEnsemble = 51,
  kMutualA = 61,
  kMutualB = 62,
  kMomentsA = 63,
  kMomentsB = 64,
  kConsistencyA = 65,
  kConsistencyB = 66,
  kFeynmanKac = 71,
  kAnnealedNoise = 72,
  kAnnealedEnsemble = 73,
  kReplicaA = 81,
  kReplicaB = 82,
  kDecayA = 83,
  kDecayB = 84,
};

class Study {
 public:
  Study(const std::string& subcommand, const Config& config)
      : config(config),
        mollifier(profile_from_string(config.text("general", "profile"))),
        master(config.seed("general", "master_seed")),
        guard_ratio(config.real("general", "step_guard_ratio")) {
    result.subcommand = subcommand;
    result.config_hash = config.hash();
    options.small_time_bound = config.real("general", "small_time_bound");
    options.guard_ratio = guard_ratio;
  }

  const Config& config;
  Mollifier mollifier;
  std::uint64_t master;
  double guard_ratio;
  EnsembleOptions options;
  RunResult result;

  std::uint64_t seed(std::uint64_t tag, std::uint64_t index = 0) const {
    return stream_seed(stream_seed(master, tag), index);
  }

  // configured step count, or the smallest admissible one
  Index steps(const std::string& section, const std::string& key, double t, double eps) const {
    const std::int64_t n = config.integer(section, key);
    return n > 0 ? static_cast<Index>(n) : guarded_steps(t, eps, guard_ratio);
  }

  EnsembleOptions unit_options() const {
    EnsembleOptions o = options;
    o.unit_weights = true;
    return o;
  }

  WeightedEnsemble ensemble(double t, double eps, Index paths, Index n_steps, std::uint64_t seed, bool unit = false) {
    WeightedEnsemble e = build_ensemble(mollifier, t, eps, paths, n_steps, seed, unit ? unit_options() : options);
    for (const std::string& w : e.warnings) warn(w);
    return e;
  }

  void lap() { mark_ = Clock::now(); }

  void add(const std::string& metric, double value, double se, double reference, double tolerance,
           const std::string& criterion, bool pass) {
    ResultRecord r;
    r.metric = metric;
    r.value = value;
    r.se = se;
    r.reference = reference;
    r.tolerance = tolerance;
    r.criterion = criterion;
    r.pass = pass && std::isfinite(value) && std::isfinite(se);
    r.wall_time = seconds_since(mark_);
    result.records.push_back(r);
    lap();
  }

  void relative(const std::string& metric, double value, double se, double reference, double tol) {
    add(metric, value, se, reference, tol, "|value - reference| <= tolerance * |reference|",
        within_relative(value, reference, tol));
  }

  void statistical(const std::string& metric, double value, double se, double reference, double k) {
    add(metric, value, se, reference, k, "|value - reference| <= tolerance * se", within_k_se(value, reference, se, k));
  }

  void report(const std::string& metric, double value, double se = 0.0) {
    add(metric, value, se, std::numeric_limits<double>::quiet_NaN(), 0.0, "reported", true);
  }

  void warn(const std::string& w) { result.warnings.push_back(w); }

  void csv(const std::string& name, const Csv& table) { result.csv[name] = table.str(); }

 private:
  Clock::time_point mark_ = Clock::now();
};

// (q_s * phi_delta)(x) by product Gauss-Legendre over the mollifier support.
double smoothed_heat_kernel(const Mollifier& m, double s, double delta, const Point& x) {
  const double r = delta * m.support_radius();
  const double breaks[] = {-r, -0.5 * r, 0.0, 0.5 * r, r};
  return quad::integrate_panels(
      [&](double z1) {
        return quad::integrate_panels(
            [&](double z2) {
              const Point z(z1, z2);
              return m(delta, z) * heat_kernel(s, Point(x - z));
            },
            breaks, 32);
      },
      breaks, 32);
}

// (2 pi)^-2 int |phihat(eps k)|^2 dk: the covariance at the origin by the Fourier route.
double fourier_origin_covariance(const Mollifier& m, double eps) {
  const double panel = 2.0 / eps;
  double sum = 0.0;
  for (int p = 0; p < 100; ++p) {
    sum += quad::integrate(
        [&](double k) {
          const double f = m.fourier(eps * k, 0.0);
          return m.radial() ? k * f * f : f * f;
        },
        panel * p, panel * (p + 1), 16);
  }
  return m.radial() ? sum / (2.0 * kPi) : std::pow(sum / kPi, 2);
}

Eigen::VectorXd mutual_samples(const Mollifier& m, double t, double eps_a, double eps_b, Index pairs, Index steps,
                               std::uint64_t seed_a, std::uint64_t seed_b, double guard_ratio) {
  const Covariance cross(m, eps_a, eps_b);
  Eigen::VectorXd out(pairs);
  parallel_for(pairs, [&](Index i) {
    const BrownianPath a = sample_path(t, steps, stream_seed(seed_a, static_cast<std::uint64_t>(i)));
    const BrownianPath b = sample_path(t, steps, stream_seed(seed_b, static_cast<std::uint64_t>(i)));
    out[i] = mutual_intersection(a, b, cross, guard_ratio);
  });
  return out;
}

RenormFit renorm_fit_from(const Study& s) {
  const std::vector<double> eps = s.config.reals("renorm-fit", "eps");
  const std::vector<double> ts = s.config.reals("renorm-fit", "t_grid");
  return fit_renormalization(s.mollifier, eps, ts);
}

void noise_check(Study& s) {
  const std::string sec = "noise-check";
  const Config& c = s.config;
  const double eps = c.real(sec, "eps"), side = c.real(sec, "side"), h = c.real(sec, "spacing");
  const double offset = c.real(sec, "offset"), k = c.real(sec, "se_tolerance");
  const Index seeds = c.integer(sec, "seeds");
  const Covariance cov(s.mollifier, eps);

  const Point x0(0.5 * side, 0.5 * side);
  const Point x1 = x0 + Point(offset, 0.0);
  Eigen::VectorXd a(seeds), b(seeds);
  parallel_for(seeds, [&](Index i) {
    const NoiseRealization noise = NoiseRealization::sample(side, h, s.seed(kNoiseSeeds, static_cast<std::uint64_t>(i)));
    a[i] = smoothed_value(noise, s.mollifier, eps, x0);
    b[i] = smoothed_value(noise, s.mollifier, eps, x1);
  });
  Csv moments("quantity,value,se,reference");
  const Estimate mean = mean_estimate(a);
  s.statistical("smoothed_noise_mean", mean.value, mean.se, 0.0, k);
  moments.row("mean", mean.value, mean.se, 0.0);
  const Estimate var = mean_estimate(Eigen::VectorXd(a.array().square()));
  const double r0 = torus_covariance(cov, Point::Zero(), side);
  s.statistical("smoothed_noise_variance", var.value, var.se, r0, k);
  moments.row("variance", var.value, var.se, r0);
  const Estimate cross = mean_estimate(Eigen::VectorXd(a.array() * b.array()));
  const double rd = torus_covariance(cov, Point(offset, 0.0), side);
  s.statistical("smoothed_noise_covariance_at_offset", cross.value, cross.se, rd, k);
  moments.row("covariance_at_offset", cross.value, cross.se, rd);

  const double fourier = fourier_origin_covariance(s.mollifier, eps);
  const double ftol = c.real(sec, "fourier_tolerance");
  s.relative("fourier_covariance_at_origin", fourier, 0.0, cov.at_origin(), ftol);
  moments.row("fourier_covariance_at_origin", fourier, 0.0, cov.at_origin());

  // images of the torus must not reach the points used in the studies
  double gap = 0.0;
  const double reach = std::max(0.0, 0.5 * side - cov.range());
  for (int i = 0; i <= 8; ++i) {
    const Point x(reach * i / 8.0, reach * (8 - i) / 16.0);
    gap = std::max(gap, std::abs(torus_covariance(cov, x, side) - cov(x)));
  }
  s.add("periodization_error", gap, 0.0, 0.0, c.real(sec, "periodization_tolerance"), "value <= tolerance",
        gap <= c.real(sec, "periodization_tolerance"));

  const NoiseRealization one = NoiseRealization::sample(side, h, s.seed(kNoiseIncrements));
  const double cells = static_cast<double>(one.increments.size());
  const double centred = one.increments.mean() / h;
  s.add("increment_mean_over_cells", centred, 0.0, 0.0, 4.0 / std::sqrt(cells), "|value| <= tolerance",
        std::abs(centred) <= 4.0 / std::sqrt(cells));

  const double t = c.real(sec, "t");
  const Index paths = c.integer(sec, "paths");
  const Index steps = guarded_steps(t, eps, s.guard_ratio);
  Eigen::MatrixXd stats(paths, 7);
  parallel_for(paths, [&](Index i) {
    const BrownianPath p = sample_path(t, steps, s.seed(kBrownianPaths, static_cast<std::uint64_t>(i)));
    const BrownianPath r = refine_bridge(p, s.seed(kBridges, static_cast<std::uint64_t>(i)));
    const Eigen::Matrix2Xd inc = p.positions.rightCols(steps) - p.positions.leftCols(steps);
    const Eigen::Matrix2Xd mid =
        r.positions(Eigen::all, Eigen::seq(1, 2 * steps - 1, 2)) -
        0.5 * (r.positions(Eigen::all, Eigen::seq(0, 2 * steps - 2, 2)) + r.positions(Eigen::all, Eigen::seq(2, 2 * steps, 2)));
    const BrownianPath back = subsample(r);
    stats(i, 0) = p.end().x();
    stats(i, 1) = p.end().y();
    stats(i, 2) = p.end().squaredNorm();
    stats(i, 3) = inc.row(0).squaredNorm() / static_cast<double>(steps);
    stats(i, 4) = inc.row(1).squaredNorm() / static_cast<double>(steps);
    stats(i, 5) = 0.5 * mid.squaredNorm() / static_cast<double>(steps);
    stats(i, 6) = (back.positions.array() != p.positions.array()).count();
  });
  const double dt = t / static_cast<double>(steps);
  const std::pair<const char*, double> checks[] = {{"brownian_mean_x", 0.0},          {"brownian_mean_y", 0.0},
                                                   {"brownian_second_moment", 2.0 * t}, {"increment_variance_x", dt},
                                                   {"increment_variance_y", dt},      {"bridge_midpoint_variance", dt / 4.0}};
  for (int j = 0; j < 6; ++j) {
    const Estimate e = mean_estimate(Eigen::VectorXd(stats.col(j)));
    const double kk = (j == 3 || j == 4) ? 4.0 : k;
    s.statistical(checks[j].first, e.value, e.se, checks[j].second, kk);
    moments.row(checks[j].first, e.value, e.se, checks[j].second);
  }
  const double mismatches = stats.col(6).sum();
  s.add("bridge_subsample_mismatches", mismatches, 0.0, 0.0, 0.0, "value == reference", mismatches == 0.0);

  Csv profile("r,R_eps_r");
  cov.write_csv(profile.stream(), 401);
  // write_csv emits its own header; keep a single one
  std::string text = profile.str();
  text.erase(0, text.find('\n') + 1);
  s.result.csv["noise_covariance.csv"] = text;
  s.csv("noise_moments.csv", moments);
}

void silt_study(Study& s) {
  const std::string sec = "silt-study";
  const Config& c = s.config;
  const double t = c.real(sec, "t"), k = c.real(sec, "se_tolerance");

  Csv gamma("eps,n_steps,paths,mean,se");
  const Index paths = c.integer(sec, "paths");
  for (double eps : c.reals(sec, "eps")) {
    const Index steps = s.steps(sec, "steps", t, eps);
    const Covariance cov(s.mollifier, eps);
    mean_self_intersection(cov, t, steps);
    Eigen::VectorXd g(paths);
    parallel_for(paths, [&](Index i) {
      g[i] = gamma_eps(sample_path(t, steps, s.seed(kCentering, static_cast<std::uint64_t>(i))), cov, s.guard_ratio);
    });
    const Estimate e = mean_estimate(g);
    std::ostringstream name;
    name << "centering_mean[eps=" << eps << "]";
    s.statistical(name.str(), e.value, e.se, 0.0, k);
    gamma.row(eps, steps, paths, e.value, e.se);
  }
  s.csv("silt_gamma.csv", gamma);

  Csv exponential("eps,n_steps,paths,exp_gamma_mean,se,ess,ess_fraction");
  const Index exp_paths = c.integer(sec, "exp_paths");
  const double ess_fraction = c.real(sec, "ess_fraction");
  std::vector<double> means;
  double se_sum = 0.0;
  bool ess_ok = true;
  double worst_ess = 1.0;
  for (double eps : c.reals(sec, "exp_eps")) {
    const Index steps = s.steps(sec, "steps", t, eps);
    const WeightedEnsemble e = s.ensemble(t, eps, exp_paths, steps, s.seed(kExponential));
    const double mean = std::exp(e.f_hat);
    const double fraction = e.ess / static_cast<double>(exp_paths);
    means.push_back(mean);
    se_sum += mean * e.se_f;
    ess_ok = ess_ok && fraction >= ess_fraction;
    worst_ess = std::min(worst_ess, fraction);
    exponential.row(eps, steps, exp_paths, mean, mean * e.se_f, e.ess, fraction);
  }
  s.csv("silt_exponential.csv", exponential);
  const double hi = *std::max_element(means.begin(), means.end());
  const double lo = *std::min_element(means.begin(), means.end());
  const double centre = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
  const double spread = (hi - lo) / centre;
  s.add("exp_integrability_spread", spread, se_sum / static_cast<double>(means.size()) / centre, 0.0,
        c.real(sec, "spread_tolerance"), "(max - min) / mean <= tolerance", spread <= c.real(sec, "spread_tolerance"));
  s.add("exp_integrability_min_ess_fraction", worst_ess, 0.0, ess_fraction, ess_fraction, "value >= reference",
        ess_ok);

  // Cauchy in resolution: the change of gamma under bridge refinement shrinks
  const std::vector<double> eps_list = c.reals(sec, "eps");
  const double eps = *std::min_element(eps_list.begin(), eps_list.end());
  const Covariance cov(s.mollifier, eps);
  const Index refine_paths = c.integer(sec, "refine_paths");
  const auto levels = static_cast<int>(c.integer(sec, "refine_levels"));
  const Index base = s.steps(sec, "steps", t, eps);
  for (int l = 0; l <= levels; ++l) mean_self_intersection(cov, t, base << l);
  Eigen::MatrixXd diff(refine_paths, levels);
  parallel_for(refine_paths, [&](Index i) {
    BrownianPath p = sample_path(t, base, s.seed(kRefinement, static_cast<std::uint64_t>(i)));
    double previous = gamma_eps(p, cov, s.guard_ratio);
    for (int l = 0; l < levels; ++l) {
      p = refine_bridge(p, s.seed(kRefinementBridges, static_cast<std::uint64_t>(i * levels + l)));
      const double next = gamma_eps(p, cov, s.guard_ratio);
      diff(i, l) = next - previous;
      previous = next;
    }
  });
  Csv refinement("level,n_steps,rms_difference");
  std::vector<double> rms;
  for (int l = 0; l < levels; ++l) {
    const Estimate e = mean_estimate(Eigen::VectorXd(diff.col(l).array().square()));
    rms.push_back(std::sqrt(e.value));
    refinement.row(l + 1, base << (l + 1), rms.back());
  }
  s.csv("silt_refinement.csv", refinement);
  s.add("refinement_rms_decreasing", rms.back(), 0.0, rms.front(), 0.0, "rms difference strictly decreasing",
        strictly_decreasing(rms));
}

void renorm_study(Study& s) {
  const Config& c = s.config;
  const RenormFit fit = renorm_fit_from(s);
  for (const std::string& w : fit.warnings) s.warn(w);
  s.relative("renorm_mu2", fit.mu2, 0.0, 1.0 / (2.0 * kPi), c.real("renorm-fit", "mu2_tolerance"));
  const std::vector<double> r = fit.remainder_magnitude();
  s.add("remainder_magnitude_decreasing", r.back(), 0.0, r.front(), 0.0, "max_t |r_eps| strictly decreasing in eps",
        strictly_decreasing(r));
  s.add("renorm_fit_residual", fit.residual, 0.0, 0.0, fit.tolerance, "value <= tolerance",
        fit.residual <= fit.tolerance);
  s.report("renorm_mu1", fit.mu1);
  s.report("renorm_log_slope_finest", fit.log_slope.back());

  std::ostringstream ledger;
  write_ledger_csv(ledger, fit.ledger);
  s.result.csv["renorm_ledger.csv"] = ledger.str();
  Csv limit("t,limit,model,log_slope");
  for (std::size_t j = 0; j < fit.t_grid.size(); ++j) {
    const double t = fit.t_grid[j];
    limit.row(t, fit.limit[j], t * (fit.mu1 + fit.mu2 * std::log(t)), fit.log_slope[j]);
  }
  s.csv("renorm_fit.csv", limit);
  Csv remainder("eps,max_abs_r_eps");
  for (std::size_t i = 0; i < r.size(); ++i) remainder.row(fit.eps[i], r[i]);
  s.csv("renorm_remainder.csv", remainder);
}

void polymer_study(Study& s) {
  const std::string sec = "polymer-density";
  const Config& c = s.config;
  const double t = c.real(sec, "t"), eps = c.real(sec, "eps_gamma"), delta = c.real(sec, "delta");
  const Index steps = s.steps(sec, "steps", t, eps);
  const std::vector<double> times = c.reals(sec, "times");

  const WeightedEnsemble weighted = s.ensemble(t, eps, c.integer(sec, "paths"), steps, s.seed(kPolymerWeighted));
  s.report("polymer_log_mean_weight", weighted.f_hat, weighted.se_f);
  s.report("polymer_ess", weighted.ess);
  const EvalGrid grid = EvalGrid::centred(Point::Zero(), c.real(sec, "grid_side"), c.integer(sec, "grid_cells"));
  const DensityGrid density = density_estimate(weighted, s.mollifier, times, delta, grid);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::ostringstream name;
    name << "density_mass[s=" << times[k] << "]";
    s.relative(name.str(), density.mass(k), 0.0, 1.0, c.real(sec, "mass_tolerance"));
  }
  std::ostringstream grid_csv;
  write_density_csv(grid_csv, density);
  s.result.csv["polymer_density.csv"] = grid_csv.str();

  const WeightedEnsemble unit = s.ensemble(t, eps, c.integer(sec, "unit_paths"), steps, s.seed(kPolymerUnit), true);
  const double last = times.back();
  const double at_time[] = {last};
  Csv checks("x,y,s,estimate,se,smoothed_heat_kernel");
  const std::vector<PointSet> points = c.tuples(sec, "check_points", 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Estimate e = density_at(unit, s.mollifier, at_time, points[i], delta);
    const double oracle = smoothed_heat_kernel(s.mollifier, last, delta, points[i].col(0));
    s.statistical(indexed("unweighted_density", i), e.value, e.se, oracle, c.real(sec, "se_tolerance"));
    checks.row(points[i](0, 0), points[i](1, 0), last, e.value, e.se, oracle);
  }
  s.csv("polymer_checks.csv", checks);
}

CellFunction hermite_test_function() {
  CellFunction h;
  h.cell_area = 0.25;
  h.values = Eigen::Vector4d(1.0, 1.0, -1.0, 1.0);
  return h;
}

void chaos_study(Study& s) {
  const std::string sec = "chaos-coeffs";
  const Config& c = s.config;
  const double t = c.real(sec, "t"), eps = c.real(sec, "eps");
  const Index steps = s.steps(sec, "steps", t, eps);
  const std::vector<double> xv = c.reals(sec, "x");
  require(xv.size() == 2, sec + ".x must have two coordinates");
  const Point x(xv[0], xv[1]);
  const InitialCondition one = InitialCondition::constant(1.0);

  const RenormFit fit = renorm_fit_from(s);
  const RenormLedger ledger = make_ledger(Covariance(s.mollifier, eps), t, fit.mu1, fit.mu2, steps);
  const WeightedEnsemble e = s.ensemble(t, eps, c.integer(sec, "paths"), steps, s.seed(kChaosEnsemble));

  std::vector<ChaosCoefficient> rows;
  const std::vector<PointSet> none{PointSet(2, 0)};
  rows.push_back(chaos_coeff_mc(0, x, none, e, ledger, s.mollifier, one, Variant::stratonovich));
  const double identity = std::exp(ledger.log_prefactor() + e.f_hat);
  s.relative("f0_prefactor_identity", rows[0].values[0], rows[0].ses[0], identity, 1e-10);
  for (int n = 1; n <= 3; ++n) {
    const std::vector<PointSet> points = c.tuples(sec, "points" + std::to_string(n), n);
    if (points.empty()) continue;
    rows.push_back(chaos_coeff_mc(n, x, points, e, ledger, s.mollifier, one, Variant::stratonovich));
    for (Index j = 0; j < rows.back().values.size(); ++j)
      s.report(indexed("f" + std::to_string(n), static_cast<std::size_t>(j)), rows.back().values[j],
               rows.back().ses[j]);
  }
  std::ostringstream coeffs;
  write_coefficients_csv(coeffs, rows);
  s.result.csv["chaos_coefficients.csv"] = coeffs.str();

  const CellFunction h = hermite_test_function();
  const Index samples = c.integer(sec, "hermite_samples");
  const double k = c.real(sec, "hermite_se_tolerance");
  const auto orders = static_cast<int>(c.integer(sec, "hermite_max_order"));
  Csv hermite("n,m,moment,se,target");
  for (int n = 1; n <= orders; ++n) {
    s.lap();
    const IsometryReport r = hermite_isometry_check(n, h, samples, s.seed(kHermite, static_cast<std::uint64_t>(n)), orders);
    s.statistical("hermite_isometry[n=" + std::to_string(n) + "]", r.second_moment.value, r.second_moment.se,
                  factorial(n), k);
    hermite.row(n, n, r.second_moment.value, r.second_moment.se, factorial(n));
    bool orthogonal = true;
    double worst = 0.0;
    for (std::size_t j = 0; j < r.other_orders.size(); ++j) {
      const Estimate& m = r.cross_moments[j];
      orthogonal = orthogonal && within_k_se(m.value, 0.0, m.se, k);
      worst = std::max(worst, std::abs(m.value) / m.se);
      hermite.row(n, r.other_orders[j], m.value, m.se, 0.0);
    }
    s.add("hermite_orthogonality[n=" + std::to_string(n) + "]", worst, 0.0, 0.0, k,
          "max over m != n of |E[H_n H_m]| / se <= tolerance", orthogonal);
  }
  s.csv("chaos_hermite.csv", hermite);
}

void wick_study(Study& s) {
  const std::string sec = "wick-check";
  const Config& c = s.config;
  const double t = c.real(sec, "t"), eps = c.real(sec, "eps"), k = c.real(sec, "se_tolerance");
  const Index steps = s.steps(sec, "steps", t, eps);
  const std::vector<double> xv = c.reals(sec, "x");
  require(xv.size() == 2, sec + ".x must have two coordinates");
  const Point x(xv[0], xv[1]);
  const InitialCondition one = InitialCondition::constant(1.0);

  const RenormLedger ledger = make_ledger(Covariance(s.mollifier, eps), t, 0.0, 0.0, steps);
  const WeightedEnsemble e = s.ensemble(t, eps, c.integer(sec, "paths"), steps, s.seed(kWickEnsemble), true);

  Csv table("n,tuple,y1_1,y1_2,y2_1,y2_2,mc,se,analytic");
  auto compare = [&](int n, const std::vector<PointSet>& tuples) {
    const ChaosCoefficient mc = chaos_coeff_mc(n, x, tuples, e, ledger, s.mollifier, one, Variant::wick);
    for (std::size_t j = 0; j < tuples.size(); ++j) {
      const std::optional<double> exact = wick_coeff_analytic(n, t, x, tuples[j], one);
      const auto ji = static_cast<Index>(j);
      const std::string name = n == 0 ? std::string("wick_f0") : indexed("wick_f" + std::to_string(n), j);
      if (!exact) {
        s.warn(name + ": evaluation tuple hits the diagonal, no analytic value");
        s.add(name, mc.values[ji], mc.ses[ji], std::numeric_limits<double>::quiet_NaN(), k,
              "|value - reference| <= tolerance * se", false);
        continue;
      }
      s.statistical(name, mc.values[ji], mc.ses[ji], *exact, k);
      std::ostringstream cells;
      cells.precision(17);
      for (int p = 0; p < 2; ++p) {
        if (p < n)
          cells << tuples[j](0, p) << ',' << tuples[j](1, p) << ',';
        else
          cells << ",,";
      }
      table.stream() << n << ',' << j << ',' << cells.str() << mc.values[ji] << ',' << mc.ses[ji] << ',' << *exact
                     << '\n';
    }
  };
  compare(0, {PointSet(2, 0)});
  compare(1, c.tuples(sec, "points1", 1));
  compare(2, c.tuples(sec, "points2", 2));
  s.csv("wick_coefficients.csv", table);

  // int f_1(y) dy = t by midpoint quadrature on a square around x
  const double side = c.real(sec, "integral_side");
  const Index cells = c.integer(sec, "integral_cells");
  const double h = side / static_cast<double>(cells);
  Eigen::VectorXd columns(cells);
  parallel_for(cells, [&](Index i) {
    double sum = 0.0;
    for (Index j = 0; j < cells; ++j) {
      PointSet y(2, 1);
      y.col(0) = x + Point(-0.5 * side + (i + 0.5) * h, -0.5 * side + (j + 0.5) * h);
      sum += wick_coeff_analytic(1, t, x, y, one).value_or(0.0);
    }
    columns[i] = sum * h * h;
  });
  s.relative("wick_f1_integral", pairwise_sum(columns), 0.0, t, c.real(sec, "integral_tolerance"));
}

void moments_study(Study& s) {
  const std::string sec = "moments-study";
  const Config& c = s.config;

  const double tm = c.real(sec, "mutual_t"), em = c.real(sec, "mutual_eps");
  const Index mutual_pairs = c.integer(sec, "mutual_pairs");
  const Index mutual_steps = s.steps(sec, "mutual_steps", tm, em);
  const Eigen::VectorXd mutual = mutual_samples(s.mollifier, tm, em, em, mutual_pairs, mutual_steps,
                                                s.seed(kMutualA), s.seed(kMutualB), s.guard_ratio);
  const Estimate mm = mean_estimate(mutual);
  const double oracle = tm * std::log(2.0) / kPi;
  s.relative("mutual_intersection_mean", mm.value, mm.se, oracle, c.real(sec, "mutual_tolerance"));
  Csv mutual_csv("t,eps,n_steps,pairs,mean,se,oracle");
  mutual_csv.row(tm, em, mutual_steps, mutual_pairs, mm.value, mm.se, oracle);
  s.csv("moments_mutual.csv", mutual_csv);

  const double t = c.real(sec, "t"), eps = c.real(sec, "eps");
  const std::vector<double> cons = c.reals(sec, "consistency_eps");
  const double finest = 0.5 * std::min(eps, *std::min_element(cons.begin(), cons.end()));
  const Index pairs = c.integer(sec, "pairs");
  const Index steps = s.steps(sec, "steps", t, finest);
  const Eigen::VectorXd m = mutual_samples(s.mollifier, t, eps, eps, pairs, steps, s.seed(kMomentsA),
                                           s.seed(kMomentsB), s.guard_ratio);
  const auto orders = static_cast<int>(c.integer(sec, "max_order"));
  Csv moments("n,moment,se,upper,c_n");
  double c_hat = 0.0;
  bool resolved = true;
  std::vector<double> cn;
  for (int n = 1; n <= orders; ++n) {
    const Estimate e = mean_estimate(Eigen::VectorXd(m.array().pow(n)));
    // conservative: the constant must cover the upper confidence bound of every moment
    const double upper = e.value + c.real(sec, "se_tolerance") * e.se;
    cn.push_back(std::pow(upper / factorial(n), 1.0 / n) / t);
    c_hat = std::max(c_hat, cn.back());
    resolved = resolved && e.value > 0.0 && e.se < e.value;
    moments.row(n, e.value, e.se, upper, cn.back());
  }
  s.csv("moments_study.csv", moments);
  s.add("moment_bound_constant", c_hat, 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0,
        "finite constant with E[M^n] + k se <= n! (C t)^n for all n, every moment resolved", resolved && c_hat > 0.0);
  s.report("moment_constant_growth", cn.back() / cn.front());
  const Estimate m1 = mean_estimate(m);
  s.report("mutual_mean_over_t", m1.value / t, m1.se / t);

  // exact symmetry under swapping the scales, and L2 convergence as eps halves
  const Index cpairs = c.integer(sec, "consistency_pairs");
  Csv consistency("eps,rms_difference,max_swap_asymmetry");
  std::vector<double> rms;
  double asym = 0.0;
  for (double e : cons) {
    const Eigen::VectorXd coarse = mutual_samples(s.mollifier, t, e, e, cpairs, steps, s.seed(kConsistencyA),
                                                  s.seed(kConsistencyB), s.guard_ratio);
    const Eigen::VectorXd fine = mutual_samples(s.mollifier, t, 0.5 * e, 0.5 * e, cpairs, steps,
                                                s.seed(kConsistencyA), s.seed(kConsistencyB), s.guard_ratio);
    const Eigen::VectorXd mixed = mutual_samples(s.mollifier, t, e, 0.5 * e, cpairs, steps, s.seed(kConsistencyA),
                                                 s.seed(kConsistencyB), s.guard_ratio);
    const Eigen::VectorXd swapped = mutual_samples(s.mollifier, t, 0.5 * e, e, cpairs, steps,
                                                   s.seed(kConsistencyB), s.seed(kConsistencyA), s.guard_ratio);
    const double a = ((mixed - swapped).array().abs() / mixed.array().abs().max(1e-300)).maxCoeff();
    asym = std::max(asym, a);
    rms.push_back(std::sqrt((coarse - fine).squaredNorm() / static_cast<double>(cpairs)));
    consistency.row(e, rms.back(), a);
  }
  s.csv("moments_consistency.csv", consistency);
  s.add("mutual_swap_symmetry", asym, 0.0, 0.0, 1e-12, "value <= tolerance", asym <= 1e-12);
  s.add("mutual_l2_convergence", rms.back(), 0.0, rms.front(), 0.0, "rms difference strictly decreasing",
        strictly_decreasing(rms));
}

void fk_study(Study& s) {
  const std::string sec = "fk-vs-pde";
  const Config& c = s.config;
  const double eps = c.real(sec, "eps"), t = c.real(sec, "t"), side = c.real(sec, "side"), h = c.real(sec, "spacing");
  const InitialCondition one = InitialCondition::constant(1.0);
  PdeOptions pde;
  pde.scheme = scheme_from_string(c.text(sec, "scheme"));

  const NoiseRealization noise = NoiseRealization::sample(side, h, c.seed(sec, "noise_seed"));
  const PeriodicField w = smoothed_field(noise, s.mollifier, eps);
  const double vmax = (w.values - renormalization_constant(eps)).abs().maxCoeff();
  const double dt = c.real(sec, "dt") > 0.0 ? c.real(sec, "dt") : max_stable_dt(h, vmax, pde.potential_resolution);
  const GridSolution sol = solve_pam(noise, s.mollifier, eps, sample_on_grid(one, side, h), t, dt, pde);
  if (sol.min_value < 0.0) s.warn("PDE solution became negative (min " + std::to_string(sol.min_value) + ")");
  s.report("pde_time_step", sol.dt);
  std::ostringstream field;
  sol.write_csv(field);
  s.result.csv["fk_pde_solution.csv"] = field.str();

  const Index grid = c.integer(sec, "sample_grid");
  PointSet xs(2, grid * grid);
  for (Index j = 0; j < grid; ++j)
    for (Index i = 0; i < grid; ++i)
      xs.col(j * grid + i) = Point((i + 0.5) * side / grid, (j + 0.5) * side / grid);
  const Index steps = s.steps(sec, "steps", t, eps);
  s.lap();
  const std::vector<Estimate> fk = feynman_kac_points(noise, s.mollifier, eps, one, t, xs, c.integer(sec, "paths"),
                                                      steps, s.seed(kFeynmanKac), s.guard_ratio);
  const PeriodicField u = sol.field();
  Csv table("x,y,pde,fk,fk_se,relative_error");
  for (Index p = 0; p < xs.cols(); ++p) {
    const double reference = u(Point(xs.col(p)));
    const Estimate& e = fk[static_cast<std::size_t>(p)];
    s.relative(indexed("fk_vs_pde", static_cast<std::size_t>(p)), e.value, e.se, reference,
               c.real(sec, "relative_tolerance"));
    table.row(xs(0, p), xs(1, p), reference, e.value, e.se, (e.value - reference) / reference);
  }
  s.csv("fk_vs_pde.csv", table);

  const Index seeds = c.integer(sec, "annealed_seeds");
  if (seeds == 0) return;
  const double ta = c.real(sec, "annealed_t"), la = c.real(sec, "annealed_side");
  Csv annealed("eps,seeds,pde_mean,pde_se,ensemble,ensemble_se");
  for (double e : c.reals(sec, "annealed_eps")) {
    s.lap();
    const double ha = e / 8.0;
    Eigen::VectorXd means(seeds);
    parallel_for(seeds, [&](Index i) {
      const NoiseRealization n = NoiseRealization::sample(la, ha, s.seed(kAnnealedNoise, static_cast<std::uint64_t>(i)));
      const PeriodicField wa = smoothed_field(n, s.mollifier, e);
      const double va = (wa.values - renormalization_constant(e)).abs().maxCoeff();
      const GridSolution g = solve_pam(n, s.mollifier, e, sample_on_grid(one, la, ha), ta,
                                       max_stable_dt(ha, va, pde.potential_resolution), pde);
      means[i] = g.values.mean();
    });
    const Estimate pde_mean = mean_estimate(means);
    const Index st = guarded_steps(ta, e, s.guard_ratio);
    const RenormLedger ledger = make_ledger(Covariance(s.mollifier, e), ta, 0.0, 0.0, st);
    const WeightedEnsemble ens = s.ensemble(ta, e, c.integer(sec, "annealed_paths"), st, s.seed(kAnnealedEnsemble));
    const double value = std::exp(ledger.log_prefactor() + ens.f_hat);
    const double se = value * ens.se_f;
    std::ostringstream name;
    name << "annealed_mean[eps=" << e << "]";
    s.add(name.str(), pde_mean.value, pde_mean.se, value, c.real(sec, "se_tolerance"),
          "|value - reference| <= tolerance * sqrt(se^2 + se_reference^2)",
          within_se(pde_mean.value, value, pde_mean.se, se, c.real(sec, "se_tolerance")));
    annealed.row(e, seeds, pde_mean.value, pde_mean.se, value, se);
  }
  s.csv("fk_annealed.csv", annealed);
}

void truncation_study(Study& s) {
  const std::string sec = "truncation-study";
  const Config& c = s.config;
  const double t = c.real(sec, "t"), eps = c.real(sec, "eps");
  const Index steps = s.steps(sec, "steps", t, eps);
  const std::vector<double> xv = c.reals(sec, "x");
  require(xv.size() == 2, sec + ".x must have two coordinates");
  const Point x(xv[0], xv[1]);
  const InitialCondition one = InitialCondition::constant(1.0);
  const RenormFit fit = renorm_fit_from(s);

  const Index pairs = c.integer(sec, "pairs");
  const RenormLedger ledger = make_ledger(Covariance(s.mollifier, eps), t, fit.mu1, fit.mu2, steps);
  s.lap();
  const WeightedEnsemble a = s.ensemble(t, eps, pairs, steps, s.seed(kReplicaA));
  const WeightedEnsemble b = s.ensemble(t, eps, pairs, steps, s.seed(kReplicaB));
  const auto order = static_cast<int>(c.integer(sec, "max_order"));
  const TruncationReport r = truncated_second_moment(order, a, b, ledger, s.mollifier, one, x);
  const Estimate& last = r.partial_sums.back();
  s.relative("truncated_second_moment", last.value, last.se, r.target.value, c.real(sec, "relative_tolerance"));
  s.add("partial_sums_nondecreasing", static_cast<double>(r.partial_sums.size()), 0.0, 0.0, 0.0,
        "partial sums nondecreasing in N", r.nondecreasing);
  s.report("second_moment_target", r.target.value, r.target.se);
  Csv table("n,term,term_se,partial_sum,partial_sum_se,target,target_se");
  for (int n = 0; n <= order; ++n) {
    const Estimate& term = r.terms[static_cast<std::size_t>(n)];
    const Estimate& sum = r.partial_sums[static_cast<std::size_t>(n)];
    table.row(n, term.value, term.se, sum.value, sum.se, r.target.value, r.target.se);
  }
  s.csv("truncation.csv", table);

  // decay of n! ||f_n||^2 against the (C t)^n / n! shape
  Csv decay("t,n,norm,se,ratio");
  const Index dpairs = c.integer(sec, "decay_pairs");
  const auto dmax = static_cast<int>(c.integer(sec, "decay_max_order"));
  for (double td : c.reals(sec, "decay_t")) {
    s.lap();
    const Index st = s.steps(sec, "steps", td, eps);
    const RenormLedger l = make_ledger(Covariance(s.mollifier, eps), td, fit.mu1, fit.mu2, st);
    const WeightedEnsemble da = s.ensemble(td, eps, dpairs, st, s.seed(kDecayA));
    const WeightedEnsemble db = s.ensemble(td, eps, dpairs, st, s.seed(kDecayB));
    const ReplicaPairs rp = replica_pairs(da, db, l, s.mollifier, one, x, Variant::stratonovich);
    std::vector<double> ratios;
    double c_hat = 0.0, previous = 0.0;
    for (int n = 0; n <= dmax; ++n) {
      const Estimate e = coeff_norm_estimate(n, rp);
      const double ratio = n == 0 ? std::numeric_limits<double>::quiet_NaN() : e.value / previous;
      if (n > 0) {
        ratios.push_back(ratio);
        const double scaled = e.value / coeff_norm_estimate(0, rp).value * factorial(n);
        c_hat = std::max(c_hat, std::pow(scaled, 1.0 / n) / td);
      }
      decay.row(td, n, e.value, e.se, ratio);
      previous = e.value;
    }
    std::ostringstream name;
    name << "[t=" << td << "]";
    s.report("decay_constant" + name.str(), c_hat);
    double bound = 0.0;
    for (double q : ratios) bound = std::max(bound, q);
    s.add("decay_ratio_bound" + name.str(), bound, 0.0, c_hat * td, 0.0, "max_n r_n <= C t with the fitted C",
          bound <= c_hat * td);
  }
  s.csv("truncation_decay.csv", decay);
}

const std::vector<std::pair<std::string, std::function<void(Study&)>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<void(Study&)>>> table = {
      {"noise-check", noise_check},         {"silt-study", silt_study},   {"renorm-fit", renorm_study},
      {"polymer-density", polymer_study},   {"chaos-coeffs", chaos_study}, {"wick-check", wick_study},
      {"moments-study", moments_study},     {"fk-vs-pde", fk_study},     {"truncation-study", truncation_study},
  };
  return table;
}

}  // namespace

bool RunResult::passed() const {
  return std::all_of(records.begin(), records.end(), [](const ResultRecord& r) { return r.pass; });
}

const ResultRecord& RunResult::record(const std::string& metric) const {
  for (const ResultRecord& r : records)
    if (r.metric == metric) return r;
  throw InvalidParameter("no record named " + metric);
}

std::string RunResult::summary_json(const Config& config) const {
  nlohmann::ordered_json doc;
  doc["experiment"] = subcommand;
  doc["config_hash"] = config_hash;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [section, keys] : config.values())
    for (const auto& [key, value] : keys) cfg[section][key] = value;
  doc["config"] = cfg;
  doc["config_canonical"] = config.canonical();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ResultRecord& r : records) {
    nlohmann::ordered_json row;
    row["experiment"] = subcommand;
    row["config_hash"] = config_hash;
    row["metric"] = r.metric;
    row["value"] = r.value;
    row["se"] = r.se;
    row["reference"] = r.reference;
    row["tolerance"] = r.tolerance;
    row["criterion"] = r.criterion;
    row["pass"] = r.pass;
    row["wall_time"] = r.wall_time;
    rows.push_back(row);
  }
  doc["records"] = rows;
  doc["warnings"] = warnings;
  doc["files"] = nlohmann::ordered_json::array();
  for (const auto& [name, body] : csv) doc["files"].push_back(name);
  doc["pass"] = passed();
  doc["wall_time"] = wall_time;
  return doc.dump(2) + "\n";
}

void RunResult::write(const std::filesystem::path& dir, const Config& config) const {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  };
  for (const auto& [name, body] : csv) put(name, body);
  std::string stem = subcommand;
  std::replace(stem.begin(), stem.end(), '-', '_');
  put(stem + "_summary.json", summary_json(config));
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& entry : registry()) out.push_back(entry.first);
    return out;
  }();
  return names;
}

bool is_subcommand(const std::string& name) {
  const auto& names = subcommand_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

RunResult run_experiment(const std::string& subcommand, const Config& config) {
  if (!is_subcommand(subcommand)) throw InvalidParameter("unknown subcommand '" + subcommand + "'");
  const GuardReport guards = check_guards(config, subcommand);
  if (!guards.ok()) {
    std::string msg = "guard violation:";
    for (const std::string& v : guards.violations) msg += "\n  " + v;
    throw ConfigurationError(msg);
  }
  const auto start = Clock::now();
  Study study(subcommand, config);
  study.result.warnings = guards.warnings;
  for (const auto& [name, body] : registry())
    if (name == subcommand) body(study);
  study.result.wall_time = seconds_since(start);
  return study.result;
}

std::string format_guard_report(const GuardReport& report) {
  std::ostringstream out;
  for (const std::string& p : report.passed) out << "ok        " << p << '\n';
  for (const std::string& w : report.warnings) out << "warning   " << w << '\n';
  for (const std::string& v : report.violations) out << "VIOLATION " << v << '\n';
  out << (report.ok() ? "all guards pass" : std::to_string(report.violations.size()) + " guard violation(s)") << '\n';
  return out.str();
}

}  // namespace pam2d
