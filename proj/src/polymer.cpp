#include "pam2d/polymer.hpp"

#include "pam2d/pair_sum.hpp"
#include "pam2d/rng.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace pam2d {

BrownianPath WeightedEnsemble::path(Index i) const {
  require(i >= 0 && i < size(), "path index out of range");
  if (!paths.empty()) return paths[static_cast<std::size_t>(i)];
  return sample_path(t, n_steps, stream_seed(master_seed, static_cast<std::uint64_t>(i)));
}

Eigen::VectorXd WeightedEnsemble::scaled_weights() const { return (log_weights.array() - max_log_weight).exp().matrix(); }

Eigen::VectorXd WeightedEnsemble::normalized_weights() const {
  Eigen::VectorXd w = scaled_weights();
  return w / pairwise_sum(w);
}

Estimate log_mean_exp(std::span<const double> log_weights) {
  require(!log_weights.empty(), "empty ensemble");
  double top = log_weights[0];
  for (double v : log_weights) top = std::max(top, v);
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_weights[i] - top);
  const Estimate mean = mean_estimate(w);
  return {top + std::log(mean.value), mean.se / mean.value};
}

WeightedEnsemble build_ensemble(const Mollifier& mollifier, double t, double eps_gamma, Index n_paths, Index n_steps,
                                std::uint64_t master_seed, const EnsembleOptions& options) {
  require(t > 0.0 && eps_gamma > 0.0, "ensemble time and scale must be positive");
  require(n_paths >= 1 && n_steps >= 1, "ensemble needs at least one path and one step");
  if (t > options.small_time_bound) {
    std::ostringstream msg;
    msg << "t=" << t << " exceeds the small-time bound " << options.small_time_bound;
    throw ConfigurationError(msg.str());
  }
  WeightedEnsemble e;
  e.t = t;
  e.eps_gamma = eps_gamma;
  e.n_steps = n_steps;
  e.master_seed = master_seed;
  e.unit_weights = options.unit_weights;
  e.log_weights = Eigen::VectorXd::Zero(n_paths);
  if (options.keep_paths) e.paths.resize(static_cast<std::size_t>(n_paths));

  const Covariance cov(mollifier, eps_gamma);
  double centre = 0.0;
  if (!options.unit_weights) {
    check_step_guard(t / static_cast<double>(n_steps), eps_gamma, options.guard_ratio);
    centre = mean_self_intersection(cov, t, n_steps);
  }
  parallel_for(n_paths, [&](Index i) {
    BrownianPath path = sample_path(t, n_steps, stream_seed(master_seed, static_cast<std::uint64_t>(i)));
    if (!options.unit_weights) e.log_weights[i] = self_intersection_raw(path, cov, options.guard_ratio) - centre;
    if (options.keep_paths) e.paths[static_cast<std::size_t>(i)] = std::move(path);
  });

  const std::span<const double> lw(e.log_weights.data(), static_cast<std::size_t>(n_paths));
  const Estimate f = log_mean_exp(lw);
  e.f_hat = f.value;
  e.se_f = f.se;
  e.max_log_weight = e.log_weights.maxCoeff();
  const Eigen::VectorXd w = e.scaled_weights();
  const double sum = pairwise_sum(w);
  const Eigen::VectorXd w2 = w.array().square().matrix();
  e.ess = sum * sum / pairwise_sum(w2);
  if (e.ess < 0.01 * static_cast<double>(n_paths)) {
    std::ostringstream msg;
    msg << "weight degeneracy: ess=" << e.ess << " below 1% of " << n_paths << " paths";
    e.warnings.push_back(msg.str());
  }
  return e;
}

Estimate tilted_expectation(const WeightedEnsemble& ensemble, std::span<const double> values) {
  require(static_cast<Index>(values.size()) == ensemble.size(), "one value per path required");
  const Eigen::VectorXd w = ensemble.scaled_weights();
  return self_normalized_mean(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), values);
}

EvalGrid EvalGrid::centred(const Point& centre, double side, Index cells) {
  require(side > 0.0 && cells >= 1, "grid side and cell count must be positive");
  EvalGrid g;
  g.spacing = side / static_cast<double>(cells);
  g.cells = cells;
  g.origin = centre - Point(0.5 * side, 0.5 * side);
  return g;
}

double DensityGrid::mass(std::size_t k) const { return value.at(k).sum() * grid.spacing * grid.spacing; }

namespace {

void check_times(const WeightedEnsemble& e, std::span<const double> times) {
  require(!times.empty(), "at least one time required");
  for (double s : times) require(s > 0.0 && s <= e.t, "density times must lie in (0, t]");
}

}  // namespace

DensityGrid density_estimate(const WeightedEnsemble& ensemble, const Mollifier& mollifier,
                             std::span<const double> times, double delta, const EvalGrid& grid) {
  check_times(ensemble, times);
  require(delta > 0.0, "smoothing scale must be positive");
  require(grid.cells >= 1 && grid.spacing > 0.0, "empty evaluation grid");
  const Index n = ensemble.size();
  const Eigen::VectorXd w = ensemble.normalized_weights();
  const double w2_total = pairwise_sum(Eigen::VectorXd(w.array().square().matrix()));

  DensityGrid out;
  out.times.assign(times.begin(), times.end());
  out.delta = delta;
  out.grid = grid;
  std::vector<PointSet> positions(times.size(), PointSet(2, n));
  parallel_for(n, [&](Index i) {
    const BrownianPath p = ensemble.path(i);
    for (std::size_t k = 0; k < times.size(); ++k) positions[k].col(i) = p.at_time(times[k]);
  });
  for (const PointSet& pos : positions) {
    const detail::CellGrid cells(pos, delta * mollifier.support_radius());
    Field value(grid.cells, grid.cells), se(grid.cells, grid.cells);
    parallel_for(grid.cells * grid.cells, [&](Index c) {
      const Index i = c % grid.cells, j = c / grid.cells;
      const Point x = grid.point(i, j);
      double a = 0.0, b = 0.0, q = 0.0;
      cells.for_each_near(x.x(), x.y(), [&](Index id, double dx, double dy) {
        const double k = mollifier(delta, Point(dx, dy));
        if (k == 0.0) return;
        const double wk = w[id] * k;
        a += wk;
        b += w[id] * wk;
        q += wk * wk;
      });
      value(i, j) = a;
      se(i, j) = std::sqrt(std::max(0.0, q - 2.0 * a * b + a * a * w2_total));
    });
    out.value.push_back(std::move(value));
    out.se.push_back(std::move(se));
  }
  return out;
}

Estimate density_at(const WeightedEnsemble& ensemble, const Mollifier& mollifier, std::span<const double> times,
                    const PointSet& points, double delta) {
  check_times(ensemble, times);
  require(static_cast<Index>(times.size()) == points.cols(), "one evaluation point per time required");
  require(delta > 0.0, "smoothing scale must be positive");
  return tilted_expectation(ensemble, [&](const BrownianPath& p) {
    double v = 1.0;
    for (std::size_t j = 0; j < times.size() && v != 0.0; ++j)
      v *= mollifier(delta, Point(p.at_time(times[j]) - points.col(static_cast<Index>(j))));
    return v;
  });
}

void write_density_csv(std::ostream& out, const DensityGrid& density) {
  out << "s_index,s,x,y,value,se\n";
  out.precision(17);
  for (std::size_t k = 0; k < density.times.size(); ++k) {
    for (Index j = 0; j < density.grid.cells; ++j) {
      for (Index i = 0; i < density.grid.cells; ++i) {
        const Point x = density.grid.point(i, j);
        out << k << ',' << density.times[k] << ',' << x.x() << ',' << x.y() << ',' << density.value[k](i, j) << ','
            << density.se[k](i, j) << '\n';
      }
    }
  }
}

}  // namespace pam2d
