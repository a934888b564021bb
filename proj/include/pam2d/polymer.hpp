#pragma once

#include "pam2d/local_time.hpp"
#include "pam2d/noise.hpp"
#include "pam2d/parallel.hpp"
#include "pam2d/stats.hpp"

#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pam2d {

struct EnsembleOptions {
  /// Weights forced to one: the plain Wiener measure.
  bool unit_weights = false;
  /// Largest admissible t; the tilted measure is only controlled for small times.
  double small_time_bound = 0.1;
  double guard_ratio = kDefaultStepGuardRatio;
  /// Store the paths; otherwise they are regenerated from their seeds on demand.
  bool keep_paths = false;
};

/// Brownian paths with weights exp(gamma_{eps_gamma}(t, B)): the tilted
/// polymer measure in sample form. Path i uses seed stream_seed(master_seed, i).
struct WeightedEnsemble {
  double t = 0.0;
  double eps_gamma = 0.0;
  Index n_steps = 0;
  std::uint64_t master_seed = 0;
  bool unit_weights = false;
  std::vector<BrownianPath> paths;  // empty unless built with keep_paths
  Eigen::VectorXd log_weights;
  double f_hat = 0.0;  // log of the mean weight
  double se_f = 0.0;
  double ess = 0.0;    // (sum w)^2 / sum w^2
  double max_log_weight = 0.0;
  std::vector<std::string> warnings;

  Index size() const { return log_weights.size(); }
  /// Path i, stored or regenerated bit-exactly from its seed.
  BrownianPath path(Index i) const;
  /// w_i / sum w, computed with the maximum log weight shifted out.
  Eigen::VectorXd normalized_weights() const;
  /// w_i exp(-max_log_weight).
  Eigen::VectorXd scaled_weights() const;
};

/// F estimate log(mean exp(lw)) with its delta-method standard error.
Estimate log_mean_exp(std::span<const double> log_weights);

WeightedEnsemble build_ensemble(const Mollifier& mollifier, double t, double eps_gamma, Index n_paths, Index n_steps,
                                std::uint64_t master_seed, const EnsembleOptions& options = {});

/// sum w_i X_i / sum w_i with the self-normalized delta-method error.
Estimate tilted_expectation(const WeightedEnsemble& ensemble, std::span<const double> values);

template <class Functional>
  requires std::invocable<Functional&, const BrownianPath&>
Estimate tilted_expectation(const WeightedEnsemble& ensemble, Functional&& functional) {
  Eigen::VectorXd values(ensemble.size());
  parallel_for(ensemble.size(), [&](Index i) { values[i] = functional(ensemble.path(i)); });
  return tilted_expectation(ensemble, std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

/// Square evaluation grid of cell centres: origin + ((i + 1/2) h, (j + 1/2) h).
struct EvalGrid {
  Point origin = Point::Zero();
  double spacing = 0.0;
  Index cells = 0;

  /// Grid of the given side centred on `centre`.
  static EvalGrid centred(const Point& centre, double side, Index cells);
  Point point(Index i, Index j) const { return origin + Point((i + 0.5) * spacing, (j + 0.5) * spacing); }
};

/// One-time marginals of the smoothed polymer density, one grid per time.
struct DensityGrid {
  std::vector<double> times;
  double delta = 0.0;
  EvalGrid grid;
  std::vector<Field> value;
  std::vector<Field> se;

  /// Riemann sum of the k-th marginal over the grid.
  double mass(std::size_t k) const;
};

/// F^delta_s(x) = Ehat[phi_delta(B_s - x)] on the grid for every time s.
/// Throws InvalidParameter for times outside (0, t] or delta <= 0.
DensityGrid density_estimate(const WeightedEnsemble& ensemble, const Mollifier& mollifier,
                             std::span<const double> times, double delta, const EvalGrid& grid);

/// Joint density Ehat[prod_j phi_delta(B_{s_j} - x_j)] at one point (x_1..x_n), any n.
Estimate density_at(const WeightedEnsemble& ensemble, const Mollifier& mollifier, std::span<const double> times,
                    const PointSet& points, double delta);

/// CSV with header "s_index,s,x,y,value,se".
void write_density_csv(std::ostream& out, const DensityGrid& density);

}  // namespace pam2d
