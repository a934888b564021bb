#pragma once

#include "pam2d/common.hpp"

#include <cstdint>
#include <iosfwd>

namespace pam2d {

/// Planar Brownian motion from the origin on a uniform time grid.
struct BrownianPath {
  double t_end = 0.0;
  PointSet positions;  // 2 x (n_steps + 1), positions.col(0) == 0
  std::uint64_t seed = 0;

  Index steps() const { return positions.cols() - 1; }
  double dt() const { return t_end / static_cast<double>(steps()); }
  Point end() const { return positions.col(steps()); }

  /// Averages of consecutive positions: the bridge mean at each step midpoint.
  PointSet midpoints() const {
    const Index n = steps();
    return 0.5 * (positions.leftCols(n) + positions.rightCols(n));
  }

  /// Position at time s in [0, t_end], linear between grid points.
  Point at_time(double s) const;
};

BrownianPath sample_path(double t_end, Index n_steps, std::uint64_t seed);

/// Doubles the resolution: new midpoints are drawn from the Brownian bridge
/// law N(mean of neighbours, dt/4 per coordinate); existing values are kept.
BrownianPath refine_bridge(const BrownianPath& path, std::uint64_t extension_seed);

/// Every `stride`-th position; subsample(refine_bridge(p, s), 2) == p.
BrownianPath subsample(const BrownianPath& path, Index stride = 2);

/// Smallest step count with t_end / n <= eps^2 / ratio.
Index guarded_steps(double t_end, double eps, double ratio = kDefaultStepGuardRatio);

/// Throws ConfigurationError when dt > eps^2 / ratio.
void check_step_guard(double dt, double eps, double ratio = kDefaultStepGuardRatio);

/// CSV with header "step,time,x,y".
void write_path_csv(std::ostream& out, const BrownianPath& path);

}  // namespace pam2d
