#include "pam2d/brownian.hpp"

#include "pam2d/rng.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

namespace pam2d {

Point BrownianPath::at_time(double s) const {
  require(s >= 0.0 && s <= t_end * (1.0 + 1e-12), "time outside the path horizon");
  const double pos = std::min(s / dt(), static_cast<double>(steps()));
  const auto k = std::min(static_cast<Index>(pos), steps() - 1);
  const double frac = pos - static_cast<double>(k);
  return (1.0 - frac) * positions.col(k) + frac * positions.col(k + 1);
}

BrownianPath sample_path(double t_end, Index n_steps, std::uint64_t seed) {
  require(t_end > 0.0, "path horizon must be positive");
  require(n_steps >= 1, "a path needs at least one step");
  BrownianPath path{t_end, PointSet(2, n_steps + 1), seed};
  Engine engine(seed);
  StandardNormal normal;
  const double sd = std::sqrt(t_end / static_cast<double>(n_steps));
  path.positions.col(0).setZero();
  for (Index k = 1; k <= n_steps; ++k) {
    const double dx = sd * normal(engine);
    const double dy = sd * normal(engine);
    path.positions(0, k) = path.positions(0, k - 1) + dx;
    path.positions(1, k) = path.positions(1, k - 1) + dy;
  }
  return path;
}

BrownianPath refine_bridge(const BrownianPath& path, std::uint64_t extension_seed) {
  const Index n = path.steps();
  BrownianPath fine{path.t_end, PointSet(2, 2 * n + 1), path.seed};
  Engine engine(extension_seed);
  StandardNormal normal;
  const double sd = std::sqrt(path.dt() / 4.0);
  for (Index k = 0; k < n; ++k) {
    fine.positions.col(2 * k) = path.positions.col(k);
    const Point mean = 0.5 * (path.positions.col(k) + path.positions.col(k + 1));
    fine.positions(0, 2 * k + 1) = mean.x() + sd * normal(engine);
    fine.positions(1, 2 * k + 1) = mean.y() + sd * normal(engine);
  }
  fine.positions.col(2 * n) = path.positions.col(n);
  return fine;
}

BrownianPath subsample(const BrownianPath& path, Index stride) {
  require(stride >= 1 && path.steps() % stride == 0, "stride must divide the step count");
  const Index n = path.steps() / stride;
  BrownianPath coarse{path.t_end, PointSet(2, n + 1), path.seed};
  for (Index k = 0; k <= n; ++k) coarse.positions.col(k) = path.positions.col(k * stride);
  return coarse;
}

Index guarded_steps(double t_end, double eps, double ratio) {
  require(t_end > 0.0 && eps > 0.0 && ratio > 0.0, "invalid step guard arguments");
  return std::max<Index>(1, static_cast<Index>(std::ceil(t_end * ratio / (eps * eps) - 1e-9)));
}

void check_step_guard(double dt, double eps, double ratio) {
  const double limit = eps * eps / ratio;
  if (dt > limit * (1.0 + 1e-9)) {
    std::ostringstream msg;
    msg << "time step " << dt << " violates the guard dt <= eps^2/" << ratio << " = " << limit << " (eps=" << eps
        << ")";
    throw ConfigurationError(msg.str());
  }
}

void write_path_csv(std::ostream& out, const BrownianPath& path) {
  out << "step,time,x,y\n";
  out.precision(17);
  for (Index k = 0; k <= path.steps(); ++k) {
    out << k << ',' << path.dt() * k << ',' << path.positions(0, k) << ',' << path.positions(1, k) << '\n';
  }
}

}  // namespace pam2d
