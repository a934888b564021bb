#pragma once

#include "pam2d/chaos.hpp"
#include "pam2d/noise.hpp"
#include "pam2d/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace pam2d {

enum class DiffusionScheme { spectral, five_point };

DiffusionScheme scheme_from_string(std::string_view name);
std::string to_string(DiffusionScheme scheme);

struct PdeOptions {
  DiffusionScheme scheme = DiffusionScheme::spectral;
  /// Largest admissible dt * max |V|.
  double potential_resolution = 0.1;
};

/// u on the cell centres of a periodic grid after `steps` steps of size dt.
struct GridSolution {
  double side = 0.0;
  double spacing = 0.0;
  double t = 0.0;
  double dt = 0.0;
  Index steps = 0;
  DiffusionScheme scheme = DiffusionScheme::spectral;
  Field values;
  double min_value = 0.0;  // smallest value seen at any step

  PeriodicField field() const { return {side, spacing, values}; }
  double mass() const { return values.sum() * spacing * spacing; }

  /// CSV with header "x,y,value".
  void write_csv(std::ostream& out) const;
  // Binary layout: "PAM2DGS1", L, h, t, dt (f64), steps, nx, ny (i64), then
  // nx * ny f64 values in column-major order. Native byte order.
  void save(const std::filesystem::path& file) const;
  static GridSolution load(const std::filesystem::path& file);
};

/// Largest dt satisfying dt <= h^2 / 4 and dt * max|V| <= resolution.
double max_stable_dt(double spacing, double max_abs_potential, double resolution = 0.1);

/// du/dt = (1/2) Lap u + V u on the torus by Strang splitting: exact
/// half-step exponentials of V around a full diffusion step. dt is shrunk so
/// that t / dt is an integer; ConfigurationError names the admissible dt.
GridSolution solve_with_potential(const Field& potential, double side, const Field& u0, double t, double dt,
                                  const PdeOptions& options = {});

/// The mollified equation with V = W_eps - C_eps.
GridSolution solve_pam(const NoiseRealization& noise, const Mollifier& mollifier, double eps, const Field& u0,
                       double t, double dt, const PdeOptions& options = {});

/// u0 sampled at the cell centres of a noise grid.
Field sample_on_grid(const InitialCondition& u0, double side, double spacing);

/// Feynman-Kac estimates of u_eps(t, x) at each column of xs from shared
/// paths: mean of u0(x + B_t) exp(int W_eps(x + B_s) ds - C_eps t), the time
/// integral by the trapezoid rule on the path grid and W_eps read from the
/// same periodic grid as the PDE. Each of the n_paths draws B is paired with
/// its mirror -B; the pair average is one sample.
std::vector<Estimate> feynman_kac_points(const NoiseRealization& noise, const Mollifier& mollifier, double eps,
                                         const InitialCondition& u0, double t, const PointSet& xs, Index n_paths,
                                         Index n_steps, std::uint64_t seed,
                                         double guard_ratio = kDefaultStepGuardRatio);

Estimate feynman_kac_point(const NoiseRealization& noise, const Mollifier& mollifier, double eps,
                           const InitialCondition& u0, double t, const Point& x, Index n_paths, Index n_steps,
                           std::uint64_t seed, double guard_ratio = kDefaultStepGuardRatio);

}  // namespace pam2d
