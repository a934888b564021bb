#pragma once

#include "pam2d/covariance.hpp"

#include <cstdint>
#include <filesystem>

namespace pam2d {

using Field = Eigen::ArrayXXd;

/// Values at the cell centres ((i + 1/2) h, (j + 1/2) h) of a periodic square
/// grid, with periodic bilinear interpolation in between.
struct PeriodicField {
  double side = 0.0;
  double spacing = 0.0;
  Field values;

  double operator()(double x, double y) const;
  double operator()(const Point& p) const { return (*this)(p.x(), p.y()); }
  Index cells() const { return values.rows(); }
  Point centre(Index i, Index j) const { return {(i + 0.5) * spacing, (j + 0.5) * spacing}; }
};

/// One frozen white-noise sample on the torus [0, L)^2: increments are iid
/// N(0, h^2), i.e. standard Gaussians scaled by sqrt(cell area).
struct NoiseRealization {
  double side = 0.0;
  double spacing = 0.0;
  std::uint64_t seed = 0;
  Field increments;

  static NoiseRealization sample(double side, double spacing, std::uint64_t seed);

  Index cells() const { return increments.rows(); }

  // Binary layout: "PAM2DNZ1", L, h (f64), seed (u64), nx, ny (i64), then
  // nx * ny f64 values in column-major order. Native byte order.
  void save(const std::filesystem::path& file) const;
  static NoiseRealization load(const std::filesystem::path& file);
};

/// Number of cells per side, validating that L / h is an integer.
Index grid_cells(double side, double spacing);

/// W_eps(x) = sum over cells of phi_eps(x - centre) * increment, with torus
/// distances. Throws ConfigurationError unless h <= eps / 8.
double smoothed_value(const NoiseRealization& noise, const Mollifier& mollifier, double eps, const Point& x);

/// W_eps at every cell centre (circular convolution via FFT).
PeriodicField smoothed_field(const NoiseRealization& noise, const Mollifier& mollifier, double eps);

void check_noise_resolution(double spacing, double eps);

namespace fft {
/// In-place 2D DFT; the inverse includes the 1/(n m) normalization.
void transform(Eigen::ArrayXXcd& data, bool inverse);
}  // namespace fft

}  // namespace pam2d
