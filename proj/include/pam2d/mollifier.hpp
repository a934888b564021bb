#pragma once

#include "pam2d/common.hpp"

#include <cmath>
#include <string>
#include <string_view>

namespace pam2d {

enum class Profile { standard_bump, triangle_product };

Profile profile_from_string(std::string_view name);
std::string to_string(Profile profile);

// c such that c * exp(-1 / (1 - |x|^2)) integrates to one over the unit disk.
// Frozen from a 40-digit quadrature (tools/oracles/bump_constants.py).
inline constexpr double kBumpNormalization = 2.143565775792236601;

/// Symmetric, nonnegative, compactly supported unit-mass mollifier and its
/// eps-rescaling phi_eps(x) = eps^-2 phi(x / eps).
///
/// `standard_bump` is radial with support radius 1. `triangle_product` is the
/// tensor product of hat functions on [-1, 1]^2, so its support radius is
/// sqrt(2) and it is not radial.
class Mollifier {
 public:
  explicit Mollifier(Profile profile = Profile::standard_bump) : profile_(profile) {}

  Profile profile() const { return profile_; }
  bool radial() const { return profile_ == Profile::standard_bump; }
  double support_radius() const { return radial() ? 1.0 : std::sqrt(2.0); }
  double normalization() const { return radial() ? kBumpNormalization : 1.0; }

  double unit(double x1, double x2) const {
    if (radial()) {
      const double r2 = x1 * x1 + x2 * x2;
      return r2 < 1.0 ? kBumpNormalization * std::exp(-1.0 / (1.0 - r2)) : 0.0;
    }
    const double a = 1.0 - std::abs(x1);
    const double b = 1.0 - std::abs(x2);
    return (a > 0.0 && b > 0.0) ? a * b : 0.0;
  }

  double unit(const Point& x) const { return unit(x.x(), x.y()); }

  /// phi_eps(x); throws InvalidParameter for eps <= 0.
  double operator()(double eps, const Point& x) const {
    if (!(eps > 0.0)) throw InvalidParameter("mollifier scale must be positive");
    const double inv = 1.0 / eps;
    return inv * inv * unit(x.x() * inv, x.y() * inv);
  }

  /// Fourier transform int phi(x) e^{-i k.x} dx of the unit profile (real by symmetry).
  double fourier(double k1, double k2) const;

 private:
  Profile profile_;
};

/// Hankel-transform of the standard bump at radial frequency k (tabulated).
double bump_fourier(double k);

/// Fourier transform of the 1D hat function, (sin(k/2) / (k/2))^2.
double hat_fourier(double k);

}  // namespace pam2d
