#include "pam2d/mollifier.hpp"

#include "pam2d/quadrature.hpp"

#include <cmath>
#include <vector>

namespace pam2d {

Profile profile_from_string(std::string_view name) {
  if (name == "standard_bump") return Profile::standard_bump;
  if (name == "triangle_product") return Profile::triangle_product;
  throw InvalidParameter("unknown mollifier profile '" + std::string(name) + "'");
}

std::string to_string(Profile profile) {
  return profile == Profile::standard_bump ? "standard_bump" : "triangle_product";
}

namespace {

// phihat and its derivative on a uniform grid, evaluated by cubic Hermite
// interpolation. |phihat|^2 < 1e-17 beyond kMaxFrequency.
constexpr double kMaxFrequency = 200.0;
constexpr double kFrequencyStep = 0.1;

struct BumpSpectrum {
  std::vector<double> value;
  std::vector<double> slope;

  BumpSpectrum() {
    const int panels = 16;
    const quad::Rule& rule = quad::gauss_legendre(32);
    std::vector<double> rho, weight;
    for (int p = 0; p < panels; ++p) {
      const double a = static_cast<double>(p) / panels;
      const double half = 0.5 / panels;
      for (Index i = 0; i < rule.nodes.size(); ++i) {
        const double r = a + half * (1.0 + rule.nodes[i]);
        rho.push_back(r);
        weight.push_back(half * rule.weights[i] * 2.0 * kPi * kBumpNormalization * std::exp(-1.0 / (1.0 - r * r)) * r);
      }
    }
    const auto count = static_cast<std::size_t>(kMaxFrequency / kFrequencyStep) + 1;
    value.resize(count);
    slope.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double k = static_cast<double>(j) * kFrequencyStep;
      double v = 0.0, d = 0.0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        v += weight[i] * std::cyl_bessel_j(0.0, k * rho[i]);
        d -= weight[i] * rho[i] * std::cyl_bessel_j(1.0, k * rho[i]);
      }
      value[j] = v;
      slope[j] = d;
    }
  }
};

const BumpSpectrum& bump_spectrum() {
  static const BumpSpectrum spectrum;
  return spectrum;
}

}  // namespace

double bump_fourier(double k) {
  k = std::abs(k);
  if (k >= kMaxFrequency) return 0.0;
  const BumpSpectrum& s = bump_spectrum();
  const double pos = k / kFrequencyStep;
  const auto j = static_cast<std::size_t>(pos);
  const double u = pos - static_cast<double>(j);
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * s.value[j] + h10 * kFrequencyStep * s.slope[j] + h01 * s.value[j + 1] +
         h11 * kFrequencyStep * s.slope[j + 1];
}

double hat_fourier(double k) {
  const double half = 0.5 * k;
  if (std::abs(half) < 1e-4) return 1.0 - half * half / 3.0;
  const double sinc = std::sin(half) / half;
  return sinc * sinc;
}

double Mollifier::fourier(double k1, double k2) const {
  if (radial()) return bump_fourier(std::hypot(k1, k2));
  return hat_fourier(k1) * hat_fourier(k2);
}

}  // namespace pam2d
