#include <doctest.h>

#include "pam2d/noise.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/stats.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

using namespace pam2d;

namespace {

// Frozen from tools/oracles/bump_constants.py (mpmath, 40 digits).
constexpr double kBumpSquaredNorm = 0.54181544482310457742;
constexpr double kLog10OverPi = 0.73293559887942774087;

double polar_mass(const Mollifier& m) {
  return quad::integrate([&](double r) { return 2.0 * kPi * r * m.unit(r, 0.0); }, 0.0, 1.0, 64);
}

}  // namespace

TEST_CASE("standard bump is a symmetric, compactly supported unit mass") {
  const Mollifier m(Profile::standard_bump);
  CHECK(polar_mass(m) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(m(1.0, Point(1.0, 0.0)) == 0.0);
  CHECK(m(1.0, Point(0.8, 0.7)) == 0.0);
  const Point x(0.13, -0.41);
  CHECK(m(0.5, x) == m(0.5, Point(-x)));
  CHECK(m(0.5, x) > 0.0);
  CHECK(m(0.5, x) == doctest::Approx(4.0 * m.unit(0.26, -0.82)));
  CHECK_THROWS_AS(m(0.0, x), InvalidParameter);
  CHECK_THROWS_AS(m(-1.0, x), InvalidParameter);
}

TEST_CASE("triangle profile has unit mass on its square support") {
  const Mollifier m(Profile::triangle_product);
  const double mass = quad::integrate(
      [&](double x) { return quad::integrate([&](double y) { return m.unit(x, y); }, -1.0, 0.0, 8) +
                             quad::integrate([&](double y) { return m.unit(x, y); }, 0.0, 1.0, 8); },
      -1.0, 0.0, 8) * 2.0;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.support_radius() == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.unit(1.0, 0.2) == 0.0);
  CHECK(m.unit(0.3, 0.2) == m.unit(-0.3, -0.2));
}

TEST_CASE("profile names round-trip") {
  CHECK(profile_from_string("standard_bump") == Profile::standard_bump);
  CHECK(profile_from_string("triangle_product") == Profile::triangle_product);
  CHECK(to_string(Profile::triangle_product) == "triangle_product");
  CHECK_THROWS_AS(profile_from_string("gaussian"), InvalidParameter);
}

TEST_CASE("covariance at the origin equals eps^-2 times the squared L2 norm") {
  const Mollifier m;
  for (double eps : {1.0, 0.1, 0.025}) {
    const Covariance cov(m, eps);
    CHECK(cov.at_origin() == doctest::Approx(kBumpSquaredNorm / (eps * eps)).epsilon(1e-8));
  }
  const Covariance tri(Mollifier(Profile::triangle_product), 0.1);
  CHECK(tri.at_origin() == doctest::Approx(4.0 / 9.0 / 0.01).epsilon(1e-8));
}

TEST_CASE("covariance symmetry, support, domination and scaling") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  for (Profile p : {Profile::standard_bump, Profile::triangle_product}) {
    const Mollifier m(p);
    const Covariance cov(m, 0.1);
    const Covariance cross(m, 0.1, 0.1);
    const Covariance unit(m, 1.0);
    for (int i = 0; i < 20; ++i) {
      const Point x(u(rng), u(rng));
      CHECK(cov(x) == cov(Point(-x)));
      CHECK(cov(x) == cross(x));
      CHECK(cov(x) <= cov.at_origin());
      CHECK(cov(x) >= 0.0);
      CHECK(cov(x) == doctest::Approx(100.0 * unit(Point(10.0 * x))).epsilon(1e-12));
    }
    CHECK(cov(cov.range(), 0.0) == 0.0);
    CHECK(cov(0.0, 0.2 * m.support_radius() + 1e-12) == 0.0);
  }
}

TEST_CASE("two-scale covariance is symmetric in its scales and matches direct quadrature") {
  const Mollifier m;
  const Covariance a(m, 0.05, 0.025), b(m, 0.025, 0.05);
  for (double r : {0.0, 0.01, 0.03, 0.06}) CHECK(a(r, 0.0) == b(0.0, r));
  // direct polar quadrature of phi_0.05 * phi_0.025 at x = (0.02, 0)
  const double x = 0.02;
  const double direct = quad::integrate(
      [&](double rho) {
        return rho * quad::integrate(
                         [&](double th) {
                           const Point y(rho * std::cos(th), rho * std::sin(th));
                           return m(0.025, y) * m(0.05, Point(Point(x, 0.0) - y));
                         },
                         0.0, 2.0 * kPi, 64);
      },
      0.0, 0.025, 64);
  CHECK(a(x, 0.0) == doctest::Approx(direct).epsilon(1e-4));
}

TEST_CASE("fourier profile reproduces the covariance at the origin") {
  const Mollifier m;
  const double eps = 0.1;
  const Covariance cov(m, eps);
  // (2 pi)^-2 int |phihat(eps xi)|^2 dxi, radially
  double integral = 0.0;
  for (int p = 0; p < 100; ++p)
    integral += quad::integrate([&](double k) { return k * std::pow(bump_fourier(eps * k), 2); }, 20.0 * p,
                                20.0 * (p + 1), 16);
  CHECK(integral / (2.0 * kPi) == doctest::Approx(cov.at_origin()).epsilon(1e-4));
  CHECK(bump_fourier(0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(hat_fourier(0.0) == 1.0);
}

TEST_CASE("renormalization constant") {
  CHECK(renormalization_constant(1.0) == 0.0);
  CHECK(renormalization_constant(std::exp(-kPi)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(renormalization_constant(0.1) == doctest::Approx(kLog10OverPi).epsilon(1e-15));
  CHECK_THROWS_AS(renormalization_constant(0.0), InvalidParameter);
  CHECK_THROWS_AS(renormalization_constant(1.5), InvalidParameter);
}

TEST_CASE("periodized covariance matches the planar one on a large torus") {
  const Covariance cov(Mollifier(), 0.1);
  const double side = 20.0 * 0.1;
  for (double r : {0.0, 0.05, 0.12, 0.19, 0.3, 0.5}) {
    const Point x(r * 0.6, r * 0.8);
    CHECK(std::abs(torus_covariance(cov, x, side) - cov(x)) <= 1e-6);
  }
}

TEST_CASE("noise sampling is deterministic and centred") {
  const NoiseRealization a = NoiseRealization::sample(1.0, 1.0 / 64.0, 42);
  const NoiseRealization b = NoiseRealization::sample(1.0, 1.0 / 64.0, 42);
  const NoiseRealization c = NoiseRealization::sample(1.0, 1.0 / 64.0, 43);
  CHECK((a.increments == b.increments).all());
  CHECK_FALSE((a.increments == c.increments).all());
  const double cells = static_cast<double>(a.increments.size());
  const double mean = a.increments.sum() / a.spacing / cells;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(cells));
  CHECK_THROWS_AS(grid_cells(1.0, 0.3), InvalidParameter);
}

TEST_CASE("noise realizations round-trip through the binary format") {
  const NoiseRealization a = NoiseRealization::sample(0.5, 0.5 / 40.0, 9);
  const auto file = std::filesystem::temp_directory_path() / "pam2d_noise_roundtrip.bin";
  a.save(file);
  const NoiseRealization b = NoiseRealization::load(file);
  std::filesystem::remove(file);
  CHECK(b.side == a.side);
  CHECK(b.spacing == a.spacing);
  CHECK(b.seed == a.seed);
  CHECK((b.increments == a.increments).all());
}

TEST_CASE("smoothed noise: resolution guard, FFT route, variance and decorrelation") {
  const Mollifier m;
  const double eps = 0.1;
  CHECK_THROWS_AS(smoothed_value(NoiseRealization::sample(1.0, 0.025, 1), m, eps, Point(0.5, 0.5)),
                  ConfigurationError);

  const double side = 0.6, h = eps / 8.0;
  const NoiseRealization one = NoiseRealization::sample(side, h, 3);
  const PeriodicField field = smoothed_field(one, m, eps);
  for (Index i : {0, 7, 23}) {
    const Point x = field.centre(i, 2 * i % 48);
    CHECK(field.values(i, 2 * i % 48) == doctest::Approx(smoothed_value(one, m, eps, x)).epsilon(1e-10));
  }

  const int seeds = 10000;
  Eigen::VectorXd v(seeds), prod(seeds);
  const Point x(0.3, 0.3), y(0.3 + 2.0 * eps, 0.3);
  for (int s = 0; s < seeds; ++s) {
    const NoiseRealization n = NoiseRealization::sample(side, h, 1000 + s);
    const double wx = smoothed_value(n, m, eps, x);
    v[s] = wx * wx;
    prod[s] = wx * smoothed_value(n, m, eps, y);
  }
  const Covariance cov(m, eps);
  const Estimate var = mean_estimate(v);
  const Estimate far = mean_estimate(prod);
  CHECK(within_se(var.value, cov.at_origin(), var.se, 0.0, 3.0));
  CHECK(within_se(far.value, 0.0, far.se, 0.0, 3.0));
}
