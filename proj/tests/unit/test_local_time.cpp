#include <doctest.h>

#include "pam2d/local_time.hpp"
#include "pam2d/pair_sum.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/rng.hpp"
#include "pam2d/stats.hpp"

#include <cmath>
#include <random>

using namespace pam2d;

namespace {

// Frozen from tools/oracles/renorm_oracle.py (scipy, independent Hankel route).
struct ExpectedCase {
  double eps, gap, value;
};
constexpr ExpectedCase kExpected[] = {
    {0.1, 0.0, 54.181544482348606},   {0.1, 0.001, 40.901463177036455},  {0.1, 0.01, 12.544781854511857},
    {0.05, 0.01, 14.93228275579205},  {0.025, 0.01, 15.659227908118453}, {0.1, 0.1, 1.5508916359633806},
};
struct MeanCase {
  double eps, t, value;
};
constexpr MeanCase kMeans[] = {
    {0.1, 0.05, 0.016682230787101765},
    {0.05, 0.05, 0.02659565086073945},
    {0.1, 0.5, 0.3358764699445542},
    {0.025, 0.2, 0.19259890608101313},
};

BrownianPath constant_path(double t, Index n) {
  BrownianPath p;
  p.t_end = t;
  p.positions = PointSet::Zero(2, n + 1);
  return p;
}

}  // namespace

TEST_CASE("spatial-hash pair sums agree with the direct double loop") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.05);
  PointSet a(2, 700), b(2, 300);
  for (Index i = 0; i < a.cols(); ++i) a.col(i) << g(rng) + 0.002 * i, g(rng);
  for (Index i = 0; i < b.cols(); ++i) b.col(i) << g(rng), g(rng) - 0.001 * i;
  const Covariance cov(Mollifier(), 0.03);
  auto kernel = [&cov](double dx, double dy) { return cov(dx, dy); };
  const double fast = self_pair_sum(a, cov.range(), kernel);
  CHECK(fast > 0.0);
  CHECK(fast == doctest::Approx(self_pair_sum_direct(a, kernel)).epsilon(1e-12));
  CHECK(cross_pair_sum(a, b, cov.range(), kernel) == doctest::Approx(cross_pair_sum_direct(a, b, kernel)).epsilon(1e-12));
  const PointSet single = PointSet::Zero(2, 1);
  CHECK(self_pair_sum(single, cov.range(), kernel) == 0.0);
}

TEST_CASE("expected covariance matches the frozen Hankel-transform oracle") {
  const Mollifier m;
  for (const ExpectedCase& c : kExpected) {
    const Covariance cov(m, c.eps);
    CHECK(expected_covariance(cov, c.gap) == doctest::Approx(c.value).epsilon(1e-7));
  }
}

TEST_CASE("expected covariance approaches the heat kernel at zero and decreases in the gap") {
  const Mollifier m;
  const double heat = 1.0 / (2.0 * kPi * 0.01);
  double previous = 0.0;
  for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
    const double v = expected_covariance(Covariance(m, eps), 0.01);
    CHECK(v > previous);
    CHECK(v < heat);
    previous = v;
  }
  CHECK(previous == doctest::Approx(heat).epsilon(5e-3));
  const Covariance cov(m, 0.05);
  double last = cov.at_origin();
  for (double gap = 1e-5; gap < 1.0; gap *= 1.7) {
    const double v = expected_covariance(cov, gap);
    CHECK(v < last);
    last = v;
  }
}

TEST_CASE("separable profile: real-space expectation matches the Fourier route") {
  const Mollifier m(Profile::triangle_product);
  const double eps = 0.1;
  for (double gap : {1e-4, 1e-3, 0.01, 0.05}) {
    double line = 0.0;
    for (int p = 0; p < 200; ++p)
      line += quad::integrate([&](double k) { return std::exp(-0.5 * gap * k * k) * std::pow(hat_fourier(eps * k), 2); },
                              10.0 * p, 10.0 * (p + 1), 16);
    const double fourier = std::pow(line / kPi, 2);
    CHECK(expected_covariance(Covariance(m, eps), gap) == doctest::Approx(fourier).epsilon(1e-5));
  }
}

TEST_CASE("mean self-intersection matches the frozen quadrature oracle") {
  const Mollifier m;
  for (const MeanCase& c : kMeans)
    CHECK(mean_self_intersection(Covariance(m, c.eps), c.t) == doctest::Approx(c.value).epsilon(1e-7));
}

TEST_CASE("resolution-matched mean converges to the continuous one") {
  const Covariance cov(Mollifier(), 0.1);
  const double exact = mean_self_intersection(cov, 0.05);
  double prev_err = 1.0;
  for (Index n : {50, 100, 200, 400}) {
    const double err = std::abs(mean_self_intersection(cov, 0.05, n) - exact);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-2 * exact);
}

TEST_CASE("self-intersection of synthetic paths") {
  const Covariance cov(Mollifier(), 0.1);
  const double t = 0.05;
  const BrownianPath still = constant_path(t, 50);
  CHECK(self_intersection_raw(still, cov) == doctest::Approx(0.5 * t * t * cov.at_origin()).epsilon(1e-13));
  CHECK(gamma_eps(still, cov) ==
        doctest::Approx(0.5 * t * t * cov.at_origin() - mean_self_intersection(cov, t, 50)).epsilon(1e-12));

  BrownianPath p = sample_path(t, 50, 4);
  const double raw = self_intersection_raw(p, cov);
  p.positions.colwise() += Point(3.7, -1.2);
  CHECK(self_intersection_raw(p, cov) == doctest::Approx(raw).epsilon(1e-10));
  CHECK_THROWS_AS(self_intersection_raw(sample_path(t, 40, 1), cov), ConfigurationError);
}

TEST_CASE("raw self-intersection has the resolution-matched mean") {
  const Covariance cov(Mollifier(), 0.1);
  const int n = 20000;
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g[i] = gamma_eps(sample_path(0.05, 50, stream_seed(77, i)), cov);
  const Estimate e = mean_estimate(g);
  CHECK(within_se(e.value, 0.0, e.se, 0.0, 3.0));
}

TEST_CASE("gamma differences shrink under bridge refinement") {
  const Covariance cov(Mollifier(), 0.1);
  const int n = 400;
  double rms_coarse = 0.0, rms_fine = 0.0;
  for (int i = 0; i < n; ++i) {
    const BrownianPath p = sample_path(0.05, 50, stream_seed(12, i));
    const BrownianPath p2 = refine_bridge(p, stream_seed(13, i));
    const BrownianPath p4 = refine_bridge(p2, stream_seed(14, i));
    rms_coarse += std::pow(gamma_eps(p2, cov) - gamma_eps(p, cov), 2);
    rms_fine += std::pow(gamma_eps(p4, cov) - gamma_eps(p2, cov), 2);
  }
  CHECK(rms_fine < rms_coarse);
}

TEST_CASE("mutual intersection: symmetry, positivity, independence contract") {
  const Mollifier m;
  const BrownianPath a = sample_path(0.05, 1000, 1);
  const BrownianPath b = sample_path(0.05, 1000, 2);
  const Covariance c12(m, 0.05, 0.025), c21(m, 0.025, 0.05);
  const double ab = mutual_intersection(a, b, c12);
  CHECK(ab >= 0.0);
  CHECK(ab == mutual_intersection(a, b, c21));
  CHECK(mutual_intersection(b, a, c21) == doctest::Approx(ab).epsilon(1e-12));
  CHECK_THROWS_AS(mutual_intersection(a, a, c12), InvalidParameter);
  CHECK_THROWS_AS(mutual_intersection(a, sample_path(0.05, 20, 3), c12), ConfigurationError);
}

TEST_CASE("renormalization fit recovers the logarithmic slope") {
  const Mollifier m;
  const double eps[] = {0.1, 0.05, 0.025};
  const double times[] = {0.02, 0.05, 0.1, 0.2, 0.3, 0.5};
  const RenormFit fit = fit_renormalization(m, eps, times);
  CHECK(fit.mu2 == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(0.1));
  const std::vector<double> r = fit.remainder_magnitude();
  CHECK(r[1] < r[0]);
  CHECK(r[2] < r[1]);
  CHECK(fit.residual < fit.tolerance);
  for (const RenormLedger& row : fit.ledger) {
    CHECK(row.r_eps == doctest::Approx(row.m_eps - row.c_eps * row.t - row.t * (row.mu1 + row.mu2 * std::log(row.t)))
                           .epsilon(1e-15));
    CHECK(row.log_prefactor() == doctest::Approx(row.m_eps - row.c_eps * row.t).epsilon(1e-12));
  }
  const double bad[] = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(fit_renormalization(m, bad, times), InvalidParameter);
}
