#include <doctest.h>

#include "pam2d/parallel.hpp"
#include "pam2d/quadrature.hpp"
#include "pam2d/stats.hpp"

#include <cmath>
#include <vector>

using namespace pam2d;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const double v = quad::integrate([](double x) { return x * x * x * x; }, 0.0, 2.0, 8);
  CHECK(v == doctest::Approx(32.0 / 5.0).epsilon(1e-14));
  CHECK(quad::gauss_legendre(32).weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gauss-hermite rule reproduces normal moments") {
  const quad::Rule& r = quad::gauss_hermite(20);
  double m2 = 0.0, m4 = 0.0, m6 = 0.0;
  for (Index i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i];
    m2 += r.weights[i] * x * x;
    m4 += r.weights[i] * std::pow(x, 4);
    m6 += r.weights[i] * std::pow(x, 6);
  }
  CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("pairwise sum is exact on integers and independent of thread count") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  CHECK(pairwise_sum(v) == 499500.0);

  auto run = [] {
    Eigen::VectorXd out(10007);
    parallel_for(out.size(), [&](Index i) { out[i] = std::sin(0.37 * static_cast<double>(i)) * 1e-3; });
    return pairwise_sum(out);
  };
  const unsigned saved = thread_count();
  set_thread_count(1);
  const double one = run();
  set_thread_count(4);
  const double four = run();
  set_thread_count(saved);
  CHECK(one == four);
}

TEST_CASE("parallel_for propagates exceptions") {
  const unsigned saved = thread_count();
  set_thread_count(3);
  CHECK_THROWS_AS(parallel_for(100, [](Index i) {
                    if (i == 57) throw InvalidParameter("boom");
                  }),
                  InvalidParameter);
  set_thread_count(saved);
}

TEST_CASE("mean and self-normalized estimates") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const Estimate m = mean_estimate(x);
  CHECK(m.value == doctest::Approx(2.5));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  const std::vector<double> w = {1.0, 1.0, 1.0, 1.0};
  CHECK(self_normalized_mean(w, x).value == doctest::Approx(2.5));
  const std::vector<double> c = {7.0, 7.0, 7.0, 7.0};
  const std::vector<double> w2 = {0.1, 5.0, 2.0, 0.3};
  CHECK(self_normalized_mean(w2, c).value == 7.0);
  CHECK(within_se(1.0, 1.2, 0.1, 0.0, 3.0));
  CHECK_FALSE(within_se(1.0, 1.5, 0.1, 0.0, 3.0));
}
