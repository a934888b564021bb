#include <doctest.h>

#include "pam2d/chaos.hpp"
#include "pam2d/hermite.hpp"
#include "pam2d/quadrature.hpp"

#include <cmath>

using namespace pam2d;

namespace {

// int_0^t q_s(d) ds = E1(d^2 / 2t) / (2 pi).
double first_order_closed_form(double t, double d) { return -std::expint(-0.5 * d * d / t) / (2.0 * kPi); }

// Second-order Wick coefficient with u0 = 1 by brute-force composite quadrature
// in the original time variables.
double second_order_direct(double t, const Point& x, const Point& a, const Point& b) {
  auto ordered = [&](const Point& p, const Point& q) {
    std::vector<double> br;
    for (int k = 0; k <= 40; ++k) br.push_back(t * k / 40.0);
    return quad::integrate_panels(
        [&](double s1) {
          std::vector<double> inner;
          for (int k = 0; k <= 40; ++k) inner.push_back(s1 + (t - s1) * k / 40.0);
          return heat_kernel(s1, Point(p - x)) *
                 quad::integrate_panels([&](double s2) { return heat_kernel(s2 - s1, Point(q - p)); }, inner, 16);
        },
        br, 16);
  };
  return 0.5 * (ordered(a, b) + ordered(b, a));
}

PointSet tuple(std::initializer_list<Point> pts) {
  PointSet p(2, static_cast<Index>(pts.size()));
  Index k = 0;
  for (const Point& q : pts) p.col(k++) = q;
  return p;
}

}  // namespace

TEST_CASE("Hermite polynomials follow the probabilists' recurrence") {
  const double x = 0.7;
  CHECK(hermite(0, x) == 1.0);
  CHECK(hermite(1, x) == x);
  CHECK(hermite(2, x) == doctest::Approx(x * x - 1.0));
  CHECK(hermite(3, x) == doctest::Approx(x * x * x - 3.0 * x));
  CHECK(hermite(4, x) == doctest::Approx(std::pow(x, 4) - 6.0 * x * x + 3.0));
  const Eigen::ArrayXd all = hermite_all(4, x);
  for (int n = 0; n <= 4; ++n) CHECK(all[n] == doctest::Approx(hermite(n, x)));
  const Eigen::ArrayXd xs = Eigen::ArrayXd::LinSpaced(5, -1.0, 1.0);
  CHECK(hermite(3, xs)[1] == doctest::Approx(hermite(3, -0.5)));
  CHECK(hermite(2, 0.5f) == doctest::Approx(-0.75f));
}

TEST_CASE("Hermite isometry and orthogonality on a cell test function") {
  CellFunction h;
  h.cell_area = 0.25;
  h.values = Eigen::Vector4d(1.0, 1.0, -1.0, 1.0);
  CHECK(h.norm() == doctest::Approx(1.0));
  for (int n = 1; n <= 4; ++n) {
    const IsometryReport r = hermite_isometry_check(n, h, 200000, 31 + n);
    CHECK(r.pass);
    CHECK(r.orthogonal);
    CHECK(r.target == doctest::Approx(std::tgamma(n + 1.0)));
  }
  CellFunction bad = h;
  bad.values *= 1.001;
  CHECK_THROWS_AS(hermite_isometry_check(2, bad, 100, 1), InvalidParameter);
}

TEST_CASE("Phi functional: mass, constant path, sign") {
  const Mollifier m;
  const double eps = 0.1, t = 0.05;
  BrownianPath still;
  still.t_end = t;
  still.positions = PointSet::Zero(2, 51);
  const Point x(0.3, -0.2);
  CHECK(phi_functional(still, m, eps, x, x) == doctest::Approx(t * m(eps, Point::Zero())).epsilon(1e-13));

  const BrownianPath p = sample_path(t, 50, 9);
  const double h = 0.005;
  double mass = 0.0;
  PointSet ys(2, 200);
  for (Index i = 0; i < 200; ++i) {
    for (Index j = 0; j < 200; ++j) ys.col(j) = x + Point(-0.5 + (i + 0.5) * h, -0.5 + (j + 0.5) * h);
    const Eigen::VectorXd v = phi_functional(p, m, eps, x, ys);
    CHECK((v.array() >= 0.0).all());
    mass += v.sum() * h * h;
  }
  CHECK(mass == doctest::Approx(t).epsilon(1e-6));
  CHECK_THROWS_AS(phi_functional(sample_path(t, 10, 1), m, eps, x, x), ConfigurationError);
}

TEST_CASE("analytic Wick coefficients: closed forms and the diagonal flag") {
  const double t = 0.05;
  const Point x(0.1, 0.2);
  const InitialCondition one = InitialCondition::constant(1.0);
  CHECK(*wick_coeff_analytic(0, t, x, PointSet(2, 0), one) == 1.0);
  for (double d : {0.02, 0.1, 0.3}) {
    const auto v = wick_coeff_analytic(1, t, x, tuple({x + Point(0.6 * d, 0.8 * d)}), one);
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(first_order_closed_form(t, d)).epsilon(1e-8));
  }
  const Point a = x + Point(0.1, 0.05), b = x + Point(-0.05, 0.12);
  const auto v2 = wick_coeff_analytic(2, t, x, tuple({a, b}), one);
  REQUIRE(v2.has_value());
  CHECK(*v2 == doctest::Approx(second_order_direct(t, x, a, b)).epsilon(1e-5));
  CHECK(*wick_coeff_analytic(2, t, x, tuple({b, a}), one) == doctest::Approx(*v2).epsilon(1e-12));

  CHECK_FALSE(wick_coeff_analytic(1, t, x, tuple({x}), one).has_value());
  CHECK_FALSE(wick_coeff_analytic(2, t, x, tuple({a, a}), one).has_value());
  CHECK_THROWS_AS(wick_coeff_analytic(7, t, x, PointSet::Zero(2, 7), one), UnsupportedOrder);
}

TEST_CASE("analytic Wick coefficients with a non-constant initial condition") {
  const double t = 0.05, c = 1.3;
  const Point x(0.0, 0.0), y(0.12, -0.04);
  const InitialCondition u0 = InitialCondition::function([c](const Point& z) { return std::exp(c * z.x()); });
  CHECK(*wick_coeff_analytic(0, t, x, PointSet(2, 0), u0) == doctest::Approx(std::exp(0.5 * c * c * t)).epsilon(1e-10));
  const double expected = quad::integrate_panels(
      [&](double s) { return heat_kernel(s, y) * std::exp(c * y.x() + 0.5 * c * c * (t - s)); },
      std::vector<double>{0.0, 1e-4, 1e-3, 5e-3, 0.02, t}, 32);
  CHECK(*wick_coeff_analytic(1, t, x, tuple({y}), u0) == doctest::Approx(expected).epsilon(1e-7));
}

TEST_CASE("integral of the first Wick coefficient over y equals t") {
  const double t = 0.05;
  const Point x(0.0, 0.0);
  const double side = 3.0;
  const int cells = 300;
  const double h = side / cells;
  double sum = 0.0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      const Point y(-0.5 * side + (i + 0.5) * h, -0.5 * side + (j + 0.5) * h);
      sum += first_order_closed_form(t, y.norm()) * h * h;
    }
  }
  CHECK(sum == doctest::Approx(t).epsilon(0.02));
}

TEST_CASE("Monte Carlo coefficients: wick baseline, symmetry and prefactor identities") {
  const Mollifier m;
  const double t = 0.05, eps = 0.05;
  const Index steps = guarded_steps(t, eps);
  EnsembleOptions unit;
  unit.unit_weights = true;
  const WeightedEnsemble plain = build_ensemble(m, t, eps, 20000, steps, 606, unit);
  const WeightedEnsemble tilted = build_ensemble(m, t, eps, 4000, steps, 607);
  const RenormLedger ledger = make_ledger(Covariance(m, eps), t, 0.044, 1.0 / (2.0 * kPi), steps);
  const InitialCondition one = InitialCondition::constant(1.0);
  const Point x(0.0, 0.0);

  const std::vector<PointSet> none = {PointSet(2, 0)};
  const ChaosCoefficient c0 = chaos_coeff_mc(0, x, none, plain, ledger, m, one, Variant::wick);
  CHECK(c0.values[0] == 1.0);

  const std::vector<PointSet> singles = {tuple({Point(0.15, 0.0)}), tuple({Point(-0.1, 0.1)})};
  const ChaosCoefficient c1 = chaos_coeff_mc(1, x, singles, plain, ledger, m, one, Variant::wick);
  for (Index j = 0; j < 2; ++j) {
    const double exact = *wick_coeff_analytic(1, t, x, singles[static_cast<std::size_t>(j)], one);
    CHECK(within_se(c1.values[j], exact, c1.ses[j], 0.0, 3.0));
  }

  const std::vector<PointSet> pair = {tuple({Point(0.1, 0.0), Point(0.0, 0.1)}),
                                      tuple({Point(0.0, 0.1), Point(0.1, 0.0)})};
  const ChaosCoefficient c2 = chaos_coeff_mc(2, x, pair, tilted, ledger, m, one, Variant::stratonovich);
  CHECK(c2.values[0] == c2.values[1]);
  CHECK(c2.ses[0] == c2.ses[1]);

  const ChaosCoefficient s0 = chaos_coeff_mc(0, x, none, tilted, ledger, m, one, Variant::stratonovich);
  CHECK(s0.values[0] == doctest::Approx(std::exp(ledger.log_prefactor() + tilted.f_hat)).epsilon(1e-12));

  CHECK_THROWS_AS(chaos_coeff_mc(1, x, singles, tilted, ledger, m, one, Variant::wick), InvalidParameter);
  CHECK_THROWS_AS(chaos_coeff_mc(1, x, singles, plain, ledger, m, one, Variant::stratonovich), InvalidParameter);
}

TEST_CASE("first coefficient equals the time-integrated smoothed polymer density") {
  const Mollifier m;
  const double t = 0.02, eps = 0.05;
  const Index steps = guarded_steps(t, eps);
  const WeightedEnsemble e = build_ensemble(m, t, eps, 3000, steps, 99);
  const RenormLedger ledger = make_ledger(Covariance(m, eps), t, 0.044, 1.0 / (2.0 * kPi), steps);
  const Point x(0.05, 0.0), y(0.0, 0.04);
  const ChaosCoefficient c =
      chaos_coeff_mc(1, x, std::vector<PointSet>{tuple({y})}, e, ledger, m, InitialCondition::constant(1.0),
                     Variant::stratonovich);
  const double h = t / static_cast<double>(steps);
  double integrated = 0.0, se = 0.0;
  PointSet at(2, 1);
  at.col(0) = y - x;
  for (Index k = 0; k < steps; ++k) {
    const double s[] = {(static_cast<double>(k) + 0.5) * h};
    const Estimate d = density_at(e, m, s, at, eps);
    integrated += h * d.value;
    se += h * d.se;
  }
  const double scale = std::exp(ledger.log_prefactor() + e.f_hat);
  CHECK(c.values[0] == doctest::Approx(scale * integrated).epsilon(1e-9));
  CHECK(within_se(c.values[0], scale * integrated, c.ses[0], scale * se, 3.0));
}

TEST_CASE("two-replica norms and the truncated second moment") {
  const Mollifier m;
  const double t = 0.02, eps = 0.05;
  const Index steps = guarded_steps(t, eps);
  const RenormLedger ledger = make_ledger(Covariance(m, eps), t, 0.044, 1.0 / (2.0 * kPi), steps);
  const InitialCondition one = InitialCondition::constant(1.0);
  const Point x = Point::Zero();

  EnsembleOptions unit;
  unit.unit_weights = true;
  const WeightedEnsemble ua = build_ensemble(m, t, eps, 3000, steps, 1, unit);
  const WeightedEnsemble ub = build_ensemble(m, t, eps, 3000, steps, 2, unit);
  const ReplicaPairs wick = replica_pairs(ua, ub, ledger, m, one, x, Variant::wick);
  CHECK(coeff_norm_estimate(0, wick).value == 1.0);
  const Estimate n1 = coeff_norm_estimate(1, wick);
  const double expected = mean_self_intersection(Covariance(m, eps), 2.0 * t) -
                          2.0 * mean_self_intersection(Covariance(m, eps), t);
  CHECK(within_se(n1.value, expected, n1.se, 0.0, 3.0));
  CHECK_THROWS_AS(replica_pairs(ua, ua, ledger, m, one, x, Variant::wick), InvalidParameter);

  const WeightedEnsemble a = build_ensemble(m, t, eps, 3000, steps, 11);
  const WeightedEnsemble b = build_ensemble(m, t, eps, 3000, steps, 12);
  const TruncationReport r = truncated_second_moment(4, a, b, ledger, m, one, x);
  CHECK(r.nondecreasing);
  CHECK(r.partial_sums.size() == 5);
  CHECK(r.partial_sums[4].value == doctest::Approx(r.target.value).epsilon(0.05));
  const ChaosCoefficient f0 = chaos_coeff_mc(0, x, std::vector<PointSet>{PointSet(2, 0)}, a, ledger, m, one,
                                             Variant::stratonovich);
  CHECK(within_se(r.terms[0].value, f0.values[0] * f0.values[0], r.terms[0].se, 2.0 * f0.values[0] * f0.ses[0], 3.0));
}
