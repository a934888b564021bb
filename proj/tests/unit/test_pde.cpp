#include <doctest.h>

#include "pam2d/pde.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace pam2d;

namespace {

double periodic_heat(double t, const Point& x, double side) {
  double sum = 0.0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) sum += heat_kernel(t, Point(x + side * Point(a, b)));
  return sum;
}

// Unit mass on the cell containing `at`.
Field point_mass(Index n, double h, Index i, Index j) {
  Field f = Field::Zero(n, n);
  f(i, j) = 1.0 / (h * h);
  return f;
}

}  // namespace

TEST_CASE("pure heat flow from a point mass matches the periodized heat kernel") {
  const double side = 2.0, t = 0.05;
  const Index n = 80;
  const double h = side / n;
  const Field u0 = point_mass(n, h, 40, 40);
  const Field zero = Field::Zero(n, n);
  for (DiffusionScheme scheme : {DiffusionScheme::spectral, DiffusionScheme::five_point}) {
    PdeOptions opt;
    opt.scheme = scheme;
    const GridSolution s = solve_with_potential(zero, side, u0, t, 0.25 * h * h, opt);
    double l1 = 0.0;
    const Point centre((40 + 0.5) * h, (40 + 0.5) * h);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i)
        l1 += std::abs(s.values(i, j) - periodic_heat(t, Point(Point((i + 0.5) * h, (j + 0.5) * h) - centre), side)) * h * h;
    CHECK(l1 < 0.01);
    CHECK(s.mass() == doctest::Approx(1.0).epsilon(1e-10));
    if (scheme == DiffusionScheme::five_point) CHECK(s.min_value >= 0.0);
  }
}

TEST_CASE("heat flow conserves mass step by step") {
  const double side = 1.0;
  const Index n = 32;
  const double h = side / n;
  Field u0(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) u0(i, j) = 1.0 + std::sin(2.0 * kPi * i * h) * std::cos(4.0 * kPi * j * h) + 0.01 * i;
  const double m0 = u0.sum() * h * h;
  for (DiffusionScheme scheme : {DiffusionScheme::spectral, DiffusionScheme::five_point}) {
    PdeOptions opt;
    opt.scheme = scheme;
    const Field zero = Field::Zero(n, n);
    const GridSolution one = solve_with_potential(zero, side, u0, 0.25 * h * h, 0.25 * h * h, opt);
    CHECK(one.steps == 1);
    CHECK(std::abs(one.mass() - m0) <= 1e-10 * m0);
    CHECK(one.min_value >= 0.0);
  }
}

TEST_CASE("constant potential multiplies the heat solution by exp(ct)") {
  const double side = 1.0, t = 0.02, c = 1.7;
  const Index n = 40;
  const double h = side / n;
  Field u0(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) u0(i, j) = 2.0 + std::cos(2.0 * kPi * i * h) * std::sin(2.0 * kPi * j * h);
  const GridSolution plain = solve_with_potential(Field::Zero(n, n), side, u0, t, 0.25 * h * h);
  const GridSolution scaled = solve_with_potential(Field::Constant(n, n, c), side, u0, t, 0.25 * h * h);
  CHECK(((scaled.values / plain.values) / std::exp(c * t) - 1.0).abs().maxCoeff() <= 1e-6);
}

TEST_CASE("stability guards name the admissible time step") {
  const Index n = 16;
  const Field u0 = Field::Ones(n, n);
  try {
    solve_with_potential(Field::Zero(n, n), 1.0, u0, 0.1, 0.01);
    FAIL("expected a guard violation");
  } catch (const ConfigurationError& e) {
    CHECK(std::string(e.what()).find("required dt <= 0.000976") != std::string::npos);
  }
  CHECK_THROWS_AS(solve_with_potential(Field::Constant(n, n, 1000.0), 1.0, u0, 0.1, 5e-4), ConfigurationError);
  CHECK(max_stable_dt(0.1, 1000.0) == doctest::Approx(1e-4));
}

TEST_CASE("grid solutions round-trip through CSV and binary exports") {
  const Index n = 8;
  const GridSolution s = solve_with_potential(Field::Zero(n, n), 1.0, Field::Ones(n, n), 0.001, 0.001);
  const auto file = std::filesystem::temp_directory_path() / "pam2d_grid_roundtrip.bin";
  s.save(file);
  const GridSolution r = GridSolution::load(file);
  std::filesystem::remove(file);
  CHECK((r.values == s.values).all());
  CHECK(r.dt == s.dt);
  CHECK(r.steps == s.steps);
  std::ostringstream out;
  s.write_csv(out);
  CHECK(out.str().rfind("x,y,value\n0.0625,0.0625,1", 0) == 0);
}

TEST_CASE("Feynman-Kac without noise reduces to the heat semigroup") {
  const Mollifier m;
  const double eps = 0.1, t = 0.02;
  NoiseRealization quiet = NoiseRealization::sample(1.0, 0.0125, 1);
  quiet.increments.setZero();
  const InitialCondition u0 = InitialCondition::function([](const Point& z) { return std::exp(0.8 * z.x()); });
  const Point x(0.3, 0.6);
  const Estimate e = feynman_kac_point(quiet, m, eps, u0, t, x, 20000, 20, 5);
  const double exact = std::exp(0.8 * x.x() + 0.32 * t) * std::exp(-renormalization_constant(eps) * t);
  CHECK(within_se(e.value, exact, e.se, 0.0, 3.0));
  const Estimate zero = feynman_kac_point(quiet, m, eps, InitialCondition::constant(0.0), t, x, 100, 20, 5);
  CHECK(zero.value == 0.0);
  CHECK(zero.se == 0.0);
}

TEST_CASE("Feynman-Kac agrees with the PDE on a small torus") {
  const Mollifier m;
  const double eps = 0.1, t = 0.02, side = 1.0, h = eps / 8.0;
  const NoiseRealization noise = NoiseRealization::sample(side, h, 17);
  const Field u0 = Field::Ones(grid_cells(side, h), grid_cells(side, h));
  const GridSolution pde = solve_pam(noise, m, eps, u0, t, 0.25 * h * h);
  CHECK(pde.min_value > 0.0);
  PointSet xs(2, 3);
  xs.col(0) = Point(2.5 * h, 2.5 * h);
  xs.col(1) = Point(40.5 * h, 10.5 * h);
  xs.col(2) = Point(70.5 * h, 60.5 * h);
  const std::vector<Estimate> fk =
      feynman_kac_points(noise, m, eps, InitialCondition::constant(1.0), t, xs, 40000, guarded_steps(t, eps), 3);
  const PeriodicField u = pde.field();
  for (Index j = 0; j < 3; ++j) CHECK(fk[static_cast<std::size_t>(j)].value == doctest::Approx(u(Point(xs.col(j)))).epsilon(0.03));
}
