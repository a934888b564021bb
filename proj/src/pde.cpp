#include "pam2d/pde.hpp"

#include "pam2d/parallel.hpp"
#include "pam2d/rng.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pam2d {

DiffusionScheme scheme_from_string(std::string_view name) {
  if (name == "spectral") return DiffusionScheme::spectral;
  if (name == "five_point") return DiffusionScheme::five_point;
  throw InvalidParameter("unknown diffusion scheme '" + std::string(name) + "' (expected spectral or five_point)");
}

std::string to_string(DiffusionScheme scheme) { return scheme == DiffusionScheme::spectral ? "spectral" : "five_point"; }

double max_stable_dt(double spacing, double max_abs_potential, double resolution) {
  double dt = 0.25 * spacing * spacing;
  if (max_abs_potential > 0.0) dt = std::min(dt, resolution / max_abs_potential);
  return dt;
}

namespace {

class HeatStep {
 public:
  HeatStep(Index n, double side, double dt, DiffusionScheme scheme) : scheme_(scheme), dt_(dt), h_(side / n) {
    if (scheme == DiffusionScheme::spectral) {
      multiplier_.resize(n, n);
      for (Index i = 0; i < n; ++i) {
        const double ki = 2.0 * kPi * static_cast<double>(i <= n / 2 ? i : i - n) / side;
        for (Index j = 0; j < n; ++j) {
          const double kj = 2.0 * kPi * static_cast<double>(j <= n / 2 ? j : j - n) / side;
          multiplier_(i, j) = std::exp(-0.5 * dt * (ki * ki + kj * kj));
        }
      }
    }
  }

  void apply(Field& u) {
    if (scheme_ == DiffusionScheme::spectral) {
      buffer_ = u.cast<std::complex<double>>();
      fft::transform(buffer_, false);
      buffer_ *= multiplier_;
      fft::transform(buffer_, true);
      u = buffer_.real();
      return;
    }
    const Index n = u.rows();
    const double c = 0.5 * dt_ / (h_ * h_);
    Field next(n, n);
    for (Index j = 0; j < n; ++j) {
      const Index jm = j == 0 ? n - 1 : j - 1, jp = j + 1 == n ? 0 : j + 1;
      for (Index i = 0; i < n; ++i) {
        const Index im = i == 0 ? n - 1 : i - 1, ip = i + 1 == n ? 0 : i + 1;
        next(i, j) = u(i, j) + c * (u(im, j) + u(ip, j) + u(i, jm) + u(i, jp) - 4.0 * u(i, j));
      }
    }
    u.swap(next);
  }

 private:
  DiffusionScheme scheme_;
  double dt_;
  double h_;
  Eigen::ArrayXXd multiplier_;
  Eigen::ArrayXXcd buffer_;
};

}  // namespace

GridSolution solve_with_potential(const Field& potential, double side, const Field& u0, double t, double dt,
                                  const PdeOptions& options) {
  const Index n = potential.rows();
  require(n > 0 && potential.cols() == n, "potential must be a square grid");
  require(u0.rows() == n && u0.cols() == n, "initial field must match the potential grid");
  require(t > 0.0 && dt > 0.0 && side > 0.0, "t, dt and side must be positive");
  const double h = side / static_cast<double>(n);
  const double vmax = potential.abs().maxCoeff();
  const double admissible = max_stable_dt(h, vmax, options.potential_resolution);
  if (dt > admissible * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt=" << dt << " violates the stability guards (dt <= h^2/4 = " << 0.25 * h * h
        << ", dt*max|V| <= " << options.potential_resolution << "); required dt <= " << admissible;
    throw ConfigurationError(msg.str());
  }
  const auto steps = static_cast<Index>(std::ceil(t / dt * (1.0 - 1e-12)));
  const double step = t / static_cast<double>(steps);

  GridSolution sol;
  sol.side = side;
  sol.spacing = h;
  sol.t = t;
  sol.dt = step;
  sol.steps = steps;
  sol.scheme = options.scheme;
  sol.values = u0;
  sol.min_value = u0.minCoeff();
  const Field half = (0.5 * step * potential).exp();
  HeatStep heat(n, side, step, options.scheme);
  for (Index k = 0; k < steps; ++k) {
    sol.values *= half;
    heat.apply(sol.values);
    sol.values *= half;
    sol.min_value = std::min(sol.min_value, sol.values.minCoeff());
  }
  return sol;
}

GridSolution solve_pam(const NoiseRealization& noise, const Mollifier& mollifier, double eps, const Field& u0,
                       double t, double dt, const PdeOptions& options) {
  const PeriodicField w = smoothed_field(noise, mollifier, eps);
  const Field potential = w.values - renormalization_constant(eps);
  return solve_with_potential(potential, noise.side, u0, t, dt, options);
}

Field sample_on_grid(const InitialCondition& u0, double side, double spacing) {
  const Index n = grid_cells(side, spacing);
  Field f(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) f(i, j) = u0(Point((i + 0.5) * spacing, (j + 0.5) * spacing));
  return f;
}

std::vector<Estimate> feynman_kac_points(const NoiseRealization& noise, const Mollifier& mollifier, double eps,
                                         const InitialCondition& u0, double t, const PointSet& xs, Index n_paths,
                                         Index n_steps, std::uint64_t seed, double guard_ratio) {
  require(t > 0.0 && n_paths >= 2 && n_steps >= 1, "need t > 0, two paths and one step");
  check_step_guard(t / static_cast<double>(n_steps), eps, guard_ratio);
  const PeriodicField w = smoothed_field(noise, mollifier, eps);
  const double shift = renormalization_constant(eps) * t;
  const Index points = xs.cols();
  Eigen::MatrixXd samples(n_paths, points);
  parallel_for(n_paths, [&](Index i) {
    const BrownianPath p = sample_path(t, n_steps, stream_seed(seed, static_cast<std::uint64_t>(i)));
    const double h = p.dt();
    for (Index j = 0; j < points; ++j) {
      const Point x = xs.col(j);
      double value = 0.0;
      for (double sign : {1.0, -1.0}) {
        double integral = 0.5 * (w(x) + w(Point(x + sign * p.end())));
        for (Index k = 1; k < n_steps; ++k) integral += w(Point(x + sign * p.positions.col(k)));
        value += u0(Point(x + sign * p.end())) * std::exp(h * integral - shift);
      }
      samples(i, j) = 0.5 * value;
    }
  });
  std::vector<Estimate> out;
  for (Index j = 0; j < points; ++j) out.push_back(mean_estimate(Eigen::VectorXd(samples.col(j))));
  return out;
}

Estimate feynman_kac_point(const NoiseRealization& noise, const Mollifier& mollifier, double eps,
                           const InitialCondition& u0, double t, const Point& x, Index n_paths, Index n_steps,
                           std::uint64_t seed, double guard_ratio) {
  PointSet xs(2, 1);
  xs.col(0) = x;
  return feynman_kac_points(noise, mollifier, eps, u0, t, xs, n_paths, n_steps, seed, guard_ratio)[0];
}

void GridSolution::write_csv(std::ostream& out) const {
  out << "x,y,value\n";
  out.precision(17);
  for (Index j = 0; j < values.cols(); ++j)
    for (Index i = 0; i < values.rows(); ++i)
      out << (i + 0.5) * spacing << ',' << (j + 0.5) * spacing << ',' << values(i, j) << '\n';
}

namespace {
constexpr std::array<char, 8> kGridMagic{'P', 'A', 'M', '2', 'D', 'G', 'S', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InvalidParameter("truncated grid file");
  return v;
}
}  // namespace

void GridSolution::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InvalidParameter("cannot open " + file.string() + " for writing");
  out.write(kGridMagic.data(), kGridMagic.size());
  put(out, side);
  put(out, spacing);
  put(out, t);
  put(out, dt);
  put<std::int64_t>(out, steps);
  put<std::int64_t>(out, values.rows());
  put<std::int64_t>(out, values.cols());
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
}

GridSolution GridSolution::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open " + file.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kGridMagic) throw InvalidParameter(file.string() + " is not a grid solution file");
  GridSolution s;
  s.side = get<double>(in);
  s.spacing = get<double>(in);
  s.t = get<double>(in);
  s.dt = get<double>(in);
  s.steps = get<std::int64_t>(in);
  const auto nx = get<std::int64_t>(in), ny = get<std::int64_t>(in);
  if (nx < 1 || ny < 1) throw InvalidParameter("invalid grid dimensions");
  s.values.resize(nx, ny);
  in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
  if (!in) throw InvalidParameter("truncated grid file");
  s.min_value = s.values.minCoeff();
  return s;
}

}  // namespace pam2d
