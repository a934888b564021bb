#include "pam2d/noise.hpp"

#include "pam2d/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pam2d {

Index grid_cells(double side, double spacing) {
  require(side > 0.0 && spacing > 0.0, "torus side and grid spacing must be positive");
  const double ratio = side / spacing;
  const auto n = static_cast<Index>(std::llround(ratio));
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
    throw InvalidParameter("torus side must be an integer multiple of the grid spacing");
  }
  return n;
}

double PeriodicField::operator()(double x, double y) const {
  const Index n = values.rows();
  const double u = x / spacing - 0.5;
  const double v = y / spacing - 0.5;
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  const double a = u - fu;
  const double b = v - fv;
  auto wrap = [n](double k) {
    Index i = static_cast<Index>(k) % n;
    return i < 0 ? i + n : i;
  };
  const Index i0 = wrap(fu), j0 = wrap(fv);
  const Index i1 = i0 + 1 == n ? 0 : i0 + 1;
  const Index j1 = j0 + 1 == n ? 0 : j0 + 1;
  return (1 - a) * ((1 - b) * values(i0, j0) + b * values(i0, j1)) + a * ((1 - b) * values(i1, j0) + b * values(i1, j1));
}

NoiseRealization NoiseRealization::sample(double side, double spacing, std::uint64_t seed) {
  const Index n = grid_cells(side, spacing);
  NoiseRealization noise{side, spacing, seed, Field(n, n)};
  Engine engine(seed);
  StandardNormal normal;
  double* data = noise.increments.data();
  for (Index k = 0; k < n * n; ++k) data[k] = spacing * normal(engine);
  return noise;
}

namespace {
constexpr std::array<char, 8> kNoiseMagic{'P', 'A', 'M', '2', 'D', 'N', 'Z', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void NoiseRealization::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  out.write(kNoiseMagic.data(), kNoiseMagic.size());
  put(out, side);
  put(out, spacing);
  put(out, seed);
  put(out, static_cast<std::int64_t>(increments.rows()));
  put(out, static_cast<std::int64_t>(increments.cols()));
  out.write(reinterpret_cast<const char*>(increments.data()),
            static_cast<std::streamsize>(sizeof(double) * increments.size()));
  if (!out) throw std::runtime_error("failed writing " + file.string());
}

NoiseRealization NoiseRealization::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (magic != kNoiseMagic) throw std::runtime_error(file.string() + " is not a noise realization file");
  NoiseRealization noise;
  noise.side = get<double>(in);
  noise.spacing = get<double>(in);
  noise.seed = get<std::uint64_t>(in);
  const auto nx = get<std::int64_t>(in);
  const auto ny = get<std::int64_t>(in);
  if (!in || nx <= 0 || ny <= 0) throw std::runtime_error("corrupt header in " + file.string());
  noise.increments.resize(nx, ny);
  in.read(reinterpret_cast<char*>(noise.increments.data()),
          static_cast<std::streamsize>(sizeof(double) * noise.increments.size()));
  if (!in) throw std::runtime_error("truncated noise file " + file.string());
  return noise;
}

void check_noise_resolution(double spacing, double eps) {
  if (spacing > eps / 8.0 * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid spacing h=" << spacing << " does not resolve eps=" << eps << " (guard h <= eps/8 = " << eps / 8.0
        << ")";
    throw ConfigurationError(msg.str());
  }
}

double smoothed_value(const NoiseRealization& noise, const Mollifier& mollifier, double eps, const Point& x) {
  check_noise_resolution(noise.spacing, eps);
  const Index n = noise.cells();
  const double h = noise.spacing;
  const double reach = eps * mollifier.support_radius();
  const auto lo_i = static_cast<Index>(std::floor((x.x() - reach) / h - 0.5));
  const auto hi_i = static_cast<Index>(std::ceil((x.x() + reach) / h - 0.5));
  const auto lo_j = static_cast<Index>(std::floor((x.y() - reach) / h - 0.5));
  const auto hi_j = static_cast<Index>(std::ceil((x.y() + reach) / h - 0.5));
  double sum = 0.0;
  for (Index i = lo_i; i <= hi_i; ++i) {
    const Index wi = ((i % n) + n) % n;
    for (Index j = lo_j; j <= hi_j; ++j) {
      const Index wj = ((j % n) + n) % n;
      const Point d(x.x() - (i + 0.5) * h, x.y() - (j + 0.5) * h);
      sum += mollifier(eps, d) * noise.increments(wi, wj);
    }
  }
  return sum;
}

PeriodicField smoothed_field(const NoiseRealization& noise, const Mollifier& mollifier, double eps) {
  check_noise_resolution(noise.spacing, eps);
  const Index n = noise.cells();
  const double h = noise.spacing;
  // Kernel K(i, j) = phi_eps of the torus offset (i h, j h).
  Eigen::ArrayXXcd kernel = Eigen::ArrayXXcd::Zero(n, n);
  const auto reach = static_cast<Index>(std::ceil(eps * mollifier.support_radius() / h));
  for (Index a = -reach; a <= reach; ++a) {
    for (Index b = -reach; b <= reach; ++b) {
      kernel(((a % n) + n) % n, ((b % n) + n) % n) += mollifier(eps, Point(a * h, b * h));
    }
  }
  Eigen::ArrayXXcd data = noise.increments.cast<std::complex<double>>();
  fft::transform(kernel, false);
  fft::transform(data, false);
  data *= kernel;
  fft::transform(data, true);
  return {noise.side, h, data.real()};
}

namespace fft {

void transform(Eigen::ArrayXXcd& data, bool inverse) {
  Eigen::FFT<double> engine;
  Eigen::VectorXcd in, out;
  auto pass = [&](auto&& line) {
    in = line;
    if (inverse) {
      engine.inv(out, in);
    } else {
      engine.fwd(out, in);
    }
    line = out;
  };
  for (Index j = 0; j < data.cols(); ++j) pass(data.col(j).matrix());
  for (Index i = 0; i < data.rows(); ++i) pass(data.row(i).matrix().transpose());
}

}  // namespace fft
}  // namespace pam2d
