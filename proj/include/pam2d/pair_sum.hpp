#pragma once

#include "pam2d/common.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pam2d {
namespace detail {

// Points binned into square cells (counting sort, CSR layout). Any pair closer
// than the cell size lies in the same or in adjacent cells.
struct CellGrid {
  double x0 = 0.0, y0 = 0.0, inv_cell = 0.0;
  Index nx = 1, ny = 1;
  std::vector<Index> start;
  std::vector<double> xs, ys;
  std::vector<Index> ids;  // column of each sorted point in the input

  CellGrid(const PointSet& pts, double cell) {
    const Index n = pts.cols();
    x0 = n ? pts.row(0).minCoeff() : 0.0;
    y0 = n ? pts.row(1).minCoeff() : 0.0;
    const double wx = n ? pts.row(0).maxCoeff() - x0 : 0.0;
    const double wy = n ? pts.row(1).maxCoeff() - y0 : 0.0;
    // cap the cell count; larger cells stay correct, only slower
    cell = std::max({cell, wx / 4096.0, wy / 4096.0, 1e-300});
    inv_cell = 1.0 / cell;
    nx = static_cast<Index>(wx * inv_cell) + 1;
    ny = static_cast<Index>(wy * inv_cell) + 1;
    start.assign(static_cast<std::size_t>(nx * ny + 1), 0);
    std::vector<Index> owner(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const Index c = clamp_x(pts(0, i)) + nx * clamp_y(pts(1, i));
      owner[i] = c;
      ++start[c + 1];
    }
    for (std::size_t c = 1; c < start.size(); ++c) start[c] += start[c - 1];
    std::vector<Index> fill(start.begin(), start.end() - 1);
    xs.resize(static_cast<std::size_t>(n));
    ys.resize(static_cast<std::size_t>(n));
    ids.resize(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
      const Index slot = fill[owner[i]]++;
      xs[slot] = pts(0, i);
      ys[slot] = pts(1, i);
      ids[slot] = i;
    }
  }

  /// Calls visit(id, dx, dy) with dx = x - point for every point in the
  /// cells within one cell of (x, y).
  template <class Visit>
  void for_each_near(double x, double y, Visit&& visit) const {
    const double fx = std::floor((x - x0) * inv_cell);
    const double fy = std::floor((y - y0) * inv_cell);
    if (fx < -1.0 || fy < -1.0 || fx > static_cast<double>(nx) || fy > static_cast<double>(ny)) return;
    const auto cx = static_cast<Index>(fx), cy = static_cast<Index>(fy);
    for (Index j = std::max<Index>(cy - 1, 0); j <= std::min(cy + 1, ny - 1); ++j) {
      for (Index i = std::max<Index>(cx - 1, 0); i <= std::min(cx + 1, nx - 1); ++i) {
        const Index c = i + nx * j;
        for (Index k = start[c]; k < start[c + 1]; ++k) visit(ids[k], x - xs[k], y - ys[k]);
      }
    }
  }

  Index clamp_x(double x) const { return std::clamp<Index>(static_cast<Index>((x - x0) * inv_cell), 0, nx - 1); }
  Index clamp_y(double y) const { return std::clamp<Index>(static_cast<Index>((y - y0) * inv_cell), 0, ny - 1); }
};

}  // namespace detail

/// Sum of kernel(p_i - p_j) over unordered pairs i < j. The kernel must
/// vanish for |p_i - p_j| >= range.
template <class Kernel>
double self_pair_sum(const PointSet& pts, double range, const Kernel& kernel) {
  const detail::CellGrid grid(pts, range);
  double sum = 0.0;
  constexpr Index forward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
  for (Index cy = 0; cy < grid.ny; ++cy) {
    for (Index cx = 0; cx < grid.nx; ++cx) {
      const Index c = cx + grid.nx * cy;
      const Index b = grid.start[c], e = grid.start[c + 1];
      for (Index i = b; i < e; ++i) {
        const double xi = grid.xs[i], yi = grid.ys[i];
        for (Index j = i + 1; j < e; ++j) sum += kernel(xi - grid.xs[j], yi - grid.ys[j]);
      }
      for (const auto& off : forward) {
        const Index nxc = cx + off[0], nyc = cy + off[1];
        if (nxc < 0 || nxc >= grid.nx || nyc >= grid.ny) continue;
        const Index d = nxc + grid.nx * nyc;
        const Index b2 = grid.start[d], e2 = grid.start[d + 1];
        for (Index i = b; i < e; ++i) {
          const double xi = grid.xs[i], yi = grid.ys[i];
          for (Index j = b2; j < e2; ++j) sum += kernel(xi - grid.xs[j], yi - grid.ys[j]);
        }
      }
    }
  }
  return sum;
}

/// Sum of kernel(a_i - b_j) over all i, j.
template <class Kernel>
double cross_pair_sum(const PointSet& a, const PointSet& b, double range, const Kernel& kernel) {
  const detail::CellGrid grid(b, range);
  double sum = 0.0;
  for (Index i = 0; i < a.cols(); ++i) {
    const double xi = a(0, i), yi = a(1, i);
    const double fx = std::floor((xi - grid.x0) * grid.inv_cell);
    const double fy = std::floor((yi - grid.y0) * grid.inv_cell);
    if (fx < -1.0 || fy < -1.0 || fx > static_cast<double>(grid.nx) || fy > static_cast<double>(grid.ny)) continue;
    const auto cx = static_cast<Index>(fx), cy = static_cast<Index>(fy);
    for (Index y = std::max<Index>(cy - 1, 0); y <= std::min(cy + 1, grid.ny - 1); ++y) {
      for (Index x = std::max<Index>(cx - 1, 0); x <= std::min(cx + 1, grid.nx - 1); ++x) {
        const Index c = x + grid.nx * y;
        for (Index j = grid.start[c]; j < grid.start[c + 1]; ++j) sum += kernel(xi - grid.xs[j], yi - grid.ys[j]);
      }
    }
  }
  return sum;
}

/// O(n^2) reference versions of the two sums above.
template <class Kernel>
double self_pair_sum_direct(const PointSet& pts, const Kernel& kernel) {
  double sum = 0.0;
  for (Index i = 0; i < pts.cols(); ++i)
    for (Index j = i + 1; j < pts.cols(); ++j) sum += kernel(pts(0, i) - pts(0, j), pts(1, i) - pts(1, j));
  return sum;
}

template <class Kernel>
double cross_pair_sum_direct(const PointSet& a, const PointSet& b, const Kernel& kernel) {
  double sum = 0.0;
  for (Index i = 0; i < a.cols(); ++i)
    for (Index j = 0; j < b.cols(); ++j) sum += kernel(a(0, i) - b(0, j), a(1, i) - b(1, j));
  return sum;
}

}  // namespace pam2d
