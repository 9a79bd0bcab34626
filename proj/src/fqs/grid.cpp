#include "fqs/grid.hpp"

#include <cmath>

namespace fqs {

double Grid::xi_abs(std::size_t flat) const {
  if (dim == 1) return std::fabs(xi_axis[flat]);
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t i2 = flat % nn;
  const std::size_t i1 = (flat / nn) % nn;
  const std::size_t i0 = flat / (nn * nn);
  const double a = xi_axis[i0], b = xi_axis[i1], c = xi_axis[i2];
  return std::sqrt(a * a + b * b + c * c);
}

GridPtr make_grid(int dim, int points_per_axis, double half_width) {
  if (dim != 1 && dim != 3) fail_validation("grid: dim must be 1 or 3, got " + std::to_string(dim));
  if (points_per_axis < 8 || !is_pow2(points_per_axis))
    fail_validation("grid: points_per_axis must be a power of two >= 8, got " +
                    std::to_string(points_per_axis));
  if (!(half_width > 0.0)) fail_validation("grid: half_width must be positive");

  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->n = points_per_axis;
  g->half_width = half_width;
  g->spacing = 2.0 * half_width / points_per_axis;
  g->dxi = kPi / half_width;
  g->xi_axis.resize(points_per_axis);
  g->x_axis.resize(points_per_axis);
  for (int m = 0; m < points_per_axis; ++m) {
    const int ms = m < points_per_axis / 2 ? m : m - points_per_axis;
    g->xi_axis[m] = g->dxi * ms;
    g->x_axis[m] = -half_width + g->spacing * m;
  }
  return g;
}

}  // namespace fqs
