#ifndef FQS_GRID_HPP
#define FQS_GRID_HPP

#include <memory>
#include <vector>

#include "fqs/common.hpp"

namespace fqs {

// Periodic grid on [-L, L)^dim with N points per axis.
//
// Conventions (fixed once, used everywhere):
//   x_j   = -L + j h,      h  = 2L/N,   j = 0..N-1
//   xi_m  = m~ * dxi,      dxi = pi/L,  m~ = m for m < N/2, m - N otherwise
// Spectral coefficients approximate the continuum transform
//   u^(xi) = (2pi)^{-d/2} \int e^{-i x xi} u(x) dx
// via the trapezoid sum, so coefficient values are grid-independent for
// band-limited fields and discrete Plancherel
//   h^d sum |u|^2 = dxi^d sum |u^|^2
// holds exactly.
struct Grid {
  int dim = 3;          // 1 or 3
  int n = 0;            // points per axis (power of two, >= 8)
  double half_width = 0.0;  // L
  double spacing = 0.0;     // h = 2L/N
  double dxi = 0.0;         // pi/L
  std::vector<double> xi_axis;  // wavenumber per FFT index (DC-first order)
  std::vector<double> x_axis;   // physical coordinate per index

  std::size_t size() const {
    std::size_t s = 1;
    for (int d = 0; d < dim; ++d) s *= static_cast<std::size_t>(n);
    return s;
  }
  double xi_nyquist() const { return dxi * (n / 2); }
  // Wavenumber magnitude at a flat index.
  double xi_abs(std::size_t flat) const;
  // Per-axis signed integer wavenumber index (m~) from FFT index.
  int signed_index(int m) const { return m < n / 2 ? m : m - n; }

  bool operator==(const Grid& o) const {
    return dim == o.dim && n == o.n && half_width == o.half_width;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

// Rejects dim not in {1,3}, non-power-of-two N, N < 8, L <= 0.
GridPtr make_grid(int dim, int points_per_axis, double half_width);

}  // namespace fqs

#endif
