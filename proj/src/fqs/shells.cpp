#include "fqs/shells.hpp"

#include <cmath>

namespace fqs {

DyadicShellSet make_shell_set(const GridPtr& grid) {
  DyadicShellSet s;
  s.grid = grid;
  s.k_min = static_cast<int>(std::ceil(std::log2(kPi / grid->half_width))) + 1;
  s.k_max = static_cast<int>(std::floor(std::log2(grid->n * kPi / (2.0 * grid->half_width)))) - 2;
  if (s.k_max < s.k_min)
    fail_validation("shell set: grid resolves no full dyadic shell (increase N or adjust L)");
  return s;
}

std::vector<double> DyadicShellSet::symbol(int k) const {
  std::vector<double> a(grid->size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = psi(k, grid->xi_abs(i));
  return a;
}

std::vector<double> DyadicShellSet::low_symbol(int k) const {
  std::vector<double> a(grid->size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = psi_low(k, grid->xi_abs(i));
  return a;
}

SpectralField lp_project(const DyadicShellSet& shells, const SpectralField& f, int k) {
  if (!shells.in_range(k))
    fail_validation("lp_project: shell index " + std::to_string(k) + " outside active range [" +
                    std::to_string(shells.k_min) + "," + std::to_string(shells.k_max) + "]");
  return apply_radial_multiplier(f, [&](double r) { return shells.psi(k, r); });
}

SpectralField lp_project_low(const DyadicShellSet& shells, const SpectralField& f, int k) {
  // k_max+2 is legal: the bilinear engine uses edge windows just above the
  // active range to cover the dealias-safe product band.
  if (k > shells.k_max + 2) fail_validation("lp_project_low: shell index above active range");
  return apply_radial_multiplier(f, [&](double r) { return shells.psi_low(k, r); });
}

double shell_l2(const DyadicShellSet& shells, const SpectralField& f, int k) {
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const double w = shells.psi(k, g.xi_abs(i));
    if (w != 0.0) acc += sq(w) * std::norm(f.coeffs[i]);
  }
  return std::sqrt(acc * std::pow(g.dxi, g.dim));
}

double low_shell_l2(const DyadicShellSet& shells, const SpectralField& f) {
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const double w = shells.psi_low(shells.k_min - 1, g.xi_abs(i));
    if (w != 0.0) acc += sq(w) * std::norm(f.coeffs[i]);
  }
  return std::sqrt(acc * std::pow(g.dxi, g.dim));
}

int shell_band(const DyadicShellSet& shells, int k) {
  const double top = 1.25 * std::ldexp(1.0, k);
  return static_cast<int>(std::ceil(top / shells.grid->dxi));
}

}  // namespace fqs
