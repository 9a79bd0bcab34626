#ifndef FQS_SHELLS_HPP
#define FQS_SHELLS_HPP

#include "fqs/bump.hpp"
#include "fqs/field.hpp"

namespace fqs {

// Littlewood-Paley projector family realized on a grid.
//
// Shell symbols are radial and cheap, so they are evaluated on demand rather
// than materialized (a 96^3 grid would need ~100 MB per stored family).
// Active range: shells fully resolvable and un-aliased,
//   k_min = ceil(log2(pi/L)) + 1,   k_max = floor(log2(N pi/(2L))) - 2.
// Mass below 2^{k_min} is handled by the low-pass pseudo-shell psi_{<=k_min-1}.
struct DyadicShellSet {
  GridPtr grid;
  int k_min = 0;
  int k_max = 0;

  int count() const { return k_max - k_min + 1; }
  bool in_range(int k) const { return k >= k_min && k <= k_max; }

  // psi(2^-k |xi|) = phi(2^-k|xi|) - phi(2^-k+1|xi|); support 2^{k-1} <= |xi| <= (5/4)2^k.
  double psi(int k, double xi_abs) const { return lp_psi(std::ldexp(xi_abs, -k)); }
  // psi_{<=k}(|xi|) = phi(2^-k |xi|).
  double psi_low(int k, double xi_abs) const { return lp_phi(std::ldexp(xi_abs, -k)); }

  // Materialized symbol array on the grid (tests and symbol expansion only).
  std::vector<double> symbol(int k) const;
  std::vector<double> low_symbol(int k) const;
};

DyadicShellSet make_shell_set(const GridPtr& grid);

// P_k f; k must lie in [k_min, k_max].
SpectralField lp_project(const DyadicShellSet& shells, const SpectralField& f, int k);
// P_{<=k} f; any k <= k_max is allowed (very low k yields the near-DC residue).
SpectralField lp_project_low(const DyadicShellSet& shells, const SpectralField& f, int k);

// L^2 mass of psi_k-weighted coefficients (Fourier measure), plus the low residue.
double shell_l2(const DyadicShellSet& shells, const SpectralField& f, int k);
double low_shell_l2(const DyadicShellSet& shells, const SpectralField& f);

// Per-axis integer band that contains supp psi_k on the grid.
int shell_band(const DyadicShellSet& shells, int k);

}  // namespace fqs

#endif
