#ifndef FQS_BUMP_HPP
#define FQS_BUMP_HPP

#include <cmath>

namespace fqs {

// C-infinity step built from sigma(x) = exp(-1/x): 0 for u<=0, 1 for u>=1,
// strictly increasing in between. All Littlewood-Paley profiles derive from it.
inline double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// Radial low-pass profile: even, non-increasing in |r|, == 1 on [-1,1],
// supported in [-5/4, 5/4].  This is the varphi of the dyadic decomposition;
// any admissible profile changes only constants.
inline double lp_phi(double r) {
  const double a = std::fabs(r);
  if (a <= 1.0) return 1.0;
  if (a >= 1.25) return 0.0;
  return 1.0 - smooth_step((a - 1.0) * 4.0);
}

// Shell profile psi(r) = phi(r) - phi(2r); supported in 1/2 <= |r| <= 5/4,
// == 1 at |r| = 1, and sum_k psi(2^-k r) == 1 for r != 0.
inline double lp_psi(double r) { return lp_phi(r) - lp_phi(2.0 * r); }

// Companion window for bilinear symbol separation: == 1 on supp psi
// ([1/2, 5/4]), supported in [1/8, 9/4].  The transitions are as wide as the
// series cube allows; window smoothness sets the modulation-term count.
inline double lp_psi_wide(double r) {
  const double a = std::fabs(r);
  return smooth_step((a - 0.125) / 0.375) * (1.0 - smooth_step(a - 1.25));
}

// Companion window for the low-pass pseudo-shell: == 1 on supp phi
// ([0, 5/4]), supported in [0, 9/4].
inline double lp_phi_wide(double r) {
  const double a = std::fabs(r);
  return 1.0 - smooth_step(a - 1.25);
}

}  // namespace fqs

#endif
