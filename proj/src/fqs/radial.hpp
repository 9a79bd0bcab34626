#ifndef FQS_RADIAL_HPP
#define FQS_RADIAL_HPP

#include "fqs/common.hpp"

namespace fqs {

// Radial Fourier profile f^(rho) sampled on [0, rho_max]; ground truth for the
// 3D fractional propagator on radial data via the 1D reduction
//   u(t,r) = (2pi)^{-3/2} (4pi/r) int_0^inf sin(r rho) e^{-it rho^a} f^(rho) rho drho
// (the angular integral over S^2 contributes 4pi sin(r rho)/(r rho)).
struct RadialProfile {
  std::vector<double> nodes;   // increasing, on [0, rho_max]
  std::vector<double> values;  // f^(nodes); real profiles suffice for the oracle
  double support_lo = 0.0;     // f^ == 0 outside [support_lo, support_hi]
  double support_hi = 0.0;

  double operator()(double rho) const;  // cubic (Catmull-Rom) interpolation
};

// Band-limited bump on [2^{k-1}, 2^{k+1}]: f^(rho) = amp * psi-style bump
// centered at 2^k, sampled on `node_count` nodes.
RadialProfile shell_profile(int k, double amplitude = 1.0, int node_count = 2048);
// Gaussian profile exp(-(rho/width)^2) truncated at rho_max.
RadialProfile gaussian_profile(double width, double rho_max, double amplitude = 1.0,
                               int node_count = 2048);

// ||f||_2 over R^3 = (4pi int |f^|^2 rho^2 drho)^{1/2}.
double radial_l2(const RadialProfile& p);

struct RadialQuadratureOptions {
  double tolerance = 1e-8;  // successive-refinement agreement
  int max_refinements = 8;
  int min_panels = 16;
};

// One point of the propagated field; r >= 0 (r = 0 via the sin(r rho)/r -> rho
// limit), t >= 0.  Gauss-Legendre panels sized so both phases r*rho and
// t*rho^a advance < pi/4 per panel; refined until two levels agree.
cplx radial_propagate(const RadialProfile& p, double alpha, double t, double r,
                      const RadialQuadratureOptions& opts = {});

// Shared-panel evaluation on an r grid (one pass over quadrature nodes).
std::vector<cplx> radial_propagate_grid(const RadialProfile& p, double alpha, double t,
                                        const std::vector<double>& r_grid,
                                        const RadialQuadratureOptions& opts = {});

struct DecayScanRow {
  double t = 0.0;
  double sup = 0.0;  // sup_r |u(t,r)|
  double l4 = 0.0;   // (4pi int |u|^4 r^2 dr)^{1/4}
  double l6 = 0.0;
  double l2 = 0.0;   // conservation diagnostic
};

// Default r grid: stationary-phase window t*a*[rho_lo^{a-1}, rho_hi^{a-1}]
// padded both ways, plus coverage near r = 0.
std::vector<double> default_r_grid(const RadialProfile& p, double alpha, double t,
                                   int max_points = 1600);

std::vector<DecayScanRow> decay_scan(const RadialProfile& p, double alpha,
                                     const std::vector<double>& t_grid,
                                     const std::vector<double>& r_grid = {},
                                     const RadialQuadratureOptions& opts = {});

}  // namespace fqs

#endif
