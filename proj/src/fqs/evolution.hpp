#ifndef FQS_EVOLUTION_HPP
#define FQS_EVOLUTION_HPP

#include <functional>

#include "fqs/norms.hpp"
#include "fqs/paraproduct.hpp"

namespace fqs {

enum class Scheme { rk4_interaction, split_strang };
enum class SystemKind { original, transformed };

struct StepperConfig {
  Scheme scheme = Scheme::rk4_interaction;
  double dt = 0.01;
  bool dealias = true;
  cplx coupling{1.0, 0.0};  // the equation's lambda; plays no structural role
};

// Time-indexed profile sequence.  `primary` holds g^ = e^{it|xi|^a} u^ for the
// original system and f^ (the w profile) for the transformed one; `secondary`
// holds the recovered g^ in the transformed case.  Fields are retained only
// when requested (large grids stream through the output callback instead).
struct Trajectory {
  GridPtr grid;
  double alpha = 1.5;
  std::vector<double> times;
  std::vector<SpectralField> primary;
  std::vector<SpectralField> secondary;
  DiagnosticSeries diagnostics;
  bool wrap_aborted = false;
  double wrap_bound = 0.0;        // estimated from the initial data
  double stability_product = 0.0;  // dt * nonlinear frequency estimate (reported)
};

struct EvolveOptions {
  StepperConfig stepper;
  NormParams params;  // lambda etc. for W/U diagnostics
  int output_every = 10;
  bool keep_fields = true;
  bool w_diagnostics = true;  // original kind: also form w = u + i c B(u, conj u) at outputs
  double invert_tolerance = 1e-11;
  BOperatorOptions bop;
  // Streaming hook: (t, primary profile, secondary profile or nullptr).
  std::function<void(double, const SpectralField&, const SpectralField*)> on_output;
};

// Profile-frame derivative of the original equation at time s:
//   d/ds g^ = coupling * e^{is|xi|^a} (u conj u)^,  u^ = e^{-is|xi|^a} g^.
SpectralField rhs_original(const SpectralField& g_profile, double alpha, double s,
                           const cplx& coupling);

// Profile-frame derivative of the transformed system at time s, given both
// profiles:
//   c (w conj w)_{HH+HL} + i|c|^2 [w conj B]_{HH+HL} - i c^2 [B conj u... ]
// i.e. the five-term right side with the coupling carried through the
// normal form w = u + i c B(u, conj u).
SpectralField rhs_transformed(const DyadicShellSet& shells, double alpha,
                              const SpectralField& f_profile, const SpectralField& g_profile,
                              double s, const cplx& coupling, const BOperatorOptions& bop = {});

// Wrap guard: time at which the fastest populated group velocity
// alpha * (2^{k_top})^{alpha-1} crosses half the box.
double wrap_bound_estimate(const DyadicShellSet& shells, const SpectralField& field, double alpha);

Trajectory evolve(const DyadicShellSet& shells, double alpha, const SpectralField& u0,
                  double t_end, SystemKind kind, const EvolveOptions& opts);

// ---- initial data families ----

// u0^(xi) = eps0 2^{lambda k0} bump((|xi|-2^{k0})/width) e^{i theta(xi)} with a
// seeded random smooth phase theta.
SpectralField shell_bump_data(const GridPtr& grid, int k0, double eps0, double lambda,
                              double rel_width, std::uint64_t seed);

// Gaussian spectral envelope centered at the origin.
SpectralField gaussian_data(const GridPtr& grid, double eps0, double width, std::uint64_t seed);

// Amplitude bisection for the empirical smallness threshold: largest eps0 (up
// to factor 2) for which a short-horizon run stays regular (no blow-up, normal
// form inverts, diagnostic norms below `growth_cap` x initial).
double locate_smallness_threshold(const DyadicShellSet& shells, double alpha,
                                  const SpectralField& unit_data, const EvolveOptions& opts,
                                  double horizon, double growth_cap = 2.0, int bisection_steps = 6);

}  // namespace fqs

#endif
