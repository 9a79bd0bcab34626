#ifndef FQS_NORMS_HPP
#define FQS_NORMS_HPP

#include <map>

#include "fqs/resonance.hpp"
#include "fqs/shells.hpp"

namespace fqs {

// Weighted-norm parameters: lambda in ((alpha-1)/2, 1/2),
// delta = min{(lambda+3/2)/alpha, 3/2} - 1.
struct NormParams {
  double alpha = 1.5;
  double lambda = 0.4;
  double delta = 0.0;

  static NormParams make(double alpha, double lambda) {
    NormParams p{alpha, lambda, decay_delta(alpha, lambda)};
    return p;
  }
};

struct ShellContribution {
  int k = 0;
  double l2_term = 0.0;  // 2^{-lambda k} ||psi_k f^||_2
  double d1_term = 0.0;  // 2^{(1-lambda) k} ||psi_k grad f^||_2
  double d2_term = 0.0;  // 2^{(2-lambda) k} ||psi_k grad^2 f^||_2 (W only)
  double total = 0.0;    // 2^{2k_+} (sum of the terms above)
};

struct WeightedNormReport {
  double value = 0.0;  // sup over shells
  std::vector<ShellContribution> shells;
  bool low_lump_flagged = false;  // mass below 2^{k_min} was lumped into k_min
  double low_lump_l2 = 0.0;
};

// ||f||_W = sup_k 2^{2k_+} (2^{-lk} ||psi_k f^||_2 + 2^{(1-l)k} ||psi_k grad f^||_2
//                           + 2^{(2-l)k} ||psi_k grad^2 f^||_2),
// with grad_xi f^ realized as the transform of (-ix) f and the sup truncated
// to the grid's shell range (sub-k_min mass lumped into the lowest shell).
WeightedNormReport w_norm_report(const DyadicShellSet& shells, const SpectralField& profile,
                                 const NormParams& params);
double w_norm(const DyadicShellSet& shells, const SpectralField& profile, const NormParams& params);

// ||f||_U: same without the second-derivative term.
WeightedNormReport u_norm_report(const DyadicShellSet& shells, const SpectralField& profile,
                                 const NormParams& params);
double u_norm(const DyadicShellSet& shells, const SpectralField& profile, const NormParams& params);

// ---- decay fitting ----

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;  // log-space
  double residual = 0.0;   // rms log-residual
  int points = 0;
};

// Least-squares slope of log(value) against log(1+t) over t in
// [window_lo, window_hi]; needs >= 10 points and refuses clearly non-power-law
// series (rms residual > 0.5).
DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& value,
                   double window_lo, double window_hi);

// ---- trajectory budget ----

struct DiagnosticSeries {
  std::vector<double> times;
  std::map<std::string, std::vector<double>> values;
};

struct BudgetReport {
  std::map<std::string, double> sup_values;  // per diagnostic norm
  double theorem_sum_sup = 0.0;              // sup_t of the six-norm sum
  double implied_constant = 0.0;             // theorem_sum_sup / eps0
};

// Evaluates the sup over stored times of the diagnostic norms and the smallest
// constant making the main-theorem display true for this run.
BudgetReport budget_check(const DiagnosticSeries& diag, const NormParams& params, double eps0);

// ---- interpolation-inequality scan ----

struct InterpolationScan {
  double max_c_l1 = 0.0;   // ||f||_1 / (||f||_2^{1/4} |||x|^2 f||_2^{3/4})
  double max_c_l43 = 0.0;  // ||f||_{4/3} / (||f||_2^{1/4} |||x| f||_2^{3/4})
  int fields = 0;
};

// Measures the inequality constants over a corpus of random smooth fields.
InterpolationScan interpolation_scan(const GridPtr& grid, int field_count, std::mt19937_64& rng);

// Random smooth complex field: Gaussian spectral envelope exp(-|xi|^2/w^2)
// with iid unit-normal coefficients (physically well localized in the box).
SpectralField random_smooth_field(const GridPtr& grid, double envelope_width,
                                  std::mt19937_64& rng);

}  // namespace fqs

#endif
