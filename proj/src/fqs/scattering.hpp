#ifndef FQS_SCATTERING_HPP
#define FQS_SCATTERING_HPP

#include "fqs/evolution.hpp"

namespace fqs {

// Successive profile differences ||g(t_{i+1}) - g(t_i)||_{H^10}: scattering
// means this series is Cauchy (differences decay like t^{-delta'}).
std::vector<double> forward_profile_cauchy(const Trajectory& traj);

// Mesh fields restricted to a band-matched box (profiles stay band-limited,
// full-grid storage would dominate memory).
struct ProfileSeries {
  GridPtr box;
  int band = 0;
  std::vector<double> times;
  std::vector<SpectralField> fields;

  SpectralField at(const GridPtr& full, std::size_t i) const;
};

struct FinalDataReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> diff_norms;           // sup-over-mesh H^10 differences per iteration
  std::vector<double> contraction_factors;  // diff_n / diff_{n-1}
  double quadrature_richardson = 0.0;       // half-mesh consistency of the last iterate
  double tail_defect_estimate = 0.0;        // dropped [T,inf) Duhamel tail bound
};

struct FinalDataResult {
  ProfileSeries w_profiles;  // f^(t_i)
  ProfileSeries u_profiles;  // g^(t_i)
  FinalDataReport report;
};

struct FinalDataOptions {
  cplx coupling{1.0, 0.0};
  double mesh_dt = 0.25;
  int max_iterations = 12;
  double tolerance = 1e-8;  // relative to ||f_inf||_{H^10}
  BOperatorOptions bop;
};

// Picard iteration for the final-data problem on [0, T_max]: each iterate
// solves the linear-forcing backward Duhamel problems
//   f^(t) = f_inf^ - int_t^T e^{is|xi|^a} Q(w,u)^ ds,
//   g^(t) = f_inf^ - int_t^T e^{is|xi|^a} (c u conj u)^ ds
// by trapezoid on the shared mesh.  Fails with the ratio history when the
// difference norms stop contracting.
FinalDataResult final_data_iterate(const DyadicShellSet& shells, double alpha,
                                   const SpectralField& f_inf, double t_max,
                                   const FinalDataOptions& opts = {});

// Q(w,u): the transformed right side evaluated on an arbitrary pair (physical
// frame).
SpectralField q_forcing(const DyadicShellSet& shells, double alpha, const SpectralField& w,
                        const SpectralField& u, const cplx& coupling,
                        const BOperatorOptions& bop = {});

// || e^{iT D^a} u_forward(T) - f_inf ||_{H^10}: evolve the converged u(0)
// forward with the initial-value solver and compare the extracted profile.
double wave_operator_roundtrip(const DyadicShellSet& shells, double alpha,
                               const SpectralField& f_inf, double t_max,
                               const FinalDataOptions& fopts, const EvolveOptions& eopts);

}  // namespace fqs

#endif
