#ifndef FQS_PARAPRODUCT_HPP
#define FQS_PARAPRODUCT_HPP

#include <string>

#include "fqs/resonance.hpp"
#include "fqs/shells.hpp"

namespace fqs {

// Bilinear operators are normalized so that the symbol m == 1 reproduces the
// pointwise product exactly:
//   Bil[m](u,v)^(xi) = C_bil * sum_eta m(xi,eta) u^(xi-eta) v^(eta),
//   C_bil = (2pi)^{-d/2} dxi^d.
// This constant is the single place where the continuum prefactor of the
// paraproduct displays (and the (2pi)^{3/2} of the normal-form kernel) lives;
// every operator below inherits it through pointwise_product().
inline double bilinear_measure(const Grid& g) {
  return std::pow(g.dxi / std::sqrt(kTwoPi), g.dim);
}

using RadialFn = std::function<double(double)>;
using SymbolFn = std::function<cplx(const Vec3&, const Vec3&)>;

// One separable piece of a bilinear symbol:
//   m_p(xi,eta) = s(xi,eta) * left(|xi-eta|) * right(|eta|),
// where left/right are exact diagonal factors (typically Littlewood-Paley
// windows; this mirrors the paper's use of pre-projected inputs f_{k1}, g_{k2})
// and s is smooth at the scale of the eta shell.  Only s goes through the
// Fourier-series separation.
struct SymbolPiece {
  SymbolFn coupled;  // empty => s == 1 (piece applied exactly, no series)
  RadialFn left;     // empty => 1
  RadialFn right;    // empty => 1
  int eta_shell = 0;  // series scale 2^j; shells.k_min-1 denotes the low lump
};

// One retained modulation term of a piece's Fourier series in the rescaled
// second frequency: s(xi, 2^j zeta) * window(zeta) = sum_a coeff_a(xi) e^{i(pi/3) a.zeta}
// over the cube [-3,3]^d.
struct SeriesTerm {
  std::array<int, 3> mod{0, 0, 0};
  double magnitude = 0.0;        // max_xi |coeff|
  std::vector<cplx> out_mult;    // coeff_a(xi) on the grid
};

struct PieceExpansion {
  std::vector<SeriesTerm> terms;
  double tail = 0.0;       // sum of dropped |coeff| maxima / block sup
  double block_sup = 0.0;  // max sampled |s * window|
};

// Per-(j,k) expansion bookkeeping (j = eta shell, k = output shell).
struct BlockReport {
  int piece = 0;
  int j = 0, k = 0;
  int terms = 0;
  double tail = 0.0;
};

struct BilinearSymbol {
  std::string name;
  GridPtr grid;
  DyadicShellSet shells;
  double tolerance = 1e-8;
  int max_terms = 4096;
  std::vector<SymbolPiece> pieces;
  std::vector<PieceExpansion> expansions;  // parallel to pieces (empty terms if s==1)
  std::vector<BlockReport> blocks;
  double truncation_bound = 0.0;  // max tail over blocks
  int total_terms = 0;

  // Direct evaluation sum_p s_p * left_p * right_p (the object the expansion
  // approximates; also the oracle-side evaluator).
  cplx evaluate(const Vec3& xi, const Vec3& eta) const;
};

// Runs the per-piece Fourier-series separation.  Fails (naming the offending
// piece/shell) when the magnitude-sorted tail cannot reach `tolerance` within
// `max_terms` retained terms per block.
BilinearSymbol expand_symbol(const std::string& name, std::vector<SymbolPiece> pieces,
                             const DyadicShellSet& shells, double tolerance = 1e-8,
                             int max_terms = 4096);

// Sum over pieces/terms of out_mult(D)[ (left(D)u) . (e^{i c a . D} right(D) v) ];
// two multiplier applications and one pointwise product per term.
SpectralField apply_bilinear(const BilinearSymbol& sym, const SpectralField& u,
                             const SpectralField& v);

// Max over `samples` random (xi,eta) pairs of the reconstruction error
// |sum_terms - psi_k m psi_j| / block_sup for one block; test hook for the
// expansion invariant.
double block_reconstruction_error(const BilinearSymbol& sym, int piece, int k, int samples,
                                  std::mt19937_64& rng);

// ---- standard symbols ----

// Piece lists for the frequency-interaction cutoffs.  HH pairs |k1-k2| <= 10;
// HL/LH use the gap >= 11 complement so the three pieces sum to 1 exactly.
std::vector<SymbolPiece> pieces_one();
std::vector<SymbolPiece> pieces_a_hh(const DyadicShellSet& shells);
std::vector<SymbolPiece> pieces_a_hl(const DyadicShellSet& shells);
std::vector<SymbolPiece> pieces_a_lh(const DyadicShellSet& shells);
// Normal-form kernel phi^{-1} a_LH.
std::vector<SymbolPiece> pieces_b_kernel(const DyadicShellSet& shells, double alpha);

// ---- paraproduct decomposition ----

struct ParaproductPieces {
  SpectralField hh, hl, lh;
};

// Frequency-interaction split of u * conj(v); pieces are computed
// independently (running-window partial sums) and sum to the product exactly
// for band-limited inputs.
ParaproductPieces decompose_paraproduct(const DyadicShellSet& shells, const SpectralField& u,
                                        const SpectralField& v);

// (u conj(v))_{HH} + (u conj(v))_{HL} in one pass.
SpectralField product_hh_hl(const DyadicShellSet& shells, const SpectralField& u,
                            const SpectralField& v);

// ---- normal-form bilinear operator ----

struct BOperatorOptions {
  int lemma51_terms = 4;     // geometric orders of the phi^{-1} expansion
  double expsum_tol = 1e-11; // separation accuracy for rho^{-m}
  double shell_skip = 1e-14; // relative L2 threshold for skipping eta shells
};

// B(u,v): bilinear operator with symbol phi^{-1} a_LH, applied through the
// telescoped expansion phi^{-1} = sum_m |xi-eta|^{alpha m} rho^{-(m+1)} + tail
// (tail <= (sup |xi-eta|^alpha/rho)^M ~ 1e-12 on supp a_LH at M=4), with
// rho^{-(m+1)} separated by exponential sums in |xi|^alpha + |eta|^alpha.
// The output xi=0 mode is zeroed by convention.
SpectralField apply_B(const DyadicShellSet& shells, double alpha, const SpectralField& u,
                      const SpectralField& v, const BOperatorOptions& opts = {});

// w = u + i coupling B(u, conj u).
SpectralField normal_form_forward(const DyadicShellSet& shells, double alpha,
                                  const SpectralField& u, cplx coupling = {1.0, 0.0},
                                  const BOperatorOptions& opts = {});

struct InversionReport {
  int iterations = 0;
  std::vector<double> residuals;  // ||u_{n+1} - u_n||_{H^10} per step
  bool converged = false;
};

// Solves u = w - i coupling B(u, conj u) by Picard iteration.  Fails with the
// ratio history when the residual ratio stays >= 1 for three consecutive
// steps (data too large for the normal form to invert).
SpectralField normal_form_invert(const DyadicShellSet& shells, double alpha,
                                 const SpectralField& w, double tolerance,
                                 InversionReport* report = nullptr, int max_iterations = 25,
                                 cplx coupling = {1.0, 0.0}, const BOperatorOptions& opts = {});

}  // namespace fqs

#endif
