#ifndef FQS_RESONANCE_HPP
#define FQS_RESONANCE_HPP

#include <array>
#include <map>
#include <random>

#include "fqs/common.hpp"

namespace fqs {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm3(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Closed-form resonance phase phi(xi,eta) = |xi|^a - |xi-eta|^a + |eta|^a and
// its derivatives.  Gradients extend continuously by 0 at the |.|^a cone tips
// (a > 1).
struct PhaseContext {
  double alpha;

  double gamma(const Vec3& v) const { return std::pow(norm3(v), alpha); }
  Vec3 grad_gamma(const Vec3& v) const;
  // Hessian of |v|^alpha: a|v|^{a-2}(I + (a-2) vv^T/|v|^2).
  std::array<double, 9> hess_gamma(const Vec3& v) const;

  double phase(const Vec3& xi, const Vec3& eta) const {
    return gamma(xi) - gamma(xi - eta) + gamma(eta);
  }
  Vec3 grad_xi(const Vec3& xi, const Vec3& eta) const;
  Vec3 grad_eta(const Vec3& xi, const Vec3& eta) const;
  // Second derivatives of phi as 3x3 blocks (row-major).
  std::array<double, 9> hess_xixi(const Vec3& xi, const Vec3& eta) const;
  std::array<double, 9> hess_xieta(const Vec3& xi, const Vec3& eta) const;
  std::array<double, 9> hess_etaeta(const Vec3& xi, const Vec3& eta) const;

  double rho(const Vec3& xi, const Vec3& eta) const { return gamma(xi) + gamma(eta); }

  // Signed trilinear phase |xi|^a + s1|eta|^a + s2|zeta|^a + s3|xi-eta-zeta|^a.
  double trilinear_phase(const Vec3& xi, const Vec3& eta, const Vec3& zeta, int s1, int s2,
                         int s3) const {
    return gamma(xi) + s1 * gamma(eta) + s2 * gamma(zeta) + s3 * gamma(xi - eta - zeta);
  }
};

// Decay exponents of the main theorem and of the dyadic-sum lemma.
// delta = min{(lambda+3/2)/alpha, 3/2} - 1 (shaved by 1e-3 at the degenerate
// point lambda+3/2 = 3a/2); epsilon = min{2 lambda/(alpha-1), 3/2-lambda} - 1.
double decay_delta(double alpha, double lambda);
double decay_epsilon(double alpha, double lambda);
void validate_lambda(double alpha, double lambda);

enum class RegionKind {
  HH,  // |k1-k2| <= 10, k1 >= k-10   (Lemma on comparable input shells)
  HL,  // k1-k2 >= 10, |k1-k| <= 10   (high-low input shells)
};

struct RegionSpec {
  int k = 0, k1 = 0, k2 = 0;
  RegionKind kind = RegionKind::HH;
  int sample_count = 10000;
};

struct RegionSample {
  Vec3 xi, eta;
};

// Log-uniform radii, uniform angles; rejects until |xi| lands in its annulus.
// Throws a numerical error when the dyadic triple is geometrically empty.
std::vector<RegionSample> sample_region(const RegionSpec& spec, std::mt19937_64& rng);

// Sampled symbol-class verification for the gradient symbols.
struct SymbolClassReport {
  RegionSpec region;
  double alpha = 0.0;
  int samples_used = 0;
  double tau_xi = 0.0, tau_eta = 0.0;
  // min |grad phi| / tau over samples (ellipticity) and max (upper bound, order 0).
  double ell_xi_min = 0.0, ell_xi_max = 0.0;
  double ell_eta_min = 0.0, ell_eta_max = 0.0;
  // min over samples of |<xi/|xi|, grad_eta phi>| / |grad_eta phi| and of
  // |d_{eta_l} phi| / |grad_eta phi| with l the dominant coordinate of xi.
  double dir_cos_min = 0.0;
  double dir_l_min = 0.0;
  // Measured upper constants per derivative order (|a|,|b|), max over samples
  // and components of |d^a_xi d^b_eta s| |xi|^{|a|} |eta|^{|b|} / tau.
  std::map<std::pair<int, int>, double> upper_xi, upper_eta;
  bool pass = false;
};

SymbolClassReport verify_symbol_class(const PhaseContext& ctx, const RegionSpec& region,
                                      int max_order, std::mt19937_64& rng);

// Relative residual of the exact expansion
//   phi^{-1} = phi^{-1} rho^{-N} |xi-eta|^{N a} + sum_{j=1..N} rho^{-j} |xi-eta|^{(j-1)a}.
// Requires |xi-eta| <= |eta|/4 and phi != 0.
double lemma51_residual(const PhaseContext& ctx, const Vec3& xi, const Vec3& eta, int n_terms);

// Companion identity for (d_{eta_l} phi)^{-1} with the same telescoping.
double lemma51_gradient_residual(const PhaseContext& ctx, const Vec3& xi, const Vec3& eta,
                                 int n_terms);

// Dyadic sums C1 (at output shell k) and C2 of the decay-transfer lemma.
struct DyadicRange {
  int lo = -60, hi = 60;
};
std::pair<double, double> dyadic_constants(double alpha, double lambda, double t, int k,
                                           const DyadicRange& range = {});
// sup over k in [k_lo, k_hi] of C1(t, k); the quantity whose decay matches
// (1+t)^{-1-eps} two-sidedly.
double dyadic_c1_envelope(double alpha, double lambda, double t, int k_lo, int k_hi,
                          const DyadicRange& range = {});

}  // namespace fqs

#endif
