#include "fqs/resonance.hpp"

#include <algorithm>
#include <cmath>

namespace fqs {

Vec3 PhaseContext::grad_gamma(const Vec3& v) const {
  const double r = norm3(v);
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const double s = alpha * std::pow(r, alpha - 2.0);
  return s * v;
}

std::array<double, 9> PhaseContext::hess_gamma(const Vec3& v) const {
  const double r = norm3(v);
  std::array<double, 9> h{};
  if (r == 0.0) {
    // |v|^alpha is not twice differentiable at 0 for alpha<2; callers sample
    // away from the tips.
    return h;
  }
  const double s = alpha * std::pow(r, alpha - 2.0);
  const double c = (alpha - 2.0) / (r * r);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[3 * i + j] = s * ((i == j ? 1.0 : 0.0) + c * v[i] * v[j]);
  return h;
}

Vec3 PhaseContext::grad_xi(const Vec3& xi, const Vec3& eta) const {
  return grad_gamma(xi) - grad_gamma(xi - eta);
}

Vec3 PhaseContext::grad_eta(const Vec3& xi, const Vec3& eta) const {
  return grad_gamma(eta) + grad_gamma(xi - eta);
}

std::array<double, 9> PhaseContext::hess_xixi(const Vec3& xi, const Vec3& eta) const {
  auto a = hess_gamma(xi);
  const auto b = hess_gamma(xi - eta);
  for (int i = 0; i < 9; ++i) a[i] -= b[i];
  return a;
}

std::array<double, 9> PhaseContext::hess_xieta(const Vec3& xi, const Vec3& eta) const {
  return hess_gamma(xi - eta);
}

std::array<double, 9> PhaseContext::hess_etaeta(const Vec3& xi, const Vec3& eta) const {
  auto a = hess_gamma(eta);
  const auto b = hess_gamma(xi - eta);
  for (int i = 0; i < 9; ++i) a[i] -= b[i];
  return a;
}

void validate_lambda(double alpha, double lambda) {
  if (!(alpha > 1.0 && alpha < 2.0)) fail_validation("alpha must lie in (1,2)");
  if (!(lambda > (alpha - 1.0) / 2.0 && lambda < 0.5))
    fail_validation("lambda=" + std::to_string(lambda) + " outside ((alpha-1)/2, 1/2) for alpha=" +
                    std::to_string(alpha));
}

double decay_delta(double alpha, double lambda) {
  validate_lambda(alpha, lambda);
  const double a = (lambda + 1.5) / alpha;
  double d = std::min(a, 1.5) - 1.0;
  if (std::fabs(lambda + 1.5 - 1.5 * alpha) < 1e-12) d *= 1.0 - 1e-3;
  return d;
}

double decay_epsilon(double alpha, double lambda) {
  validate_lambda(alpha, lambda);
  return std::min(2.0 * lambda / (alpha - 1.0), 1.5 - lambda) - 1.0;
}

namespace {

Vec3 random_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  const double c = u(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double p = ph(rng);
  return {s * std::cos(p), s * std::sin(p), c};
}

double log_uniform(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace

std::vector<RegionSample> sample_region(const RegionSpec& spec, std::mt19937_64& rng) {
  if (spec.kind == RegionKind::HH) {
    if (std::abs(spec.k1 - spec.k2) > 10 || spec.k1 < spec.k - 10)
      fail_validation("HH region requires |k1-k2| <= 10 and k1 >= k-10");
  } else {
    if (spec.k1 - spec.k2 < 10 || std::abs(spec.k1 - spec.k) > 10)
      fail_validation("HL region requires k1-k2 >= 10 and |k1-k| <= 10");
  }
  const double r1lo = std::ldexp(1.0, spec.k1 - 1), r1hi = std::ldexp(1.0, spec.k1 + 1);
  const double r2lo = std::ldexp(1.0, spec.k2 - 1), r2hi = std::ldexp(1.0, spec.k2 + 1);
  const double rklo = std::ldexp(1.0, spec.k - 1), rkhi = std::ldexp(1.0, spec.k + 1);

  std::vector<RegionSample> out;
  out.reserve(spec.sample_count);
  const long attempts_cap = 400L * spec.sample_count;
  for (long a = 0; a < attempts_cap && static_cast<int>(out.size()) < spec.sample_count; ++a) {
    const Vec3 d1 = random_direction(rng), d2 = random_direction(rng);
    const Vec3 xme = log_uniform(r1lo, r1hi, rng) * d1;  // xi - eta
    const Vec3 eta = log_uniform(r2lo, r2hi, rng) * d2;
    const Vec3 xi = xme + eta;
    const double r = norm3(xi);
    if (r > rklo && r < rkhi) out.push_back({xi, eta});
  }
  if (out.empty())
    fail_numerical("sample_region: no admissible points for (k,k1,k2)=(" + std::to_string(spec.k) +
                   "," + std::to_string(spec.k1) + "," + std::to_string(spec.k2) + ") - empty region");
  return out;
}

SymbolClassReport verify_symbol_class(const PhaseContext& ctx, const RegionSpec& region,
                                      int max_order, std::mt19937_64& rng) {
  if (max_order < 0 || max_order > 2) fail_validation("verify_symbol_class: max_order must be <= 2");
  SymbolClassReport rep;
  rep.region = region;
  rep.alpha = ctx.alpha;
  if (region.kind == RegionKind::HH) {
    rep.tau_xi = pow2d((ctx.alpha - 1.0) * region.k1);
    rep.tau_eta = pow2d(region.k + (ctx.alpha - 2.0) * region.k1);
  } else {
    rep.tau_xi = pow2d((ctx.alpha - 2.0) * region.k + region.k2);
    rep.tau_eta = pow2d((ctx.alpha - 1.0) * region.k);
  }

  const auto samples = sample_region(region, rng);
  rep.samples_used = static_cast<int>(samples.size());

  rep.ell_xi_min = rep.ell_eta_min = rep.dir_cos_min = rep.dir_l_min = 1e300;

  for (const auto& s : samples) {
    const Vec3 gx = ctx.grad_xi(s.xi, s.eta);
    const Vec3 ge = ctx.grad_eta(s.xi, s.eta);
    const double ax = norm3(gx) / rep.tau_xi;
    const double ae = norm3(ge) / rep.tau_eta;
    rep.ell_xi_min = std::min(rep.ell_xi_min, ax);
    rep.ell_xi_max = std::max(rep.ell_xi_max, ax);
    rep.ell_eta_min = std::min(rep.ell_eta_min, ae);
    rep.ell_eta_max = std::max(rep.ell_eta_max, ae);

    const double nxi = norm3(s.xi), nge = norm3(ge);
    if (nge > 0.0) {
      rep.dir_cos_min = std::min(rep.dir_cos_min, std::fabs(dot(s.xi, ge)) / (nxi * nge));
      int l = 0;
      for (int i = 1; i < 3; ++i)
        if (std::fabs(s.xi[i]) > std::fabs(s.xi[l])) l = i;
      rep.dir_l_min = std::min(rep.dir_l_min, std::fabs(ge[l]) / nge);
    }

    const double neta = norm3(s.eta);
    auto track = [](std::map<std::pair<int, int>, double>& m, std::pair<int, int> key, double v) {
      auto it = m.find(key);
      if (it == m.end() || it->second < v) m[key] = v;
    };
    // Order 0.
    track(rep.upper_xi, {0, 0}, norm3(gx) / rep.tau_xi);
    track(rep.upper_eta, {0, 0}, norm3(ge) / rep.tau_eta);
    if (max_order >= 1) {
      // First derivatives of the gradient symbols are phi's closed-form
      // second derivatives.
      const auto hxx = ctx.hess_xixi(s.xi, s.eta);
      const auto hxe = ctx.hess_xieta(s.xi, s.eta);
      const auto hee = ctx.hess_etaeta(s.xi, s.eta);
      double mxx = 0, mxe = 0, mee = 0, mex = 0;
      for (int i = 0; i < 9; ++i) {
        mxx = std::max(mxx, std::fabs(hxx[i]));
        mxe = std::max(mxe, std::fabs(hxe[i]));
        mee = std::max(mee, std::fabs(hee[i]));
        mex = std::max(mex, std::fabs(hxe[i]));
      }
      track(rep.upper_xi, {1, 0}, mxx * nxi / rep.tau_xi);
      track(rep.upper_xi, {0, 1}, mxe * neta / rep.tau_xi);
      track(rep.upper_eta, {1, 0}, mex * nxi / rep.tau_eta);
      track(rep.upper_eta, {0, 1}, mee * neta / rep.tau_eta);
    }
    if (max_order >= 2) {
      // One finite-difference level on the closed-form Hessians.
      const double hx = 1e-4 * nxi, he = 1e-4 * neta;
      auto fd_max = [&](auto eval, const Vec3& base_xi, const Vec3& base_eta, int var,
                        double step) {
        double m = 0.0;
        for (int d = 0; d < 3; ++d) {
          Vec3 xp = base_xi, xm = base_xi, ep = base_eta, em = base_eta;
          if (var == 0) {
            xp[d] += step;
            xm[d] -= step;
          } else {
            ep[d] += step;
            em[d] -= step;
          }
          const auto hp = eval(xp, ep);
          const auto hm = eval(xm, em);
          for (int i = 0; i < 9; ++i) m = std::max(m, std::fabs(hp[i] - hm[i]) / (2.0 * step));
        }
        return m;
      };
      auto exx = [&](const Vec3& a, const Vec3& b) { return ctx.hess_xixi(a, b); };
      auto eee = [&](const Vec3& a, const Vec3& b) { return ctx.hess_etaeta(a, b); };
      auto exe = [&](const Vec3& a, const Vec3& b) { return ctx.hess_xieta(a, b); };
      track(rep.upper_xi, {2, 0}, fd_max(exx, s.xi, s.eta, 0, hx) * nxi * nxi / rep.tau_xi);
      track(rep.upper_xi, {1, 1}, fd_max(exx, s.xi, s.eta, 1, he) * nxi * neta / rep.tau_xi);
      track(rep.upper_xi, {0, 2}, fd_max(exe, s.xi, s.eta, 1, he) * neta * neta / rep.tau_xi);
      track(rep.upper_eta, {0, 2}, fd_max(eee, s.xi, s.eta, 1, he) * neta * neta / rep.tau_eta);
      track(rep.upper_eta, {1, 1}, fd_max(eee, s.xi, s.eta, 0, hx) * nxi * neta / rep.tau_eta);
      track(rep.upper_eta, {2, 0}, fd_max(exe, s.xi, s.eta, 0, hx) * nxi * nxi / rep.tau_eta);
    }
  }
  rep.pass = rep.ell_xi_min > 0.0 && rep.ell_eta_min > 0.0 && rep.dir_cos_min > 0.0;
  return rep;
}

double lemma51_residual(const PhaseContext& ctx, const Vec3& xi, const Vec3& eta, int n_terms) {
  if (n_terms < 1) fail_validation("lemma51_residual: N >= 1 required");
  const double dn = norm3(xi - eta), en = norm3(eta);
  if (dn > 0.25 * en) fail_validation("lemma51_residual: requires |xi-eta| <= |eta|/4");
  const double phi = ctx.phase(xi, eta);
  if (phi == 0.0) fail_validation("lemma51_residual: phi vanishes at the sample");
  const double rho = ctx.rho(xi, eta);
  const double da = std::pow(dn, ctx.alpha);
  const double lhs = 1.0 / phi;
  double rhs = (1.0 / phi) * std::pow(da / rho, n_terms);
  double pw = 1.0;  // |xi-eta|^{(j-1)a}
  for (int j = 1; j <= n_terms; ++j) {
    rhs += pw / std::pow(rho, j);
    pw *= da;
  }
  return std::fabs(lhs - rhs) / std::fabs(lhs);
}

double lemma51_gradient_residual(const PhaseContext& ctx, const Vec3& xi, const Vec3& eta,
                                 int n_terms) {
  if (n_terms < 1) fail_validation("lemma51_gradient_residual: N >= 1 required");
  const double dn = norm3(xi - eta), en = norm3(eta);
  if (dn > 0.25 * en) fail_validation("lemma51_gradient_residual: requires |xi-eta| <= |eta|/4");
  int l = 0;
  for (int i = 1; i < 3; ++i)
    if (std::fabs(eta[i]) > std::fabs(eta[l])) l = i;
  const double ge = ctx.grad_gamma(eta)[l];
  const double gd = ctx.grad_gamma(eta - xi)[l];
  const double dphi = ge - gd;  // d_{eta_l} phi
  if (dphi == 0.0 || ge == 0.0) fail_validation("lemma51_gradient_residual: degenerate sample");
  const double lhs = 1.0 / dphi;
  double rhs = (1.0 / dphi) * std::pow(gd / ge, n_terms);
  double pw = 1.0;
  for (int j = 1; j <= n_terms; ++j) {
    rhs += pw / std::pow(ge, j);
    pw *= gd;
  }
  return std::fabs(lhs - rhs) / std::fabs(lhs);
}

std::pair<double, double> dyadic_constants(double alpha, double lambda, double t, int k,
                                           const DyadicRange& range) {
  validate_lambda(alpha, lambda);
  if (!(t > 0.0)) fail_validation("dyadic_constants: t must be positive");
  const double t32 = std::pow(t, -1.5);
  double c1 = 0.0;
  for (int k1 = std::max(k - 10, range.lo); k1 <= range.hi; ++k1) {
    const double b1 = pow2d(1.5 * k + 2.0 * lambda * k1);
    const double b2 = t32 * pow2d((2.0 * lambda - 1.5 * alpha + 1.5) * k1);
    c1 += pow2d(-2.0 * kplus(k1)) * std::min(b1, b2);
  }
  c1 *= pow2d(-lambda * k);
  double c2 = 0.0;
  for (int k2 = range.lo; k2 <= range.hi; ++k2) {
    const double b1 = pow2d((lambda + 1.5) * k2);
    const double b2 = t32 * pow2d((lambda - 1.5 * alpha + 1.5) * k2);
    c2 += pow2d(-2.0 * kplus(k2)) * std::min(b1, b2);
  }
  return {c1, c2};
}

double dyadic_c1_envelope(double alpha, double lambda, double t, int k_lo, int k_hi,
                          const DyadicRange& range) {
  double m = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) m = std::max(m, dyadic_constants(alpha, lambda, t, k, range).first);
  return m;
}

}  // namespace fqs
