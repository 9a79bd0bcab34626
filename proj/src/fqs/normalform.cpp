#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fqs/paraproduct.hpp"

namespace fqs {

namespace {

// Exponential-sum separation of r^{-s} on a scaled interval [1, R]:
//   r^{-s} = 1/Gamma(s) int t^{s-1} e^{-rt} dt,  t = e^v, trapezoid in v.
// Shared nodes across powers s = 1..max_power; weights differ.  Certified on a
// log grid before use.
struct ExpSum {
  std::vector<double> nodes;                 // a_q
  std::vector<std::vector<double>> weights;  // [s-1][q]
};

double gamma_int(int s) {
  double g = 1.0;
  for (int i = 2; i < s; ++i) g *= i;
  return g;
}

ExpSum build_expsum(int max_power, double interval_ratio, double tol) {
  for (double h : {0.8, 0.6, 0.5, 0.4, 0.33, 0.27, 0.22}) {
    const double v_lo = std::log(tol / (4.0 * interval_ratio)) - 1.0;
    const double v_hi = std::log(40.0);
    const int q_count = static_cast<int>(std::ceil((v_hi - v_lo) / h)) + 1;
    ExpSum es;
    es.nodes.resize(q_count);
    es.weights.assign(max_power, std::vector<double>(q_count));
    for (int q = 0; q < q_count; ++q) {
      const double v = v_lo + h * q;
      es.nodes[q] = std::exp(v);
      for (int s = 1; s <= max_power; ++s)
        es.weights[s - 1][q] = h * std::exp(s * v) / gamma_int(s);
    }
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = std::exp(std::log(interval_ratio) * i / 200.0);
      for (int s = 1; s <= max_power; ++s) {
        double acc = 0.0;
        for (int q = 0; q < q_count; ++q) acc += es.weights[s - 1][q] * std::exp(-es.nodes[q] * r);
        worst = std::max(worst, std::fabs(acc - std::pow(r, -s)) * std::pow(r, s));
      }
    }
    if (worst <= tol) return es;
  }
  fail_numerical("exponential-sum separation failed to certify");
}

const ExpSum& cached_expsum(int max_power, double interval_ratio, double tol) {
  static std::map<std::tuple<int, int, int>, ExpSum> cache;
  const int rkey = static_cast<int>(std::ceil(interval_ratio * 16.0));
  const int tkey = static_cast<int>(std::lround(std::log10(tol)));
  const auto key = std::make_tuple(max_power, rkey, tkey);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_expsum(max_power, rkey / 16.0, tol)).first;
  return it->second;
}

}  // namespace

SpectralField apply_B(const DyadicShellSet& sh, double alpha, const SpectralField& u,
                      const SpectralField& v, const BOperatorOptions& opts) {
  if (!(*u.grid == *v.grid) || !(*u.grid == *sh.grid)) fail_validation("apply_B: grid mismatch");
  if (!(alpha > 1.0 && alpha < 2.0)) fail_validation("apply_B: alpha must lie in (1,2)");
  const Grid& g = *u.grid;
  SpectralField out(u.grid);
  const double unorm = l2_norm(u), vnorm = l2_norm(v);
  if (unorm == 0.0 || vnorm == 0.0) return out;

  const int M = opts.lemma51_terms;
  // Shell-relative radius bounds of rho = |xi|^a + |eta|^a on the piece
  // support (|xi-eta| <= 1.25 * 2^{j-11} makes |xi| track |eta|).
  const double slack = 1.25 * std::ldexp(1.0, -10);
  const double rel_lo = (std::pow(0.5 * (1.0 - slack), alpha) + std::pow(0.5, alpha)) * 0.999;
  const double rel_hi = (std::pow(1.25 * (1.0 + slack), alpha) + std::pow(1.25, alpha)) * 1.001;
  const ExpSum& es = cached_expsum(M, rel_hi / rel_lo, opts.expsum_tol);
  const std::size_t q_count = es.nodes.size();

  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    const SpectralField vj = apply_radial_multiplier(v, [&](double r) { return sh.psi(j, r); });
    if (l2_norm(vj) < opts.shell_skip * vnorm) continue;
    const SpectralField ulow = lp_project_low(sh, u, j - 11);
    if (l2_norm(ulow) < opts.shell_skip * unorm) continue;

    const int bu = active_band(ulow);
    const int bv = std::min(active_band(vj), shell_band(sh, j) + 1);
    const int content = bu + bv;
    const GridPtr box = box_grid_for(g, content);
    const SpectralField vj_box = restrict_to_box(vj, box, bv);
    std::vector<SpectralField> u_pows;
    u_pows.reserve(M);
    for (int m = 0; m < M; ++m) {
      const double am = alpha * m;
      u_pows.push_back(restrict_to_box(
          m == 0 ? ulow : apply_radial_multiplier(ulow, [am](double r) { return std::pow(r, am); }),
          box, bu));
    }

    const double r_lo = rel_lo * std::pow(std::ldexp(1.0, j), alpha);
    SpectralField acc(box);
    for (std::size_t q = 0; q < q_count; ++q) {
      const double aq = es.nodes[q] / r_lo;
      // u side: sum_m w_q^{(m+1)} |D|^{alpha m} P_{<=j-11} u.
      SpectralField uq(box);
      for (int m = 0; m < M; ++m) {
        const double w = es.weights[m][q] / std::pow(r_lo, m + 1);
        for (std::size_t i = 0; i < uq.coeffs.size(); ++i)
          uq.coeffs[i] += w * u_pows[m].coeffs[i];
      }
      const SpectralField vq =
          apply_radial_multiplier(vj_box, [&](double r) { return std::exp(-aq * std::pow(r, alpha)); });
      const SpectralField prod = pointwise_product(uq, vq, content);
      for (std::size_t i = 0; i < acc.coeffs.size(); ++i) {
        const double r = box->xi_abs(i);
        acc.coeffs[i] += std::exp(-aq * std::pow(r, alpha)) * prod.coeffs[i];
      }
    }
    accumulate_from_box(out, acc, content);
  }
  out.coeffs[0] = 0.0;  // xi = 0 by convention
  truncate_band(out, dealias_band(g));
  return out;
}

SpectralField normal_form_forward(const DyadicShellSet& sh, double alpha, const SpectralField& u,
                                  cplx coupling, const BOperatorOptions& opts) {
  const SpectralField b = apply_B(sh, alpha, u, conjugate_field(u), opts);
  return axpy({1.0, 0.0}, u, cplx{0.0, 1.0} * coupling, b);
}

SpectralField normal_form_invert(const DyadicShellSet& sh, double alpha, const SpectralField& w,
                                 double tolerance, InversionReport* report, int max_iterations,
                                 cplx coupling, const BOperatorOptions& opts) {
  InversionReport local;
  InversionReport& rep = report ? *report : local;
  rep = InversionReport{};
  const double wnorm = std::max(sobolev_norm(w, 10.0), 1e-300);
  SpectralField u = w;
  int bad_streak = 0;
  double prev_res = -1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const SpectralField b = apply_B(sh, alpha, u, conjugate_field(u), opts);
    SpectralField next = axpy({1.0, 0.0}, w, cplx{0.0, -1.0} * coupling, b);
    const double res = sobolev_norm(axpy({1.0, 0.0}, next, {-1.0, 0.0}, u), 10.0);
    rep.residuals.push_back(res);
    rep.iterations = it + 1;
    u = std::move(next);
    if (res <= tolerance * wnorm) {
      rep.converged = true;
      return u;
    }
    if (prev_res >= 0.0) {
      bad_streak = res >= prev_res ? bad_streak + 1 : 0;
      if (bad_streak >= 3) {
        std::ostringstream os;
        os << "normal_form_invert: no contraction (residual ratios";
        for (std::size_t i = 1; i < rep.residuals.size(); ++i)
          os << " " << rep.residuals[i] / rep.residuals[i - 1];
        os << ") - data too large";
        fail_numerical(os.str());
      }
    }
    prev_res = res;
  }
  fail_numerical("normal_form_invert: tolerance not reached in " + std::to_string(max_iterations) +
                 " iterations (last residual " +
                 std::to_string(rep.residuals.empty() ? 0.0 : rep.residuals.back()) + ")");
}

}  // namespace fqs
