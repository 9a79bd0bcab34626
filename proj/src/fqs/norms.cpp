#include "fqs/norms.hpp"

#include <algorithm>
#include <cmath>

namespace fqs {

namespace {

// Shell-masked L2 of a list of coefficient arrays (Frobenius over the list),
// with optional low-lump accumulation into k_min.
struct MaskedNorms {
  std::vector<double> per_shell;  // k_min..k_max
  double low = 0.0;
};

MaskedNorms masked_l2(const DyadicShellSet& sh, const std::vector<const SpectralField*>& comps,
                      const std::vector<double>& comp_weights) {
  const Grid& g = *sh.grid;
  MaskedNorms out;
  out.per_shell.assign(sh.count(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.xi_abs(i);
    double a2 = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c)
      a2 += comp_weights[c] * std::norm(comps[c]->coeffs[i]);
    if (a2 == 0.0) continue;
    for (int k = sh.k_min; k <= sh.k_max; ++k) {
      const double w = sh.psi(k, r);
      if (w > 0.0) out.per_shell[k - sh.k_min] += w * w * a2;
    }
    const double wl = sh.psi_low(sh.k_min - 1, r);
    if (wl > 0.0) out.low += wl * wl * a2;
  }
  const double meas = std::pow(g.dxi, g.dim);
  for (auto& v : out.per_shell) v = std::sqrt(v * meas);
  out.low = std::sqrt(out.low * meas);
  return out;
}

WeightedNormReport weighted_norm(const DyadicShellSet& sh, const SpectralField& f,
                                 const NormParams& p, bool second_order) {
  const Grid& g = *f.grid;
  std::vector<SpectralField> d1, d2;
  for (int a = 0; a < g.dim; ++a) d1.push_back(xi_derivative(f, a));
  if (second_order)
    for (int a = 0; a < g.dim; ++a)
      for (int b = a; b < g.dim; ++b) d2.push_back(xi_derivative(d1[a], b));

  std::vector<const SpectralField*> c0{&f};
  std::vector<double> w0{1.0};
  std::vector<const SpectralField*> c1;
  std::vector<double> w1;
  for (auto& d : d1) {
    c1.push_back(&d);
    w1.push_back(1.0);
  }
  std::vector<const SpectralField*> c2;
  std::vector<double> w2;
  if (second_order) {
    std::size_t idx = 0;
    for (int a = 0; a < g.dim; ++a)
      for (int b = a; b < g.dim; ++b, ++idx) {
        c2.push_back(&d2[idx]);
        w2.push_back(a == b ? 1.0 : 2.0);  // symmetric off-diagonal multiplicity
      }
  }

  const MaskedNorms m0 = masked_l2(sh, c0, w0);
  const MaskedNorms m1 = masked_l2(sh, c1, w1);
  const MaskedNorms m2 = second_order ? masked_l2(sh, c2, w2) : MaskedNorms{};

  WeightedNormReport rep;
  rep.low_lump_l2 = m0.low;
  rep.low_lump_flagged = m0.low > 1e-14 * (m0.low + l2_norm(f));
  for (int k = sh.k_min; k <= sh.k_max; ++k) {
    const int i = k - sh.k_min;
    ShellContribution c;
    c.k = k;
    double l2 = m0.per_shell[i], e1 = m1.per_shell[i], e2 = second_order ? m2.per_shell[i] : 0.0;
    if (k == sh.k_min) {
      // Sub-k_min mass lumped into the lowest shell.
      l2 = std::hypot(l2, m0.low);
      e1 = std::hypot(e1, m1.low);
      if (second_order) e2 = std::hypot(e2, m2.low);
    }
    c.l2_term = pow2d(-p.lambda * k) * l2;
    c.d1_term = pow2d((1.0 - p.lambda) * k) * e1;
    c.d2_term = second_order ? pow2d((2.0 - p.lambda) * k) * e2 : 0.0;
    c.total = pow2d(2.0 * kplus(k)) * (c.l2_term + c.d1_term + c.d2_term);
    rep.shells.push_back(c);
    rep.value = std::max(rep.value, c.total);
  }
  return rep;
}

}  // namespace

WeightedNormReport w_norm_report(const DyadicShellSet& sh, const SpectralField& f,
                                 const NormParams& p) {
  return weighted_norm(sh, f, p, true);
}

double w_norm(const DyadicShellSet& sh, const SpectralField& f, const NormParams& p) {
  return weighted_norm(sh, f, p, true).value;
}

WeightedNormReport u_norm_report(const DyadicShellSet& sh, const SpectralField& f,
                                 const NormParams& p) {
  return weighted_norm(sh, f, p, false);
}

double u_norm(const DyadicShellSet& sh, const SpectralField& f, const NormParams& p) {
  return weighted_norm(sh, f, p, false).value;
}

DecayFit decay_fit(const std::vector<double>& t, const std::vector<double>& value,
                   double window_lo, double window_hi) {
  if (t.size() != value.size()) fail_validation("decay_fit: series length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window_lo || t[i] > window_hi) continue;
    if (!(value[i] > 0.0)) fail_validation("decay_fit: nonpositive value in window");
    xs.push_back(std::log1p(t[i]));
    ys.push_back(std::log(value[i]));
  }
  if (xs.size() < 10) fail_validation("decay_fit: fewer than 10 points in window");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) fail_validation("decay_fit: degenerate abscissae");
  DecayFit fit;
  fit.exponent = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.exponent * sx) / n;
  fit.points = static_cast<int>(xs.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    ss += sq(ys[i] - fit.intercept - fit.exponent * xs[i]);
  fit.residual = std::sqrt(ss / n);
  if (fit.residual > 0.5) fail_numerical("decay_fit: series is not a power law (rms log-residual " +
                                         std::to_string(fit.residual) + ")");
  return fit;
}

BudgetReport budget_check(const DiagnosticSeries& diag, const NormParams& params, double eps0) {
  BudgetReport rep;
  for (const auto& [name, series] : diag.values) {
    double s = 0.0;
    for (double v : series) s = std::max(s, v);
    rep.sup_values[name] = s;
  }
  // Theorem display: per-time sum of the six diagnostic norms, with the sup
  // norms carrying the (1+t)^{1+delta} weight.
  static const char* kSum[6] = {"w_h10", "w_sup_scaled", "w_weighted",
                                "u_h10", "u_sup_scaled", "u_weighted"};
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    double s = 0.0;
    for (const char* key : kSum) {
      auto it = diag.values.find(key);
      if (it != diag.values.end() && i < it->second.size()) s += it->second[i];
    }
    rep.theorem_sum_sup = std::max(rep.theorem_sum_sup, s);
  }
  rep.implied_constant = eps0 > 0.0 ? rep.theorem_sum_sup / eps0 : 0.0;
  (void)params;
  return rep;
}

SpectralField random_smooth_field(const GridPtr& grid, double envelope_width,
                                  std::mt19937_64& rng) {
  SpectralField f(grid);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const double r = grid->xi_abs(i);
    const double env = std::exp(-sq(r / envelope_width));
    f.coeffs[i] = cplx{nd(rng), nd(rng)} * env;
  }
  truncate_band(f, dealias_band(*grid));
  return f;
}

InterpolationScan interpolation_scan(const GridPtr& grid, int field_count, std::mt19937_64& rng) {
  InterpolationScan scan;
  scan.fields = field_count;
  std::uniform_real_distribution<double> wd(0.5, 0.25 * grid->xi_nyquist());
  for (int i = 0; i < field_count; ++i) {
    const SpectralField f = random_smooth_field(grid, wd(rng), rng);
    const double l2 = l2_norm(f);
    if (l2 == 0.0) continue;
    const double l1 = lp_norm(f, 1.0);
    const double l43 = lp_norm(f, 4.0 / 3.0);
    const double x1 = weighted_l2(f, 1);
    const double x2 = weighted_l2(f, 2);
    scan.max_c_l1 = std::max(scan.max_c_l1, l1 / (std::pow(l2, 0.25) * std::pow(x2, 0.75)));
    scan.max_c_l43 = std::max(scan.max_c_l43, l43 / (std::pow(l2, 0.25) * std::pow(x1, 0.75)));
  }
  return scan;
}

}  // namespace fqs
