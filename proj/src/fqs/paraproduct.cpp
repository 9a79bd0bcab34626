#include "fqs/paraproduct.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fqs/fft.hpp"

namespace fqs {

namespace {

constexpr double kCubeHalf = 3.0;  // series cube [-3,3]^d in the rescaled frequency
constexpr double kModScale = kPi / kCubeHalf;

Vec3 grid_xi(const Grid& g, std::size_t flat) {
  if (g.dim == 1) return {g.xi_axis[flat], 0.0, 0.0};
  const std::size_t nn = static_cast<std::size_t>(g.n);
  return {g.xi_axis[flat / (nn * nn)], g.xi_axis[(flat / nn) % nn], g.xi_axis[flat % nn]};
}

}  // namespace

cplx BilinearSymbol::evaluate(const Vec3& xi, const Vec3& eta) const {
  cplx acc{0.0, 0.0};
  const double de = norm3(xi - eta);
  const double ne = norm3(eta);
  for (const auto& p : pieces) {
    double w = 1.0;
    if (p.left) w *= p.left(de);
    if (p.right) w *= p.right(ne);
    if (w == 0.0) continue;
    cplx s{1.0, 0.0};
    if (p.coupled) s = p.coupled(xi, eta);
    acc += w * s;
  }
  return acc;
}

BilinearSymbol expand_symbol(const std::string& name, std::vector<SymbolPiece> pieces,
                             const DyadicShellSet& shells, double tolerance, int max_terms) {
  BilinearSymbol sym;
  sym.name = name;
  sym.grid = shells.grid;
  sym.shells = shells;
  sym.tolerance = tolerance;
  sym.max_terms = max_terms;
  sym.pieces = std::move(pieces);
  sym.expansions.resize(sym.pieces.size());

  const Grid& g = *sym.grid;
  const int dim = g.dim;
  const int nz = dim == 1 ? 4096 : 48;
  std::size_t nzd = 1;
  for (int d = 0; d < dim; ++d) nzd *= static_cast<std::size_t>(nz);

  // Output pseudo-family: low lump + active shells + two edge shells so that
  // the family sums to 1 on the dealias-safe product band.
  std::vector<int> out_family;
  out_family.push_back(shells.k_min - 1);
  for (int k = shells.k_min; k <= shells.k_max + 2; ++k) out_family.push_back(k);
  auto out_weight = [&](int k, double r) {
    return k == shells.k_min - 1 ? shells.psi_low(k, r) : shells.psi(k, r);
  };

  for (std::size_t pi = 0; pi < sym.pieces.size(); ++pi) {
    const SymbolPiece& p = sym.pieces[pi];
    if (!p.coupled) continue;
    const int j = p.eta_shell;
    const bool low = j == shells.k_min - 1;
    const double scale = std::ldexp(1.0, j);

    // zeta samples and window values.
    std::vector<double> zax(nz);
    for (int s = 0; s < nz; ++s) zax[s] = -kCubeHalf + 2.0 * kCubeHalf * s / nz;
    std::vector<double> win(nzd);
    std::vector<Vec3> zeta(nzd);
    for (std::size_t s = 0; s < nzd; ++s) {
      Vec3 z{0.0, 0.0, 0.0};
      if (dim == 1) {
        z[0] = zax[s];
      } else {
        const std::size_t nn = static_cast<std::size_t>(nz);
        z = {zax[s / (nn * nn)], zax[(s / nn) % nn], zax[s % nn]};
      }
      zeta[s] = z;
      const double r = norm3(z);
      win[s] = low ? lp_phi_wide(r) : lp_psi_wide(r);
    }

    const std::size_t gsize = g.size();
    std::vector<double> mag_all(nzd, 0.0);
    std::vector<std::vector<double>> mag_k(out_family.size(), std::vector<double>(nzd, 0.0));
    std::vector<double> sup_k(out_family.size(), 0.0);

    std::vector<cplx> h(nzd), spec(nzd);
    auto spectrum_at = [&](std::size_t xf) {
      const Vec3 xi = grid_xi(g, xf);
      double hmax = 0.0;
      for (std::size_t s = 0; s < nzd; ++s) {
        if (win[s] == 0.0) {
          h[s] = 0.0;
          continue;
        }
        h[s] = p.coupled(xi, scale * zeta[s]) * win[s];
        hmax = std::max(hmax, std::abs(h[s]));
      }
      FftEngine::instance().dft(dim, nz, h.data(), spec.data(), -1);
      const double inv = 1.0 / static_cast<double>(nzd);
      if (dim == 1) {
        for (int m = 0; m < nz; ++m) spec[m] *= inv * ((m & 1) ? -1.0 : 1.0);
      } else {
        std::size_t idx = 0;
        for (int i0 = 0; i0 < nz; ++i0)
          for (int i1 = 0; i1 < nz; ++i1)
            for (int i2 = 0; i2 < nz; ++i2, ++idx)
              spec[idx] *= inv * (((i0 + i1 + i2) & 1) ? -1.0 : 1.0);
      }
      return hmax;
    };

    // Pass 1: magnitudes and per-block sups.
    for (std::size_t xf = 0; xf < gsize; ++xf) {
      const double hmax = spectrum_at(xf);
      if (hmax == 0.0) continue;
      const double r = g.xi_abs(xf);
      for (std::size_t kf = 0; kf < out_family.size(); ++kf) {
        const double wk = out_weight(out_family[kf], r);
        if (wk <= 0.0) continue;
        sup_k[kf] = std::max(sup_k[kf], wk * hmax);
        auto& mk = mag_k[kf];
        for (std::size_t a = 0; a < nzd; ++a) {
          const double v = wk * std::abs(spec[a]);
          if (v > mk[a]) mk[a] = v;
        }
      }
      for (std::size_t a = 0; a < nzd; ++a) mag_all[a] = std::max(mag_all[a], std::abs(spec[a]));
    }

    // Greedy retention by global magnitude until every block tail clears tol.
    std::vector<std::size_t> order(nzd);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mag_all[a] > mag_all[b]; });
    std::vector<double> tail_k(out_family.size(), 0.0);
    for (std::size_t kf = 0; kf < out_family.size(); ++kf)
      tail_k[kf] = std::accumulate(mag_k[kf].begin(), mag_k[kf].end(), 0.0);
    auto worst_block = [&]() {
      double worst = 0.0;
      int which = -1;
      for (std::size_t kf = 0; kf < out_family.size(); ++kf) {
        if (sup_k[kf] <= 0.0) continue;
        const double rel = tail_k[kf] / sup_k[kf];
        if (rel > worst) {
          worst = rel;
          which = static_cast<int>(kf);
        }
      }
      return std::pair<double, int>(worst, which);
    };
    std::size_t kept = 0;
    while (true) {
      const auto [worst, which] = worst_block();
      if (worst <= tolerance) break;
      if (kept >= static_cast<std::size_t>(max_terms) || kept >= nzd)
        fail_numerical("expand_symbol: block (j=" + std::to_string(j) + ", k=" +
                       std::to_string(out_family[which]) + ") of '" + name +
                       "' cannot reach tolerance " + std::to_string(tolerance) + " within " +
                       std::to_string(max_terms) + " terms (tail " + std::to_string(worst) + ")");
      const std::size_t a = order[kept++];
      for (std::size_t kf = 0; kf < out_family.size(); ++kf) tail_k[kf] -= mag_k[kf][a];
    }

    PieceExpansion& exp = sym.expansions[pi];
    exp.block_sup = *std::max_element(sup_k.begin(), sup_k.end());
    exp.tail = worst_block().first;
    exp.terms.resize(kept);
    auto signed_mod = [&](std::size_t flat) {
      std::array<int, 3> m{0, 0, 0};
      if (dim == 1) {
        const int i = static_cast<int>(flat);
        m[0] = i < nz / 2 ? i : i - nz;
      } else {
        const std::size_t nn = static_cast<std::size_t>(nz);
        const int i0 = static_cast<int>(flat / (nn * nn));
        const int i1 = static_cast<int>((flat / nn) % nn);
        const int i2 = static_cast<int>(flat % nn);
        m[0] = i0 < nz / 2 ? i0 : i0 - nz;
        m[1] = i1 < nz / 2 ? i1 : i1 - nz;
        m[2] = i2 < nz / 2 ? i2 : i2 - nz;
      }
      return m;
    };
    for (std::size_t t = 0; t < kept; ++t) {
      exp.terms[t].mod = signed_mod(order[t]);
      exp.terms[t].magnitude = mag_all[order[t]];
      exp.terms[t].out_mult.assign(gsize, cplx{0.0, 0.0});
    }
    // Pass 2: store retained coefficients.
    for (std::size_t xf = 0; xf < gsize; ++xf) {
      if (spectrum_at(xf) == 0.0) continue;
      for (std::size_t t = 0; t < kept; ++t) exp.terms[t].out_mult[xf] = spec[order[t]];
    }

    for (std::size_t kf = 0; kf < out_family.size(); ++kf) {
      if (sup_k[kf] <= 0.0) continue;
      BlockReport br;
      br.piece = static_cast<int>(pi);
      br.j = j;
      br.k = out_family[kf];
      br.tail = tail_k[kf] / sup_k[kf];
      for (std::size_t t = 0; t < kept; ++t)
        if (mag_k[kf][order[t]] > 0.0) ++br.terms;
      sym.blocks.push_back(br);
      sym.truncation_bound = std::max(sym.truncation_bound, br.tail);
      sym.total_terms += br.terms;
    }
  }
  return sym;
}

namespace {

// e^{i c a . eta} multiplier applied to a spectral field, c = (pi/3) 2^{-j}.
SpectralField modulate(const SpectralField& f, const std::array<int, 3>& mod, int j) {
  const Grid& g = *f.grid;
  const double c = kModScale * std::ldexp(1.0, -j);
  SpectralField out = f;
  const int n = g.n;
  std::vector<cplx> ph0(n), ph1(n), ph2(n);
  for (int m = 0; m < n; ++m) {
    const double e = g.xi_axis[m];
    ph0[m] = std::polar(1.0, c * mod[0] * e);
    if (g.dim == 3) {
      ph1[m] = std::polar(1.0, c * mod[1] * e);
      ph2[m] = std::polar(1.0, c * mod[2] * e);
    }
  }
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m) out.coeffs[m] *= ph0[m];
    return out;
  }
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1) {
      const cplx p01 = ph0[i0] * ph1[i1];
      for (int i2 = 0; i2 < n; ++i2, ++idx) out.coeffs[idx] *= p01 * ph2[i2];
    }
  return out;
}

}  // namespace

SpectralField apply_bilinear(const BilinearSymbol& sym, const SpectralField& u,
                             const SpectralField& v) {
  if (!(*u.grid == *sym.grid) || !(*v.grid == *sym.grid))
    fail_validation("apply_bilinear: grid mismatch");
  SpectralField out(sym.grid);
  for (std::size_t pi = 0; pi < sym.pieces.size(); ++pi) {
    const SymbolPiece& p = sym.pieces[pi];
    const SpectralField U = p.left ? apply_radial_multiplier(u, p.left) : u;
    const SpectralField RV = p.right ? apply_radial_multiplier(v, p.right) : v;
    if (!p.coupled) {
      const SpectralField prod = pointwise_product(U, RV);
      for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] += prod.coeffs[i];
      continue;
    }
    for (const auto& term : sym.expansions[pi].terms) {
      const SpectralField MV = modulate(RV, term.mod, p.eta_shell);
      const SpectralField prod = pointwise_product(U, MV);
      for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] += term.out_mult[i] * prod.coeffs[i];
    }
  }
  truncate_band(out, dealias_band(*sym.grid));
  return out;
}

double block_reconstruction_error(const BilinearSymbol& sym, int piece, int k, int samples,
                                  std::mt19937_64& rng) {
  const SymbolPiece& p = sym.pieces[piece];
  if (!p.coupled) return 0.0;
  const PieceExpansion& exp = sym.expansions[piece];
  const Grid& g = *sym.grid;
  const DyadicShellSet& sh = sym.shells;
  const bool low = p.eta_shell == sh.k_min - 1;
  const double scale = std::ldexp(1.0, p.eta_shell);
  auto out_weight = [&](double r) {
    return k == sh.k_min - 1 ? sh.psi_low(k, r) : sh.psi(k, r);
  };

  // Grid xi with nonzero output weight.
  std::vector<std::size_t> xs;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (out_weight(g.xi_abs(i)) > 1e-6) xs.push_back(i);
  if (xs.empty()) return 0.0;

  double sup = 0.0, err = 0.0;
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::uniform_real_distribution<double> rad(low ? 0.0 : 0.5, 1.25);
  std::uniform_real_distribution<double> ang(-1.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const std::size_t xf = xs[pick(rng)];
    const Vec3 xi = grid_xi(g, xf);
    Vec3 dir{ang(rng), g.dim == 3 ? ang(rng) : 0.0, g.dim == 3 ? ang(rng) : 0.0};
    const double dn = norm3(dir);
    if (dn == 0.0) continue;
    const Vec3 eta = (rad(rng) * scale / dn) * dir;
    const double wk = out_weight(g.xi_abs(xf));
    const double wj = low ? sh.psi_low(p.eta_shell, norm3(eta)) : sh.psi(p.eta_shell, norm3(eta));
    const cplx truth = wk * p.coupled(xi, eta) * wj;
    cplx series{0.0, 0.0};
    const double c = kModScale / scale;
    for (const auto& term : exp.terms) {
      const double ph = c * (term.mod[0] * eta[0] + term.mod[1] * eta[1] + term.mod[2] * eta[2]);
      series += term.out_mult[xf] * std::polar(1.0, ph);
    }
    series *= wk * wj;
    sup = std::max(sup, std::abs(truth));
    err = std::max(err, std::abs(series - truth));
  }
  return sup > 0.0 ? err / std::max(sup, exp.block_sup) : 0.0;
}

// ---- standard symbols ----

std::vector<SymbolPiece> pieces_one() {
  SymbolPiece p;
  return {p};
}

namespace {

RadialFn shell_fn(const DyadicShellSet& sh, int k) {
  return [sh, k](double r) { return sh.psi(k, r); };
}
RadialFn low_fn(const DyadicShellSet& sh, int k) {
  return [sh, k](double r) { return sh.psi_low(k, r); };
}
// psi_{<= min(k+10, k_max+1)} - psi_{<= k-11}: the HH window around shell k.
RadialFn hh_window_fn(const DyadicShellSet& sh, int k) {
  const int top = std::min(k + 10, sh.k_max + 1);
  return [sh, k, top](double r) { return sh.psi_low(top, r) - sh.psi_low(k - 11, r); };
}

}  // namespace

std::vector<SymbolPiece> pieces_a_lh(const DyadicShellSet& sh) {
  std::vector<SymbolPiece> ps;
  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    SymbolPiece p;
    p.left = low_fn(sh, j - 11);
    p.right = shell_fn(sh, j);
    p.eta_shell = j;
    ps.push_back(std::move(p));
  }
  return ps;
}

// HL organized by the second-argument family with the complementary window:
// a_HL(b,c) = sum_{j} psi_j(c) (1 - psi_{<= j+10}(b)), plus the low-lump rule
// (pairs with the lump are HL only when the first shell sits >= 11 above it).
std::vector<SymbolPiece> pieces_a_hl(const DyadicShellSet& sh) {
  std::vector<SymbolPiece> ps;
  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    SymbolPiece p;
    const int top = std::min(j + 10, sh.k_max + 1);
    const DyadicShellSet shc = sh;
    p.left = [shc, top](double r) { return 1.0 - shc.psi_low(top, r); };
    p.right = shell_fn(sh, j);
    p.eta_shell = j;
    ps.push_back(std::move(p));
  }
  SymbolPiece lump;
  const int ltop = std::min(sh.k_min + 9, sh.k_max + 1);
  const DyadicShellSet shc = sh;
  lump.left = [shc, ltop](double r) { return 1.0 - shc.psi_low(ltop, r); };
  lump.right = low_fn(sh, sh.k_min - 1);
  lump.eta_shell = sh.k_min - 1;
  ps.push_back(std::move(lump));
  return ps;
}

std::vector<SymbolPiece> pieces_a_hh(const DyadicShellSet& sh) {
  std::vector<SymbolPiece> ps;
  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    SymbolPiece p;
    p.left = hh_window_fn(sh, j);
    p.right = shell_fn(sh, j);
    p.eta_shell = j;
    ps.push_back(std::move(p));
  }
  SymbolPiece lump;
  lump.left = low_fn(sh, std::min(sh.k_min + 9, sh.k_max + 1));
  lump.right = low_fn(sh, sh.k_min - 1);
  lump.eta_shell = sh.k_min - 1;
  ps.push_back(std::move(lump));
  return ps;
}

std::vector<SymbolPiece> pieces_b_kernel(const DyadicShellSet& sh, double alpha) {
  // phi^{-1} a_LH via the telescoped expansion: the coupled factors are the
  // smooth rho powers, the |xi-eta|^{alpha m} legs ride on the low-pass input.
  // The dropped remainder is phi^{-1} (|xi-eta|^alpha/rho)^M <= 3e-12 on the
  // pieces' support at M = 4.
  constexpr int M = 4;
  std::vector<SymbolPiece> ps;
  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    for (int m = 0; m < M; ++m) {
      SymbolPiece p;
      const double am = alpha * m;
      const DyadicShellSet shc = sh;
      p.left = [shc, j, am](double r) {
        const double w = shc.psi_low(j - 11, r);
        return w == 0.0 ? 0.0 : w * std::pow(r, am);
      };
      p.right = shell_fn(sh, j);
      p.eta_shell = j;
      p.coupled = [alpha, m](const Vec3& xi, const Vec3& eta) {
        const double rho = std::pow(norm3(xi), alpha) + std::pow(norm3(eta), alpha);
        return cplx{std::pow(rho, -(m + 1)), 0.0};
      };
      ps.push_back(std::move(p));
    }
  }
  return ps;
}

// ---- paraproduct decomposition ----

namespace {

struct PieceAccumulator {
  SpectralField hh, hl, lh;
  bool want_lh;
};

// All three pieces are organized by the conjugate-side family (shells + low
// lump); the first-argument windows for a fixed second shell are exactly
// complementary (low-pass / annular window / high-pass complement), so the
// pieces sum to the product identically on band-limited inputs.
PieceAccumulator run_pieces(const DyadicShellSet& sh, const SpectralField& u,
                            const SpectralField& v, bool want_lh) {
  if (!(*u.grid == *v.grid)) fail_validation("paraproduct: grid mismatch");
  const SpectralField vb = conjugate_field(v);
  PieceAccumulator acc{SpectralField(u.grid), SpectralField(u.grid), SpectralField(u.grid), want_lh};
  auto add = [](SpectralField& dst, const SpectralField& s) {
    for (std::size_t i = 0; i < dst.coeffs.size(); ++i) dst.coeffs[i] += s.coeffs[i];
  };
  for (int j = sh.k_min; j <= sh.k_max + 1; ++j) {
    const SpectralField vj = apply_radial_multiplier(vb, [&](double r) { return sh.psi(j, r); });
    const SpectralField ul = lp_project_low(sh, u, j - 11);
    if (want_lh) add(acc.lh, pointwise_product(ul, vj));
    const int top = std::min(j + 10, sh.k_max + 1);
    const SpectralField ut = lp_project_low(sh, u, top);
    add(acc.hh, pointwise_product(axpy({1.0, 0.0}, ut, {-1.0, 0.0}, ul), vj));
    add(acc.hl, pointwise_product(axpy({1.0, 0.0}, u, {-1.0, 0.0}, ut), vj));
  }
  // Conjugate-side low lump: HH up to k_min+9 above it, HL beyond.
  const SpectralField vlump = lp_project_low(sh, vb, sh.k_min - 1);
  const SpectralField ulow = lp_project_low(sh, u, std::min(sh.k_min + 9, sh.k_max + 1));
  add(acc.hh, pointwise_product(ulow, vlump));
  add(acc.hl, pointwise_product(axpy({1.0, 0.0}, u, {-1.0, 0.0}, ulow), vlump));
  return acc;
}

}  // namespace

ParaproductPieces decompose_paraproduct(const DyadicShellSet& sh, const SpectralField& u,
                                        const SpectralField& v) {
  auto acc = run_pieces(sh, u, v, true);
  return {std::move(acc.hh), std::move(acc.hl), std::move(acc.lh)};
}

SpectralField product_hh_hl(const DyadicShellSet& sh, const SpectralField& u,
                            const SpectralField& v) {
  auto acc = run_pieces(sh, u, v, false);
  for (std::size_t i = 0; i < acc.hh.coeffs.size(); ++i) acc.hh.coeffs[i] += acc.hl.coeffs[i];
  return std::move(acc.hh);
}

}  // namespace fqs
