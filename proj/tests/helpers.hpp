#ifndef FQS_TEST_HELPERS_HPP
#define FQS_TEST_HELPERS_HPP

#include <functional>
#include <random>

#include "fqs/field.hpp"
#include "fqs/resonance.hpp"

namespace fqs_test {

using fqs::cplx;
using fqs::SpectralField;
using fqs::Vec3;

// Random field band-limited to per-axis |index| <= band.
inline SpectralField random_band_limited(const fqs::GridPtr& grid, int band,
                                         std::mt19937_64& rng, double amp = 1.0) {
  SpectralField f(grid);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = grid->n;
  auto keep = [&](int m) { return std::abs(grid->signed_index(m)) <= band; };
  std::size_t idx = 0;
  if (grid->dim == 1) {
    for (int m = 0; m < n; ++m)
      f.coeffs[m] = keep(m) ? amp * cplx{nd(rng), nd(rng)} : cplx{0.0, 0.0};
    return f;
  }
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2, ++idx)
        f.coeffs[idx] =
            keep(i0) && keep(i1) && keep(i2) ? amp * cplx{nd(rng), nd(rng)} : cplx{0.0, 0.0};
  return f;
}

// Random field with Fourier support inside the radial annulus [lo, hi].
inline SpectralField random_annulus(const fqs::GridPtr& grid, double lo, double hi,
                                    std::mt19937_64& rng, double amp = 1.0) {
  SpectralField f(grid);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid->xi_abs(i);
    f.coeffs[i] = (r >= lo && r <= hi) ? amp * cplx{nd(rng), nd(rng)} : cplx{0.0, 0.0};
  }
  return f;
}

// Independent reference for every bilinear engine: the direct O(N^{2d})
// double sum out(xi) = C_bil sum_eta m(xi,eta) u^(xi-eta) v^(eta) with true
// (unwrapped) frequency differences.
inline SpectralField direct_bilinear(const std::function<cplx(const Vec3&, const Vec3&)>& m,
                                     const SpectralField& u, const SpectralField& v) {
  const fqs::Grid& g = *u.grid;
  const int n = g.n;
  const double cbil = std::pow(g.dxi / std::sqrt(fqs::kTwoPi), g.dim);
  SpectralField out(u.grid);
  auto sidx = [&](int m_) { return g.signed_index(m_); };
  auto fidx = [&](int s) { return s >= 0 ? s : s + n; };
  const int lo = -n / 2, hi = n / 2 - 1;
  if (g.dim == 1) {
    for (int mo = 0; mo < n; ++mo) {
      const int so = sidx(mo);
      cplx acc{0.0, 0.0};
      for (int mv = 0; mv < n; ++mv) {
        const int sv = sidx(mv);
        const int su = so - sv;
        if (su < lo || su > hi) continue;
        const cplx uc = u.coeffs[fidx(su)];
        const cplx vc = v.coeffs[mv];
        if (uc == cplx{} || vc == cplx{}) continue;
        acc += m({g.dxi * so, 0, 0}, {g.dxi * sv, 0, 0}) * uc * vc;
      }
      out.coeffs[mo] = cbil * acc;
    }
    return out;
  }
  // d == 3: iterate only over nonzero v entries for speed.
  struct Entry {
    int s0, s1, s2;
    cplx c;
  };
  std::vector<Entry> ventries;
  {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2, ++idx)
          if (v.coeffs[idx] != cplx{}) ventries.push_back({sidx(i0), sidx(i1), sidx(i2), v.coeffs[idx]});
  }
  const std::size_t nn = static_cast<std::size_t>(n);
  std::size_t idx = 0;
  for (int o0 = 0; o0 < n; ++o0)
    for (int o1 = 0; o1 < n; ++o1)
      for (int o2 = 0; o2 < n; ++o2, ++idx) {
        const int s0 = sidx(o0), s1 = sidx(o1), s2 = sidx(o2);
        const Vec3 xi{g.dxi * s0, g.dxi * s1, g.dxi * s2};
        cplx acc{0.0, 0.0};
        for (const auto& e : ventries) {
          const int u0 = s0 - e.s0, u1 = s1 - e.s1, u2 = s2 - e.s2;
          if (u0 < lo || u0 > hi || u1 < lo || u1 > hi || u2 < lo || u2 > hi) continue;
          const cplx uc =
              u.coeffs[(static_cast<std::size_t>(fidx(u0)) * nn + fidx(u1)) * nn + fidx(u2)];
          if (uc == cplx{}) continue;
          acc += m(xi, {g.dxi * e.s0, g.dxi * e.s1, g.dxi * e.s2}) * uc * e.c;
        }
        out.coeffs[idx] = cbil * acc;
      }
  return out;
}

inline double rel_diff(const SpectralField& a, const SpectralField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a.coeffs[i] - b.coeffs[i]));
    den = std::max(den, std::abs(b.coeffs[i]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace fqs_test

#endif
