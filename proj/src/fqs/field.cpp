#include "fqs/field.hpp"

#include <algorithm>
#include <cmath>

#include "fqs/fft.hpp"

namespace fqs {

namespace {

// Internal factory for alias-safe product boxes; these grids may have
// non-power-of-two (but even, FFT-friendly) sizes and never escape the engine.
GridPtr make_box_grid(int dim, int n, double half_width) {
  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->n = n;
  g->half_width = half_width;
  g->spacing = 2.0 * half_width / n;
  g->dxi = kPi / half_width;
  g->xi_axis.resize(n);
  g->x_axis.resize(n);
  for (int m = 0; m < n; ++m) {
    const int ms = m < n / 2 ? m : m - n;
    g->xi_axis[m] = g->dxi * ms;
    g->x_axis[m] = -half_width + g->spacing * m;
  }
  return g;
}

int next_fast_even(int n) {
  if (n < 4) n = 4;
  if (n & 1) ++n;
  for (;; n += 2) {
    int m = n;
    for (int p : {2, 3, 5}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

// (-1)^{sum of axis indices}; carries the x-origin at -L through the DFT.
inline double origin_sign_1d(int m) { return (m & 1) ? -1.0 : 1.0; }

void scaled_forward(const Grid& g, const std::vector<cplx>& phys, std::vector<cplx>& spec) {
  const int n = g.n;
  spec.resize(phys.size());
  FftEngine::instance().dft(g.dim, n, phys.data(), spec.data(), -1);
  const double cf = std::pow(g.spacing / std::sqrt(kTwoPi), g.dim);
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m) spec[m] *= cf * origin_sign_1d(m);
  } else {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2, ++idx) spec[idx] *= cf * origin_sign_1d(i0 + i1 + i2);
  }
}

void scaled_inverse(const Grid& g, const std::vector<cplx>& spec, std::vector<cplx>& phys) {
  const int n = g.n;
  std::vector<cplx> tmp(spec.size());
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m) tmp[m] = spec[m] * origin_sign_1d(m);
  } else {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2, ++idx) tmp[idx] = spec[idx] * origin_sign_1d(i0 + i1 + i2);
  }
  phys.resize(spec.size());
  FftEngine::instance().dft(g.dim, n, tmp.data(), phys.data(), +1);
  const double ci = std::pow(g.dxi / std::sqrt(kTwoPi), g.dim);
  for (auto& v : phys) v *= ci;
}

// Copy coefficients between grids with identical dxi, matching signed indices.
void regrid_copy(const SpectralField& src, SpectralField& dst, int band) {
  const Grid& gs = *src.grid;
  const Grid& gd = *dst.grid;
  const int ns = gs.n, nd = gd.n;
  const int b = std::min({band, ns / 2 - 1, nd / 2 - 1});
  auto wrap = [](int s, int n) { return s >= 0 ? s : s + n; };
  if (gs.dim == 1) {
    for (int s = -b; s <= b; ++s) dst.coeffs[wrap(s, nd)] = src.coeffs[wrap(s, ns)];
    return;
  }
  const std::size_t nns = static_cast<std::size_t>(ns), nnd = static_cast<std::size_t>(nd);
  for (int s0 = -b; s0 <= b; ++s0)
    for (int s1 = -b; s1 <= b; ++s1) {
      const std::size_t rs = (static_cast<std::size_t>(wrap(s0, ns)) * nns + wrap(s1, ns)) * nns;
      const std::size_t rd = (static_cast<std::size_t>(wrap(s0, nd)) * nnd + wrap(s1, nd)) * nnd;
      for (int s2 = -b; s2 <= b; ++s2) dst.coeffs[rd + wrap(s2, nd)] = src.coeffs[rs + wrap(s2, ns)];
    }
}

}  // namespace

SpectralField transform_forward(const std::vector<cplx>& physical, const GridPtr& grid) {
  if (physical.size() != grid->size()) fail_validation("transform_forward: array size does not match grid");
  SpectralField f(grid);
  scaled_forward(*grid, physical, f.coeffs);
  return f;
}

std::vector<cplx> transform_inverse(const SpectralField& f) {
  std::vector<cplx> phys;
  scaled_inverse(*f.grid, f.coeffs, phys);
  return phys;
}

void propagate_linear_inplace(SpectralField& f, double alpha, double t) {
  if (!(alpha > 1.0 && alpha <= 2.0)) fail_validation("propagate_linear: alpha must lie in (1,2]");
  if (t == 0.0) return;
  const Grid& g = *f.grid;
  const int n = g.n;
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m) {
      const double ph = -t * std::pow(std::fabs(g.xi_axis[m]), alpha);
      f.coeffs[m] *= cplx{std::cos(ph), std::sin(ph)};
    }
    return;
  }
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0) {
    const double a2 = sq(g.xi_axis[i0]);
    for (int i1 = 0; i1 < n; ++i1) {
      const double ab2 = a2 + sq(g.xi_axis[i1]);
      for (int i2 = 0; i2 < n; ++i2, ++idx) {
        const double r = std::sqrt(ab2 + sq(g.xi_axis[i2]));
        const double ph = -t * std::pow(r, alpha);
        f.coeffs[idx] *= cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }
}

SpectralField propagate_linear(const SpectralField& f, double alpha, double t) {
  SpectralField out = f;
  propagate_linear_inplace(out, alpha, t);
  return out;
}

SpectralField apply_radial_multiplier(const SpectralField& f, const std::function<double(double)>& m) {
  SpectralField out = f;
  const Grid& g = *f.grid;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] *= m(g.xi_abs(i));
  return out;
}

double l2_norm(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += std::norm(c);
  return std::sqrt(s * std::pow(f.grid->dxi, f.grid->dim));
}

double lp_norm(const SpectralField& f, double p) {
  const auto phys = transform_inverse(f);
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : phys) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (const auto& v : phys) s += std::pow(std::abs(v), p);
  return std::pow(s * std::pow(f.grid->spacing, f.grid->dim), 1.0 / p);
}

double sobolev_norm(const SpectralField& f, double s) {
  if (s < 0.0) fail_validation("sobolev_norm: s must be >= 0");
  const Grid& g = *f.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const double w = std::pow(1.0 + sq(g.xi_abs(i)), s);
    acc += w * std::norm(f.coeffs[i]);
  }
  return std::sqrt(acc * std::pow(g.dxi, g.dim));
}

double weighted_l2(const SpectralField& f, int w) {
  if (w != 1 && w != 2) fail_validation("weighted_l2: weight power must be 1 or 2");
  const Grid& g = *f.grid;
  const auto phys = transform_inverse(f);
  const int n = g.n;
  double acc = 0.0;
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) acc += std::pow(std::fabs(g.x_axis[j]), 2.0 * w) * std::norm(phys[j]);
  } else {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0) {
      const double a2 = sq(g.x_axis[i0]);
      for (int i1 = 0; i1 < n; ++i1) {
        const double ab2 = a2 + sq(g.x_axis[i1]);
        for (int i2 = 0; i2 < n; ++i2, ++idx) {
          const double r2 = ab2 + sq(g.x_axis[i2]);
          acc += (w == 1 ? r2 : r2 * r2) * std::norm(phys[idx]);
        }
      }
    }
  }
  return std::sqrt(acc * std::pow(g.spacing, g.dim));
}

bool all_finite(const SpectralField& f) {
  for (const auto& c : f.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

SpectralField xi_derivative(const SpectralField& f, int axis) {
  const Grid& g = *f.grid;
  if (axis < 0 || axis >= g.dim) fail_validation("xi_derivative: axis out of range");
  auto phys = transform_inverse(f);
  const int n = g.n;
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) phys[j] *= cplx{0.0, -g.x_axis[j]};
  } else {
    std::size_t idx = 0;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2, ++idx) {
          const double x = axis == 0 ? g.x_axis[i0] : (axis == 1 ? g.x_axis[i1] : g.x_axis[i2]);
          phys[idx] *= cplx{0.0, -x};
        }
  }
  return transform_forward(phys, f.grid);
}

SpectralField axpy(const cplx& a, const SpectralField& u, const cplx& b, const SpectralField& v) {
  if (!(*u.grid == *v.grid)) fail_validation("axpy: grid mismatch");
  SpectralField out(u.grid);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = a * u.coeffs[i] + b * v.coeffs[i];
  return out;
}

int dealias_band(const Grid& g) { return (2 * (g.n / 2)) / 3; }

void truncate_band(SpectralField& f, int band) {
  const Grid& g = *f.grid;
  const int n = g.n;
  auto keep = [&](int m) { return std::abs(g.signed_index(m)) <= band; };
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m)
      if (!keep(m)) f.coeffs[m] = 0.0;
    return;
  }
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0) {
    const bool k0 = keep(i0);
    for (int i1 = 0; i1 < n; ++i1) {
      const bool k01 = k0 && keep(i1);
      for (int i2 = 0; i2 < n; ++i2, ++idx)
        if (!(k01 && keep(i2))) f.coeffs[idx] = 0.0;
    }
  }
}

int active_band(const SpectralField& f, double tol) {
  const Grid& g = *f.grid;
  double mx = 0.0;
  for (const auto& c : f.coeffs) mx = std::max(mx, std::abs(c));
  if (mx == 0.0) return 0;
  const double thr = tol * mx;
  int band = 0;
  const int n = g.n;
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m)
      if (std::abs(f.coeffs[m]) > thr) band = std::max(band, std::abs(g.signed_index(m)));
    return band;
  }
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0) {
    const int a0 = std::abs(g.signed_index(i0));
    for (int i1 = 0; i1 < n; ++i1) {
      const int a1 = std::max(a0, std::abs(g.signed_index(i1)));
      for (int i2 = 0; i2 < n; ++i2, ++idx)
        if (std::abs(f.coeffs[idx]) > thr)
          band = std::max(band, std::max(a1, std::abs(g.signed_index(i2))));
    }
  }
  return band;
}

GridPtr box_grid_for(const Grid& g, int content_band) {
  const int m = std::min(next_fast_even(2 * content_band + 2), g.n);
  return make_box_grid(g.dim, m, g.half_width);
}

SpectralField restrict_to_box(const SpectralField& f, const GridPtr& box, int band) {
  SpectralField out(box);
  regrid_copy(f, out, band);
  return out;
}

void accumulate_from_box(SpectralField& full, const SpectralField& box, int band,
                         const cplx& scale) {
  const Grid& gs = *box.grid;
  const Grid& gd = *full.grid;
  const int ns = gs.n, nd = gd.n;
  const int b = std::min({band, ns / 2 - 1, nd / 2 - 1});
  auto wrap = [](int s, int n) { return s >= 0 ? s : s + n; };
  if (gs.dim == 1) {
    for (int s = -b; s <= b; ++s) full.coeffs[wrap(s, nd)] += scale * box.coeffs[wrap(s, ns)];
    return;
  }
  const std::size_t nns = static_cast<std::size_t>(ns), nnd = static_cast<std::size_t>(nd);
  for (int s0 = -b; s0 <= b; ++s0)
    for (int s1 = -b; s1 <= b; ++s1) {
      const std::size_t rs = (static_cast<std::size_t>(wrap(s0, ns)) * nns + wrap(s1, ns)) * nns;
      const std::size_t rd = (static_cast<std::size_t>(wrap(s0, nd)) * nnd + wrap(s1, nd)) * nnd;
      for (int s2 = -b; s2 <= b; ++s2)
        full.coeffs[rd + wrap(s2, nd)] += scale * box.coeffs[rs + wrap(s2, ns)];
    }
}

SpectralField conjugate_field(const SpectralField& f) {
  const Grid& g = *f.grid;
  SpectralField out(f.grid);
  const int n = g.n;
  auto neg = [n](int m) { return m == 0 ? 0 : n - m; };
  if (g.dim == 1) {
    for (int m = 0; m < n; ++m) out.coeffs[m] = std::conj(f.coeffs[neg(m)]);
    return out;
  }
  const std::size_t nn = static_cast<std::size_t>(n);
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1) {
      const std::size_t row = (static_cast<std::size_t>(neg(i0)) * nn + neg(i1)) * nn;
      for (int i2 = 0; i2 < n; ++i2, ++idx) out.coeffs[idx] = std::conj(f.coeffs[row + neg(i2)]);
    }
  return out;
}

SpectralField pointwise_product(const SpectralField& u, const SpectralField& v, int out_band) {
  if (!(*u.grid == *v.grid)) fail_validation("pointwise_product: grid mismatch");
  const Grid& g = *u.grid;
  if (out_band < 0) out_band = dealias_band(g);
  const int bu = active_band(u);
  const int bv = active_band(v);
  const int bread = std::min(out_band, bu + bv);

  // Alias-safe box: true product content reaches bu+bv; reading up to bread is
  // uncontaminated iff M > bu+bv+bread.
  const int m_needed = std::max(bu + bv + bread + 1, 2 * std::max(bu, bv) + 2);
  SpectralField out(u.grid);
  if (m_needed >= g.n) {
    // Full-grid path.
    auto pu = transform_inverse(u);
    const auto pv = transform_inverse(v);
    for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
    out = transform_forward(pu, u.grid);
    truncate_band(out, out_band);
    return out;
  }
  const int m = std::min(next_fast_even(m_needed), g.n);
  GridPtr box = make_box_grid(g.dim, m, g.half_width);
  SpectralField ub(box), vb(box);
  regrid_copy(u, ub, bu);
  regrid_copy(v, vb, bv);
  auto pu = transform_inverse(ub);
  const auto pv = transform_inverse(vb);
  for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
  SpectralField pb = transform_forward(pu, box);
  regrid_copy(pb, out, bread);
  return out;
}

}  // namespace fqs
