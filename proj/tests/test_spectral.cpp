#include <doctest.h>

#include "fqs/shells.hpp"
#include "helpers.hpp"

using namespace fqs;
using fqs_test::random_band_limited;

TEST_CASE("make_grid accepts the documented shapes and rejects the rest") {
  const GridPtr g1 = make_grid(1, 16, kPi);
  CHECK(g1->dxi == doctest::Approx(1.0));
  CHECK(g1->xi_axis[0] == 0.0);
  CHECK(g1->xi_axis[8] == doctest::Approx(-8.0));  // FFT order: Nyquist at n/2
  CHECK(g1->xi_axis[15] == doctest::Approx(-1.0));
  CHECK(g1->spacing * g1->n == doctest::Approx(2.0 * g1->half_width));

  const GridPtr g3 = make_grid(3, 64, 40.0);
  CHECK(g3->dxi == doctest::Approx(kPi / 40.0));

  CHECK_THROWS_AS(make_grid(3, 7, 40.0), Error);
  CHECK_THROWS_AS(make_grid(3, 12, 40.0), Error);
  CHECK_THROWS_AS(make_grid(2, 16, 1.0), Error);
  CHECK_THROWS_AS(make_grid(3, 16, -1.0), Error);
}

TEST_CASE("transform roundtrip and Plancherel") {
  std::mt19937_64 rng(7);
  for (const GridPtr& g : {make_grid(1, 64, kPi), make_grid(3, 16, 8.0)}) {
    std::vector<cplx> phys(g->size());
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto& v : phys) v = cplx{nd(rng), nd(rng)};
    const SpectralField f = transform_forward(phys, g);
    const auto back = transform_inverse(f);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i) {
      err = std::max(err, std::abs(back[i] - phys[i]));
      scale = std::max(scale, std::abs(phys[i]));
    }
    CHECK(err / scale < 1e-12);

    // Discrete Plancherel: physical-side L2 equals Fourier-side L2.
    const double phys_l2 = lp_norm(f, 2.0);
    CHECK(phys_l2 == doctest::Approx(l2_norm(f)).epsilon(1e-12));
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("constant and single-mode fields transform to deltas") {
  const GridPtr g = make_grid(1, 32, kPi);
  std::vector<cplx> ones(g->size(), cplx{1.0, 0.0});
  const SpectralField f = transform_forward(ones, g);
  for (int m = 1; m < g->n; ++m) CHECK(std::abs(f.coeffs[m]) < 1e-13 * std::abs(f.coeffs[0]));

  std::vector<cplx> mode(g->size());
  const double xi0 = 3.0;
  for (int j = 0; j < g->n; ++j) mode[j] = std::polar(1.0, xi0 * g->x_axis[j]);
  const SpectralField f2 = transform_forward(mode, g);
  for (int m = 0; m < g->n; ++m) {
    if (g->xi_axis[m] == xi0) continue;
    CHECK(std::abs(f2.coeffs[m]) < 1e-12 * std::abs(f2.coeffs[3]));
  }
}

TEST_CASE("propagator: unitary, group law, inverse flow, validation") {
  std::mt19937_64 rng(11);
  const GridPtr g = make_grid(3, 16, 8.0);
  const SpectralField f = random_band_limited(g, 5, rng);
  const double alpha = 1.5;

  const SpectralField id = propagate_linear(f, alpha, 0.0);
  CHECK(fqs_test::rel_diff(id, f) == 0.0);

  const SpectralField p = propagate_linear(f, alpha, 0.7);
  CHECK(l2_norm(p) == doctest::Approx(l2_norm(f)).epsilon(1e-14));
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(p.coeffs[i]) == doctest::Approx(std::abs(f.coeffs[i])).epsilon(1e-13));

  const SpectralField ab = propagate_linear(propagate_linear(f, alpha, 0.3), alpha, 0.4);
  CHECK(fqs_test::rel_diff(ab, p) < 1e-12);

  const SpectralField back = propagate_linear(p, alpha, -0.7);
  CHECK(fqs_test::rel_diff(back, f) < 1e-12);

  CHECK_THROWS_AS(propagate_linear(f, 1.0, 0.1), Error);
  CHECK_THROWS_AS(propagate_linear(f, 0.5, 0.1), Error);
}

TEST_CASE("alpha=2 Gaussian evolution matches the closed form") {
  // (d_t + i D^2) u = 0 with u0 = exp(-|x|^2) has
  // u(t,x) = (1+4it)^{-d/2} exp(-|x|^2/(1+4it)).
  const GridPtr g = make_grid(3, 64, 8.0);
  std::vector<cplx> phys(g->size());
  const int n = g->n;
  std::size_t idx = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2, ++idx) {
        const double r2 = sq(g->x_axis[i0]) + sq(g->x_axis[i1]) + sq(g->x_axis[i2]);
        phys[idx] = std::exp(-r2);
      }
  SpectralField f = transform_forward(phys, g);
  const double t = 0.3;
  propagate_linear_inplace(f, 2.0, t);
  const auto ut = transform_inverse(f);
  const cplx denom{1.0, 4.0 * t};
  const cplx pref = std::pow(denom, cplx{-1.5, 0.0});
  double err = 0.0;
  idx = 0;
  for (int i0 = 0; i0 < n; ++i0)
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2, ++idx) {
        const double r2 = sq(g->x_axis[i0]) + sq(g->x_axis[i1]) + sq(g->x_axis[i2]);
        const cplx exact = pref * std::exp(-r2 / denom);
        err = std::max(err, std::abs(ut[idx] - exact));
      }
  CHECK(err < 1e-8);
}

TEST_CASE("Littlewood-Paley projectors") {
  const GridPtr g = make_grid(1, 64, kPi);
  const DyadicShellSet sh = make_shell_set(g);
  CHECK(sh.k_min == 1);
  CHECK(sh.k_max == 3);

  // Single mode exactly on a shell radius: psi_k == 1 there.
  SpectralField f(g);
  for (int m = 0; m < g->n; ++m)
    if (g->xi_axis[m] == 4.0) f.coeffs[m] = 1.0;  // |xi| = 2^2
  const SpectralField p = lp_project(sh, f, 2);
  CHECK(fqs_test::rel_diff(p, f) < 1e-14);

  // Telescoping: sum of shell projections recovers annulus-supported fields.
  std::mt19937_64 rng(3);
  const SpectralField a = fqs_test::random_annulus(g, std::ldexp(1.0, sh.k_min),
                                                   std::ldexp(1.0, sh.k_max - 1), rng);
  SpectralField sum(g);
  for (int k = sh.k_min; k <= sh.k_max; ++k) {
    const SpectralField pk = lp_project(sh, a, k);
    for (std::size_t i = 0; i < sum.size(); ++i) sum.coeffs[i] += pk.coeffs[i];
  }
  CHECK(fqs_test::rel_diff(sum, a) < 1e-12);

  // Disjoint supports: P_k P_j = 0 for |k-j| >= 2.
  const SpectralField pk = lp_project(sh, a, sh.k_min);
  const SpectralField pkj = lp_project(sh, pk, sh.k_min + 2);
  CHECK(l2_norm(pkj) < 1e-14 * std::max(1.0, l2_norm(a)));

  CHECK_THROWS_AS(lp_project(sh, f, sh.k_max + 1), Error);
  CHECK_THROWS_AS(lp_project(sh, f, sh.k_min - 1), Error);

  // Partition of unity with the low lump, away from the aliased annuli.
  const Grid& gr = *g;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    const double r = gr.xi_abs(i);
    if (r > std::ldexp(1.0, sh.k_max)) continue;
    double s = sh.psi_low(sh.k_min - 1, r);
    for (int k = sh.k_min; k <= sh.k_max; ++k) s += sh.psi(k, r);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Projectors commute with the propagator exactly.
  const SpectralField lhs = lp_project(sh, propagate_linear(a, 1.5, 0.4), sh.k_min + 1);
  const SpectralField rhs = propagate_linear(lp_project(sh, a, sh.k_min + 1), 1.5, 0.4);
  CHECK(fqs_test::rel_diff(lhs, rhs) < 1e-14);
}

TEST_CASE("norms: single mode, zero field, weighted moments") {
  const GridPtr g = make_grid(3, 16, 8.0);
  SpectralField f(g);
  CHECK(sobolev_norm(f, 10.0) == 0.0);
  CHECK(lp_norm(f, 4.0) == 0.0);
  CHECK(weighted_l2(f, 2) == 0.0);

  // Mode with unit-L2 normalization: H^s = (1+|xi0|^2)^{s/2}.
  const double a = 0.37;
  std::size_t where = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(g->xi_abs(i) - 2.0) < 0.2) {
      where = i;
      break;
    }
  f.coeffs[where] = a * std::pow(g->dxi, -1.5);
  const double xi0 = g->xi_abs(where);
  for (double s : {0.0, 2.0, 10.0})
    CHECK(sobolev_norm(f, s) == doctest::Approx(a * std::pow(1.0 + xi0 * xi0, s / 2.0)));
  CHECK_THROWS_AS(weighted_l2(f, 3), Error);
}

TEST_CASE("xi derivative via -ix matches analytic gradients of a Gaussian") {
  const GridPtr g = make_grid(1, 128, 16.0);
  SpectralField f(g);
  for (int m = 0; m < g->n; ++m) f.coeffs[m] = std::exp(-sq(g->xi_axis[m]) / 4.0);
  const SpectralField d = xi_derivative(f, 0);
  double err = 0.0;
  for (int m = 0; m < g->n; ++m) {
    const double xi = g->xi_axis[m];
    err = std::max(err, std::abs(d.coeffs[m] - cplx{-xi / 2.0, 0.0} * f.coeffs[m]));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("banded pointwise product equals the full-grid product") {
  std::mt19937_64 rng(5);
  const GridPtr g = make_grid(3, 16, 8.0);
  const SpectralField u = random_band_limited(g, 3, rng);
  const SpectralField v = random_band_limited(g, 2, rng);
  // Full-grid reference.
  auto pu = transform_inverse(u);
  const auto pv = transform_inverse(v);
  for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pv[i];
  SpectralField ref = transform_forward(pu, g);
  truncate_band(ref, dealias_band(*g));
  const SpectralField got = pointwise_product(u, v);
  CHECK(fqs_test::rel_diff(got, ref) < 1e-13);
}

TEST_CASE("conjugate_field flips the physical field conjugate") {
  std::mt19937_64 rng(9);
  const GridPtr g = make_grid(1, 32, kPi);
  const SpectralField f = random_band_limited(g, 9, rng);
  const auto phys = transform_inverse(f);
  const auto conj_phys = transform_inverse(conjugate_field(f));
  double err = 0.0;
  for (std::size_t i = 0; i < phys.size(); ++i)
    err = std::max(err, std::abs(conj_phys[i] - std::conj(phys[i])));
  CHECK(err < 1e-13);
}
