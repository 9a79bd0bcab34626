#include <doctest.h>

#include "fqs/resonance.hpp"

using namespace fqs;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> rad(lo, hi), ang(-1.0, 1.0);
  Vec3 d{ang(rng), ang(rng), ang(rng)};
  const double n = norm3(d);
  return (rad(rng) / (n > 0 ? n : 1.0)) * d;
}

}  // namespace

TEST_CASE("phase closed forms: special values, symmetry, scaling") {
  const PhaseContext pc{1.6};
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const Vec3 xi = random_vec(rng, 0.1, 10.0);
    const Vec3 eta = random_vec(rng, 0.1, 10.0);
    // phi(xi, 0) = 0 and phi(xi, xi) = 2 |xi|^alpha.
    CHECK(pc.phase(xi, {0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pc.phase(xi, xi) ==
          doctest::Approx(2.0 * std::pow(norm3(xi), pc.alpha)).epsilon(1e-12));
    // Rotation invariance sampled via axis permutation (a rotation).
    const Vec3 xr{xi[2], xi[0], xi[1]}, er{eta[2], eta[0], eta[1]};
    CHECK(pc.phase(xr, er) == doctest::Approx(pc.phase(xi, eta)).epsilon(1e-12));
    // Homogeneity of degree alpha.
    const double s = 3.7;
    CHECK(pc.phase(s * xi, s * eta) ==
          doctest::Approx(std::pow(s, pc.alpha) * pc.phase(xi, eta)).epsilon(1e-12));
  }
}

TEST_CASE("gradients match central finite differences away from the cone tips") {
  std::mt19937_64 rng(43);
  for (double alpha : {1.25, 1.5, 1.75}) {
    const PhaseContext pc{alpha};
    double worst = 0.0;
    int used = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 xi = random_vec(rng, 0.5, 4.0);
      const Vec3 eta = random_vec(rng, 0.5, 4.0);
      if (norm3(xi - eta) < 0.2) continue;
      ++used;
      const double h = 1e-6;
      const Vec3 gx = pc.grad_xi(xi, eta);
      const Vec3 ge = pc.grad_eta(xi, eta);
      for (int d = 0; d < 3; ++d) {
        Vec3 xp = xi, xm = xi, ep = eta, em = eta;
        xp[d] += h;
        xm[d] -= h;
        ep[d] += h;
        em[d] -= h;
        const double fdx = (pc.phase(xp, eta) - pc.phase(xm, eta)) / (2 * h);
        const double fde = (pc.phase(xi, ep) - pc.phase(xi, em)) / (2 * h);
        worst = std::max(worst, std::fabs(fdx - gx[d]) / std::max(1e-9, std::fabs(fdx)));
        worst = std::max(worst, std::fabs(fde - ge[d]) / std::max(1e-9, std::fabs(fde)));
      }
    }
    CHECK(used > 800);
    CHECK(worst < 1e-6);
  }
  // Gradients stay finite at the tips (alpha > 1).
  const PhaseContext pc{1.3};
  const Vec3 z{0, 0, 0}, e{1, 0, 0};
  CHECK(norm3(pc.grad_xi(z, e)) < 1e30);
  CHECK(norm3(pc.grad_eta(e, z)) < 1e30);
}

TEST_CASE("lemma 5.1 expansion is an exact identity up to roundoff") {
  std::mt19937_64 rng(47);
  const PhaseContext pc{1.4};
  // N = 1 reduction: phi^{-1} = phi^{-1} rho^{-1}|xi-eta|^a + rho^{-1}.
  {
    const Vec3 eta{1.0, 0.4, -0.2};
    const Vec3 xi = eta + Vec3{0.05, 0.0, 0.02};
    CHECK(lemma51_residual(pc, xi, eta, 1) < 1e-12);
  }
  // xi == eta: the tail term carries |xi-eta| = 0 exactly.
  {
    const Vec3 eta{0.7, -0.3, 1.1};
    CHECK(lemma51_residual(pc, eta, eta, 1) == 0.0);
    CHECK(lemma51_residual(pc, eta, eta, 8) == 0.0);
  }
  // 1e4 random admissible points, N <= 8, both identities.
  double worst = 0.0, worst_g = 0.0;
  std::uniform_real_distribution<double> ratio(0.0, 0.25);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 eta = random_vec(rng, 0.3, 5.0);
    Vec3 d = random_vec(rng, 0.5, 1.0);
    const Vec3 xi = eta + (ratio(rng) * norm3(eta) / norm3(d)) * d;
    const int n = 1 + (i % 8);
    worst = std::max(worst, lemma51_residual(pc, xi, eta, n));
    worst_g = std::max(worst_g, lemma51_gradient_residual(pc, xi, eta, n));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_g < 1e-10);
  // Precondition is enforced.
  CHECK_THROWS_AS(lemma51_residual(pc, Vec3{3, 0, 0}, Vec3{1, 0, 0}, 2), Error);
}

TEST_CASE("region sampling respects the annuli and rejects empty triples") {
  std::mt19937_64 rng(53);
  RegionSpec spec;
  spec.kind = RegionKind::HH;
  spec.k = 0;
  spec.k1 = 2;
  spec.k2 = 2;
  spec.sample_count = 500;
  const auto samples = sample_region(spec, rng);
  CHECK(static_cast<int>(samples.size()) == spec.sample_count);
  for (const auto& s : samples) {
    CHECK(norm3(s.xi) > std::ldexp(1.0, spec.k - 1));
    CHECK(norm3(s.xi) < std::ldexp(1.0, spec.k + 1));
    CHECK(norm3(s.xi - s.eta) > std::ldexp(1.0, spec.k1 - 1));
    CHECK(norm3(s.xi - s.eta) < std::ldexp(1.0, spec.k1 + 1));
    CHECK(norm3(s.eta) > std::ldexp(1.0, spec.k2 - 1));
    CHECK(norm3(s.eta) < std::ldexp(1.0, spec.k2 + 1));
  }
  // Geometrically impossible: |xi| ~ 2^10 from |xi-eta|, |eta| ~ 1.
  RegionSpec bad;
  bad.kind = RegionKind::HH;
  bad.k = 10;
  bad.k1 = 0;
  bad.k2 = 0;
  bad.sample_count = 50;
  CHECK_THROWS_AS(sample_region(bad, rng), Error);
  // Constraint validation.
  RegionSpec wrong;
  wrong.kind = RegionKind::HL;
  wrong.k = 0;
  wrong.k1 = 0;
  wrong.k2 = 0;
  CHECK_THROWS_AS(sample_region(wrong, rng), Error);
}

TEST_CASE("symbol-class verification: HH and HL ellipticity") {
  std::mt19937_64 rng(59);
  for (double alpha : {1.25, 1.5, 1.75}) {
    const PhaseContext pc{alpha};
    // HH with k1 = k2 = k = 0: both gradients elliptic at the lemma scales.
    RegionSpec hh;
    hh.kind = RegionKind::HH;
    hh.sample_count = 2000;
    const auto rep = verify_symbol_class(pc, hh, 2, rng);
    CHECK(rep.pass);
    CHECK(rep.ell_xi_min > 0.0);
    CHECK(rep.ell_eta_min > 0.0);
    CHECK(rep.dir_cos_min > 0.0);
    CHECK(rep.dir_l_min > 0.0);
    CHECK(rep.upper_xi.at({0, 0}) < 1e3);
    CHECK(rep.upper_xi.at({1, 0}) < 1e3);
    CHECK(rep.upper_xi.at({2, 0}) < 1e4);

    // HL: grad_xi phi at scale 2^{(a-2)k} 2^{k2}, grad_eta at 2^{(a-1)k}.
    RegionSpec hl;
    hl.kind = RegionKind::HL;
    hl.k = 0;
    hl.k1 = 0;
    hl.k2 = -12;
    hl.sample_count = 2000;
    const auto rep2 = verify_symbol_class(pc, hl, 2, rng);
    CHECK(rep2.pass);
    CHECK(rep2.ell_xi_min > 0.0);
    CHECK(rep2.ell_xi_max < 1e3);
    CHECK(rep2.ell_eta_min > 0.0);
  }
  CHECK_THROWS_AS(
      verify_symbol_class(PhaseContext{1.5}, RegionSpec{}, 3, rng), Error);
}

TEST_CASE("dyadic constants: validation, small-t boundedness, envelope decay") {
  const double alpha = 1.5, lambda = 0.4;
  CHECK_THROWS_AS(dyadic_constants(alpha, 0.6, 1.0, 0), Error);
  CHECK_THROWS_AS(dyadic_constants(alpha, 0.2, 1.0, 0), Error);
  CHECK_THROWS_AS(dyadic_constants(alpha, lambda, -1.0, 0), Error);

  // t -> 0+: both sums finite (the non-time branch of each min dominates).
  const auto small = dyadic_constants(alpha, lambda, 1e-3, 0);
  CHECK(std::isfinite(small.first));
  CHECK(std::isfinite(small.second));
  CHECK(small.first > 0.0);
  CHECK(small.second > 0.0);

  // Monotone decay in t at fixed k.
  double prev1 = 1e300, prev2 = 1e300;
  for (double t : {1.0, 10.0, 100.0, 1000.0}) {
    const auto c = dyadic_constants(alpha, lambda, t, 0);
    CHECK(c.first <= prev1);
    CHECK(c.second <= prev2);
    prev1 = c.first;
    prev2 = c.second;
  }

  // The paper's upper bounds hold with O(1) constants over four decades.
  const double eps = decay_epsilon(alpha, lambda);
  const double del = decay_delta(alpha, lambda);
  CHECK(eps == doctest::Approx(0.1));
  CHECK(del == doctest::Approx(std::min((lambda + 1.5) / alpha, 1.5) - 1.0));
  double k1 = 0.0, k2 = 0.0;
  for (double t : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    k1 = std::max(k1, dyadic_c1_envelope(alpha, lambda, t, -40, 6) * std::pow(1.0 + t, 1.0 + eps));
    k2 = std::max(k2, dyadic_constants(alpha, lambda, t, 0).second * std::pow(1.0 + t, 1.0 + del));
  }
  CHECK(k1 < 1e3);
  CHECK(k2 < 1e3);
}

TEST_CASE("delta at the degenerate point is shaved below the corner value") {
  // lambda + 3/2 == (3/2) alpha along lambda = (3 alpha - 3)/2; alpha = 1.25
  // gives lambda = 0.375 inside the admissible interval.
  const double alpha = 1.25, lambda = 0.375;
  const double d = decay_delta(alpha, lambda);
  CHECK(d < std::min((lambda + 1.5) / alpha, 1.5) - 1.0);
  CHECK(d > 0.0);
}
