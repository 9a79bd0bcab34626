#include <doctest.h>

#include "fqs/radial.hpp"

using namespace fqs;

TEST_CASE("t=0 Gaussian profile matches the closed-form 3D Fourier pair") {
  // f^(rho) = exp(-rho^2/w^2)  =>  u(0,r) = (w^2/2)^{3/2} exp(-w^2 r^2 / 4).
  const double w = 2.0;
  const RadialProfile p = gaussian_profile(w, 12.0);
  for (double r : {0.0, 0.3, 1.0, 2.5}) {
    const cplx u = radial_propagate(p, 1.5, 0.0, r);
    const double exact = std::pow(w * w / 2.0, 1.5) * std::exp(-w * w * r * r / 4.0);
    CHECK(std::abs(u - cplx{exact, 0.0}) < 1e-8 * exact + 1e-10);
  }
}

TEST_CASE("r -> 0 limit: the two kernel branches agree") {
  const RadialProfile p = shell_profile(0);
  const cplx u0 = radial_propagate(p, 1.5, 2.0, 0.0);
  const cplx u1 = radial_propagate(p, 1.5, 2.0, 1e-6);
  CHECK(std::abs(u1 - u0) < 1e-8 * std::abs(u0));
}

TEST_CASE("quadrature validation and refinement failure") {
  const RadialProfile p = shell_profile(0);
  CHECK_THROWS_AS(radial_propagate(p, 1.5, -1.0, 0.5), Error);
  CHECK_THROWS_AS(radial_propagate(p, 1.5, 1.0, -0.5), Error);
  RadialQuadratureOptions strict;
  strict.tolerance = 1e-16;  // unreachable
  strict.max_refinements = 1;
  CHECK_THROWS_AS(radial_propagate(p, 1.5, 50.0, 10.0, strict), Error);
}

TEST_CASE("L2 conservation along the radial flow") {
  const RadialProfile p = shell_profile(0);
  const double ref = radial_l2(p);
  const double alpha = 1.5;
  for (double t : {0.0, 2.0, 8.0}) {
    // Fine grid over the support window for the conservation integral.
    const double v_hi = alpha * std::pow(2.0, alpha - 1.0);
    const double r_max = 1.6 * t * v_hi + 40.0;
    std::vector<double> rs;
    for (double r = 0.0; r <= r_max; r += 0.01) rs.push_back(r);
    const auto u = radial_propagate_grid(p, alpha, t, rs);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      const double a = std::norm(u[i]) * sq(rs[i]);
      const double b = std::norm(u[i + 1]) * sq(rs[i + 1]);
      acc += 0.5 * (rs[i + 1] - rs[i]) * (a + b);
    }
    const double l2 = std::sqrt(4.0 * kPi * acc);
    CHECK(std::fabs(l2 - ref) < 1e-6 * ref);
  }
}

TEST_CASE("dispersive decay exponents for a band-limited shell") {
  const double alpha = 1.5;
  const RadialProfile p = shell_profile(0);
  std::vector<double> ts;
  for (int i = 0; i < 12; ++i) ts.push_back(10.0 * std::pow(30.0, i / 11.0));
  const auto rows = decay_scan(p, alpha, ts);
  std::vector<double> tv, sup, l4, l6;
  for (const auto& r : rows) {
    tv.push_back(r.t);
    sup.push_back(r.sup);
    l4.push_back(r.l4);
    l6.push_back(r.l6);
  }
  // Log-log least squares (slope only).
  auto slope = [&](const std::vector<double>& v) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double x = std::log(tv[i]), y = std::log(v[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(slope(sup) == doctest::Approx(-1.5).epsilon(0.07));
  CHECK(slope(l6) == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(slope(l4) == doctest::Approx(-0.75).epsilon(0.14));
  // Conservation diagnostic stays near the profile's L2 along the scan.
  const double ref = radial_l2(p);
  for (const auto& r : rows) CHECK(std::fabs(r.l2 - ref) < 2e-2 * ref);
}

TEST_CASE("frequency scaling rescales the sup-norm prefactor by 2^{3(1-a/2)}") {
  const double alpha = 1.5;
  std::vector<double> ts;
  for (int i = 0; i < 10; ++i) ts.push_back(20.0 * std::pow(10.0, i / 9.0));
  auto prefactor = [&](int k) {
    const RadialProfile p = shell_profile(k);
    const auto rows = decay_scan(p, alpha, ts);
    std::vector<double> comp;
    for (const auto& r : rows) comp.push_back(r.sup * std::pow(r.t, 1.5));
    std::sort(comp.begin(), comp.end());
    return comp[comp.size() / 2];
  };
  const double measured = prefactor(1) / prefactor(0);
  const double predicted = std::pow(2.0, 3.0 * (1.0 - alpha / 2.0));
  CHECK(std::fabs(measured / predicted - 1.0) < 0.1);
}

TEST_CASE("decay_scan validates the time grid") {
  const RadialProfile p = shell_profile(0);
  CHECK_THROWS_AS(decay_scan(p, 1.5, {3.0, 2.0}), Error);
  CHECK_THROWS_AS(decay_scan(p, 1.5, {-1.0, 2.0}), Error);
}
