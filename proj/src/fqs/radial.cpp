#include "fqs/radial.hpp"

#include <algorithm>
#include <cmath>

#include "fqs/bump.hpp"

namespace fqs {

double RadialProfile::operator()(double rho) const {
  if (rho < support_lo || rho > support_hi) return 0.0;
  const std::size_t n = nodes.size();
  auto it = std::upper_bound(nodes.begin(), nodes.end(), rho);
  std::size_t i = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
  if (i >= n - 1) i = n - 2;
  const double h = nodes[i + 1] - nodes[i];
  const double s = (rho - nodes[i]) / h;
  const double y0 = i > 0 ? values[i - 1] : values[i];
  const double y1 = values[i];
  const double y2 = values[i + 1];
  const double y3 = i + 2 < n ? values[i + 2] : values[i + 1];
  // Catmull-Rom.
  const double a = 2.0 * y1;
  const double b = -y0 + y2;
  const double c = 2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3;
  const double d = -y0 + 3.0 * y1 - 3.0 * y2 + y3;
  return 0.5 * (a + b * s + c * s * s + d * s * s * s);
}

RadialProfile shell_profile(int k, double amplitude, int node_count) {
  RadialProfile p;
  const double lo = std::ldexp(1.0, k - 1), hi = std::ldexp(1.0, k + 1);
  p.support_lo = lo;
  p.support_hi = hi;
  p.nodes.resize(node_count);
  p.values.resize(node_count);
  for (int i = 0; i < node_count; ++i) {
    const double rho = lo + (hi - lo) * i / (node_count - 1.0);
    p.nodes[i] = rho;
    // Smooth bump == 1 on the middle half of the annulus, vanishing at both ends.
    const double s = (rho - lo) / (hi - lo);
    p.values[i] = amplitude * smooth_step(4.0 * s) * smooth_step(4.0 * (1.0 - s));
  }
  return p;
}

RadialProfile gaussian_profile(double width, double rho_max, double amplitude, int node_count) {
  RadialProfile p;
  p.support_lo = 0.0;
  p.support_hi = rho_max;
  p.nodes.resize(node_count);
  p.values.resize(node_count);
  for (int i = 0; i < node_count; ++i) {
    const double rho = rho_max * i / (node_count - 1.0);
    p.nodes[i] = rho;
    p.values[i] = amplitude * std::exp(-sq(rho / width));
  }
  return p;
}

double radial_l2(const RadialProfile& p) {
  // Trapezoid on the stored nodes.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.nodes.size(); ++i) {
    const double h = p.nodes[i + 1] - p.nodes[i];
    acc += 0.5 * h * (sq(p.values[i] * p.nodes[i]) + sq(p.values[i + 1] * p.nodes[i + 1]));
  }
  return std::sqrt(4.0 * kPi * acc);
}

namespace {

// 4-point Gauss-Legendre on [-1,1].
constexpr double kGlNode[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
constexpr double kGlWeight[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                 0.3478548451374538};

int panel_count(const RadialProfile& p, double alpha, double t, double r_max, int level,
                int min_panels) {
  const double span = p.support_hi - p.support_lo;
  const double dmax = std::max(r_max, t * alpha * std::pow(std::max(p.support_hi, 1e-12), alpha - 1.0));
  const double dp = kPi / (4.0 * std::max(dmax, 1e-12));
  int n = static_cast<int>(std::ceil(span / dp));
  n = std::max(n, min_panels);
  return n << level;
}

// One quadrature pass for a set of radii; returns (2pi)^{-3/2} 4pi *
// int sin(r rho)/r e^{-it rho^a} f^ rho drho with the r->0 limit built in.
void quad_pass(const RadialProfile& p, double alpha, double t, const std::vector<double>& rs,
               int panels, std::vector<cplx>& out) {
  const double lo = p.support_lo, span = p.support_hi - p.support_lo;
  const double h = span / panels;
  out.assign(rs.size(), cplx{0.0, 0.0});
  for (int pa = 0; pa < panels; ++pa) {
    const double c0 = lo + h * pa + 0.5 * h;
    for (int gq = 0; gq < 4; ++gq) {
      const double rho = c0 + 0.5 * h * kGlNode[gq];
      const double fv = p(rho);
      if (fv == 0.0) continue;
      const double ph = -t * std::pow(rho, alpha);
      const cplx base = 0.5 * h * kGlWeight[gq] * fv * rho * cplx{std::cos(ph), std::sin(ph)};
      for (std::size_t ir = 0; ir < rs.size(); ++ir) {
        const double r = rs[ir];
        const double kern = r < 1e-9 ? rho : std::sin(r * rho) / r;
        out[ir] += kern * base;
      }
    }
  }
  const double prefac = 4.0 * kPi * std::pow(kTwoPi, -1.5);
  for (auto& v : out) v *= prefac;
}

}  // namespace

std::vector<cplx> radial_propagate_grid(const RadialProfile& p, double alpha, double t,
                                        const std::vector<double>& r_grid,
                                        const RadialQuadratureOptions& opts) {
  if (!(t >= 0.0)) fail_validation("radial_propagate: t must be >= 0");
  for (double r : r_grid)
    if (r < 0.0) fail_validation("radial_propagate: r must be >= 0");
  double r_max = 0.0;
  for (double r : r_grid) r_max = std::max(r_max, r);
  std::vector<cplx> coarse, fine;
  quad_pass(p, alpha, t, r_grid, panel_count(p, alpha, t, r_max, 0, opts.min_panels), coarse);
  for (int level = 1; level <= opts.max_refinements; ++level) {
    quad_pass(p, alpha, t, r_grid, panel_count(p, alpha, t, r_max, level, opts.min_panels), fine);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
      diff = std::max(diff, std::abs(fine[i] - coarse[i]));
      scale = std::max(scale, std::abs(fine[i]));
    }
    if (diff <= opts.tolerance * std::max(scale, 1e-300)) return fine;
    coarse.swap(fine);
  }
  fail_numerical("radial quadrature did not converge to " + std::to_string(opts.tolerance) +
                 " within " + std::to_string(opts.max_refinements) + " refinements");
}

cplx radial_propagate(const RadialProfile& p, double alpha, double t, double r,
                      const RadialQuadratureOptions& opts) {
  return radial_propagate_grid(p, alpha, t, {r}, opts)[0];
}

std::vector<double> default_r_grid(const RadialProfile& p, double alpha, double t,
                                   int max_points) {
  const double v_lo = alpha * std::pow(std::max(p.support_lo, 1e-6), alpha - 1.0);
  const double v_hi = alpha * std::pow(p.support_hi, alpha - 1.0);
  const double w_lo = 0.3 * t * v_lo;
  const double w_hi = 1.6 * t * v_hi + 20.0;
  std::vector<double> rs;
  // Coverage near the origin.
  for (int i = 0; i < 40; ++i) rs.push_back(w_lo * i / 40.0);
  const int n = std::max(200, max_points - 40);
  for (int i = 0; i <= n; ++i) rs.push_back(w_lo + (w_hi - w_lo) * i / n);
  return rs;
}

std::vector<DecayScanRow> decay_scan(const RadialProfile& p, double alpha,
                                     const std::vector<double>& t_grid,
                                     const std::vector<double>& r_grid,
                                     const RadialQuadratureOptions& opts) {
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]) || !(t_grid[0] > 0.0))
      fail_validation("decay_scan: t grid must be positive increasing");
  std::vector<DecayScanRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    const std::vector<double> rs = r_grid.empty() ? default_r_grid(p, alpha, t) : r_grid;
    const auto u = radial_propagate_grid(p, alpha, t, rs, opts);
    DecayScanRow row;
    row.t = t;
    double i2 = 0.0, i4 = 0.0, i6 = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double a = std::abs(u[i]);
      row.sup = std::max(row.sup, a);
      if (i + 1 < rs.size()) {
        const double dr = rs[i + 1] - rs[i];
        const double b = std::abs(u[i + 1]);
        i2 += 0.5 * dr * (sq(a) * sq(rs[i]) + sq(b) * sq(rs[i + 1]));
        i4 += 0.5 * dr * (std::pow(a, 4.0) * sq(rs[i]) + std::pow(b, 4.0) * sq(rs[i + 1]));
        i6 += 0.5 * dr * (std::pow(a, 6.0) * sq(rs[i]) + std::pow(b, 6.0) * sq(rs[i + 1]));
      }
    }
    row.l2 = std::sqrt(4.0 * kPi * i2);
    row.l4 = std::pow(4.0 * kPi * i4, 0.25);
    row.l6 = std::pow(4.0 * kPi * i6, 1.0 / 6.0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fqs
