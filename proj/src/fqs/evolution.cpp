#include "fqs/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace fqs {

namespace {

SpectralField to_physical_frame(const SpectralField& profile, double alpha, double s) {
  return propagate_linear(profile, alpha, s);  // u^ = e^{-is|xi|^a} g^
}

SpectralField to_profile_frame(const SpectralField& field, double alpha, double s) {
  return propagate_linear(field, alpha, -s);
}

void check_finite(const SpectralField& f, double s) {
  if (!all_finite(f)) fail_numerical("blow-up detected at t=" + std::to_string(s));
}

}  // namespace

SpectralField rhs_original(const SpectralField& g_profile, double alpha, double s,
                           const cplx& coupling) {
  if (s < 0.0) fail_validation("rhs_original: s must be >= 0");
  const SpectralField u = to_physical_frame(g_profile, alpha, s);
  SpectralField prod = pointwise_product(u, conjugate_field(u));
  check_finite(prod, s);
  SpectralField d = to_profile_frame(prod, alpha, s);
  for (auto& c : d.coeffs) c *= coupling;
  return d;
}

SpectralField rhs_transformed(const DyadicShellSet& shells, double alpha,
                              const SpectralField& f_profile, const SpectralField& g_profile,
                              double s, const cplx& coupling, const BOperatorOptions& bop) {
  if (!(*f_profile.grid == *g_profile.grid)) fail_validation("rhs_transformed: grid mismatch");
  const SpectralField w = to_physical_frame(f_profile, alpha, s);
  const SpectralField u = to_physical_frame(g_profile, alpha, s);
  const SpectralField ubar = conjugate_field(u);
  const SpectralField buu = apply_B(shells, alpha, u, ubar, bop);
  const SpectralField usq = pointwise_product(u, ubar);  // |u|^2

  const cplx i{0.0, 1.0};
  const cplx c = coupling;
  const double c2 = std::norm(c);  // |c|^2

  SpectralField rhs = product_hh_hl(shells, w, w);  // (w conj w)_{HH+HL}
  for (auto& v : rhs.coeffs) v *= c;

  const SpectralField t2 = product_hh_hl(shells, w, buu);  // [w conj(B)]_{HH+HL}
  const SpectralField t3 = product_hh_hl(shells, buu, u);  // [B conj(u)]_{HH+HL}
  const SpectralField t4 = apply_B(shells, alpha, usq, ubar, bop);
  const SpectralField t5 = apply_B(shells, alpha, u, usq, bop);
  const cplx w2 = i * c2, w3 = -i * c * c, w4 = i * c * c, w5 = i * c2;
  for (std::size_t n = 0; n < rhs.coeffs.size(); ++n)
    rhs.coeffs[n] += w2 * t2.coeffs[n] + w3 * t3.coeffs[n] + w4 * t4.coeffs[n] + w5 * t5.coeffs[n];
  check_finite(rhs, s);
  return to_profile_frame(rhs, alpha, s);
}

double wrap_bound_estimate(const DyadicShellSet& shells, const SpectralField& field, double alpha) {
  const Grid& g = *field.grid;
  double total = 0.0;
  for (const auto& c : field.coeffs) total += std::norm(c);
  if (total == 0.0) return std::numeric_limits<double>::infinity();
  int k_top = shells.k_min;
  for (int k = shells.k_max; k >= shells.k_min; --k) {
    const double m = shell_l2(shells, field, k);
    if (m * m > 1e-20 * total * std::pow(g.dxi, g.dim)) {
      k_top = k;
      break;
    }
  }
  const double speed = alpha * std::pow(std::ldexp(1.0, k_top), alpha - 1.0);
  return 0.5 * g.half_width / speed;
}

Trajectory evolve(const DyadicShellSet& shells, double alpha, const SpectralField& u0,
                  double t_end, SystemKind kind, const EvolveOptions& opts) {
  if (!(t_end > 0.0)) fail_validation("evolve: t_end must be positive");
  if (opts.stepper.dt <= 0.0) fail_validation("evolve: dt must be positive");
  if (kind == SystemKind::transformed && opts.stepper.scheme != Scheme::rk4_interaction)
    fail_validation("evolve: the transformed system supports the interaction-picture RK4 scheme");
  const Grid& g = *u0.grid;
  const cplx coupling = opts.stepper.coupling;

  Trajectory traj;
  traj.grid = u0.grid;
  traj.alpha = alpha;
  traj.wrap_bound = wrap_bound_estimate(shells, u0, alpha);

  // Stability heuristic (reported, not enforced): nonlinear frequency scale
  // |coupling| * ||u0||_inf.
  traj.stability_product = opts.stepper.dt * std::abs(coupling) * lp_norm(u0, std::numeric_limits<double>::infinity());

  SpectralField state = u0;  // g^ at t=0 (profiles coincide with data at t=0)
  if (opts.stepper.dealias) truncate_band(state, dealias_band(g));
  SpectralField u_current = state;  // transformed kind: recovered g^ profile

  if (kind == SystemKind::transformed) {
    // f^(0) from w(0) = u(0) + i c B(u, conj u).
    SpectralField w0 = normal_form_forward(shells, alpha, u0, coupling, opts.bop);
    state = w0;
    if (opts.stepper.dealias) truncate_band(state, dealias_band(g));
  }

  const double dt = opts.stepper.dt;
  const int steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));

  auto recover_u_profile = [&](const SpectralField& f_profile, double s,
                               const SpectralField& guess) {
    SpectralField w = to_physical_frame(f_profile, alpha, s);
    InversionReport rep;
    SpectralField u = normal_form_invert(shells, alpha, w, opts.invert_tolerance, &rep, 25,
                                         coupling, opts.bop);
    (void)guess;
    return to_profile_frame(u, alpha, s);
  };

  auto derivative = [&](const SpectralField& y, double s) {
    if (kind == SystemKind::original) return rhs_original(y, alpha, s, coupling);
    const SpectralField gp = recover_u_profile(y, s, u_current);
    return rhs_transformed(shells, alpha, y, gp, s, coupling, opts.bop);
  };

  auto emit = [&](double t) {
    SpectralField secondary;
    const SpectralField* sec_ptr = nullptr;
    if (kind == SystemKind::transformed) {
      secondary = recover_u_profile(state, t, u_current);
      u_current = secondary;
      sec_ptr = &secondary;
    }
    // Diagnostics.
    const SpectralField& gp = kind == SystemKind::original ? state : secondary;
    const SpectralField u = to_physical_frame(gp, alpha, t);
    traj.diagnostics.times.push_back(t);
    auto push = [&](const char* key, double v) { traj.diagnostics.values[key].push_back(v); };
    const double scale = std::pow(1.0 + t, 1.0 + opts.params.delta);
    push("u_h10", sobolev_norm(u, 10.0));
    const double usup = lp_norm(u, std::numeric_limits<double>::infinity());
    push("u_sup", usup);
    push("u_sup_scaled", scale * usup);
    push("u_weighted", u_norm(shells, gp, opts.params));
    if (kind == SystemKind::transformed || opts.w_diagnostics) {
      SpectralField fp;  // w profile
      if (kind == SystemKind::transformed) {
        fp = state;
      } else {
        const SpectralField w = normal_form_forward(shells, alpha, u, coupling, opts.bop);
        fp = to_profile_frame(w, alpha, t);
      }
      const SpectralField w = to_physical_frame(fp, alpha, t);
      push("w_h10", sobolev_norm(w, 10.0));
      const double wsup = lp_norm(w, std::numeric_limits<double>::infinity());
      push("w_sup", wsup);
      push("w_sup_scaled", scale * wsup);
      push("w_weighted", w_norm(shells, fp, opts.params));
    }
    traj.times.push_back(t);
    if (opts.keep_fields) {
      traj.primary.push_back(state);
      if (sec_ptr) traj.secondary.push_back(*sec_ptr);
    }
    if (opts.on_output) opts.on_output(t, state, sec_ptr);
  };

  emit(0.0);
  double t = 0.0;
  for (int n = 0; n < steps; ++n) {
    const double h = std::min(dt, t_end - t);
    if (h <= 0.0) break;
    if (kind == SystemKind::original && opts.stepper.scheme == Scheme::split_strang) {
      // Strang: exact half linear flow, midpoint nonlinear step, half linear.
      SpectralField u = to_physical_frame(state, alpha, t);  // u^ at t
      propagate_linear_inplace(u, alpha, 0.5 * h);
      SpectralField k1 = pointwise_product(u, conjugate_field(u));
      SpectralField um = axpy({1.0, 0.0}, u, coupling * (0.5 * h), k1);
      SpectralField k2 = pointwise_product(um, conjugate_field(um));
      u = axpy({1.0, 0.0}, u, coupling * h, k2);
      propagate_linear_inplace(u, alpha, 0.5 * h);
      check_finite(u, t + h);
      state = to_profile_frame(u, alpha, t + h);
    } else {
      const SpectralField k1 = derivative(state, t);
      const SpectralField y2 = axpy({1.0, 0.0}, state, {0.5 * h, 0.0}, k1);
      const SpectralField k2 = derivative(y2, t + 0.5 * h);
      const SpectralField y3 = axpy({1.0, 0.0}, state, {0.5 * h, 0.0}, k2);
      const SpectralField k3 = derivative(y3, t + 0.5 * h);
      const SpectralField y4 = axpy({1.0, 0.0}, state, {h, 0.0}, k3);
      const SpectralField k4 = derivative(y4, t + h);
      for (std::size_t i = 0; i < state.coeffs.size(); ++i)
        state.coeffs[i] += (h / 6.0) * (k1.coeffs[i] + 2.0 * k2.coeffs[i] + 2.0 * k3.coeffs[i] +
                                        k4.coeffs[i]);
    }
    if (opts.stepper.dealias) truncate_band(state, dealias_band(g));
    check_finite(state, t + h);
    t += h;
    const bool last = n + 1 == steps || t >= t_end - 1e-12;
    if ((n + 1) % opts.output_every == 0 || last) {
      // Wrap guard: stop reporting once the fastest populated packet can cross
      // half the box.
      const double wb = wrap_bound_estimate(shells, state, alpha);
      if (t > wb) {
        traj.wrap_aborted = true;
        traj.wrap_bound = std::min(traj.wrap_bound, wb);
        break;
      }
      emit(t);
    }
  }
  return traj;
}

SpectralField shell_bump_data(const GridPtr& grid, int k0, double eps0, double lambda,
                              double rel_width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Random smooth phase theta(xi) = sum of a few plane-wave harmonics at the
  // shell scale.
  const double kc = std::ldexp(1.0, k0);
  struct Harmonic {
    Vec3 b;
    double a, c;
  };
  std::vector<Harmonic> hs;
  std::uniform_real_distribution<double> ua(0.0, 0.7), uc(0.0, kTwoPi), ub(0.3, 1.4), ang(-1.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    Vec3 d{ang(rng), grid->dim == 3 ? ang(rng) : 0.0, grid->dim == 3 ? ang(rng) : 0.0};
    const double dn = norm3(d);
    const double sc = ub(rng) / kc;
    hs.push_back({dn > 0 ? (sc / dn) * d : Vec3{sc, 0, 0}, ua(rng), uc(rng)});
  }
  SpectralField f(grid);
  const double width = rel_width * kc;
  const double amp = eps0 * std::pow(2.0, lambda * k0);
  const int n = grid->n;
  std::size_t idx = 0;
  auto fill = [&](const Vec3& xi) {
    const double r = norm3(xi);
    const double env = lp_phi(std::fabs(r - kc) / width);  // smooth bump, == 1 near the shell radius
    if (env == 0.0) {
      f.coeffs[idx] = 0.0;
      return;
    }
    double th = 0.0;
    for (const auto& h : hs) th += h.a * std::sin(dot(h.b, xi) + h.c);
    f.coeffs[idx] = amp * env * std::polar(1.0, th);
  };
  if (grid->dim == 1) {
    for (int m = 0; m < n; ++m, ++idx) fill({grid->xi_axis[m], 0.0, 0.0});
  } else {
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2, ++idx)
          fill({grid->xi_axis[i0], grid->xi_axis[i1], grid->xi_axis[i2]});
  }
  return f;
}

SpectralField gaussian_data(const GridPtr& grid, double eps0, double width, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ph(0.0, kTwoPi);
  const double ph0 = ph(rng);
  SpectralField f(grid);
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const double r = grid->xi_abs(i);
    f.coeffs[i] = eps0 * std::exp(-sq(r / width)) * std::polar(1.0, ph0);
  }
  truncate_band(f, dealias_band(*grid));
  return f;
}

double locate_smallness_threshold(const DyadicShellSet& shells, double alpha,
                                  const SpectralField& unit_data, const EvolveOptions& opts,
                                  double horizon, double growth_cap, int bisection_steps) {
  auto regular_at = [&](double amp) {
    SpectralField u0 = unit_data;
    for (auto& c : u0.coeffs) c *= amp;
    EvolveOptions o = opts;
    o.keep_fields = false;
    o.w_diagnostics = true;
    o.on_output = nullptr;
    try {
      const Trajectory tr = evolve(shells, alpha, u0, horizon, SystemKind::original, o);
      const auto& h10 = tr.diagnostics.values.at("u_h10");
      const auto& wsum = tr.diagnostics.values.at("w_weighted");
      if (h10.empty() || wsum.empty()) return false;
      for (double v : h10)
        if (!(v <= growth_cap * h10.front())) return false;
      for (double v : wsum)
        if (!(v <= growth_cap * std::max(wsum.front(), 1e-300))) return false;
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  double lo = 0.0, hi = 1.0;
  // Grow until failure (or accept a generous cap).
  for (int i = 0; i < 12 && regular_at(hi); ++i) {
    lo = hi;
    hi *= 2.0;
  }
  if (lo == 0.0) {
    // Shrink until regular.
    for (int i = 0; i < 20 && !regular_at(hi); ++i) hi *= 0.5;
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (regular_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace fqs
