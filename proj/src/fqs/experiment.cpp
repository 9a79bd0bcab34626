#include "fqs/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "fqs/evolution.hpp"
#include "fqs/io.hpp"
#include "fqs/radial.hpp"
#include "fqs/scattering.hpp"

namespace fqs {

namespace {

using nlohmann::json;

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, i / (n - 1.0));
  return v;
}

json grid_defaults(int dim, int n, double half_width) {
  return json{{"dim", dim}, {"n", n}, {"half_width", half_width}};
}

GridPtr grid_from(const json& g) {
  return make_grid(g.at("dim").get<int>(), g.at("n").get<int>(), g.at("half_width").get<double>());
}

cplx coupling_from(const json& cfg) {
  return cplx{cfg.at("coupling_re").get<double>(), cfg.at("coupling_im").get<double>()};
}

SpectralField data_from(const json& cfg, const GridPtr& grid, std::uint64_t seed) {
  const json& d = cfg.at("data");
  const std::string family = d.at("family").get<std::string>();
  const double eps0 = d.at("eps0").get<double>();
  if (family == "shell_bump")
    return shell_bump_data(grid, d.at("k0").get<int>(), eps0, cfg.at("lambda").get<double>(),
                           d.at("rel_width").get<double>(), seed);
  if (family == "gaussian") return gaussian_data(grid, eps0, d.at("width").get<double>(), seed);
  fail_validation("unknown data family '" + family + "'");
}

void set_default(json& j, const char* key, const json& v) {
  if (!j.contains(key)) j[key] = v;
}

void scale_field(SpectralField& f, double s) {
  for (auto& c : f.coeffs) c *= s;
}

struct RunContext {
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
  int snapshot_stride = 0;
  std::vector<std::string> outputs;

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return out_dir + "/" + name;
  }
};

json fit_to_json(const DecayFit& f) {
  return json{{"exponent", f.exponent},
              {"intercept", f.intercept},
              {"residual", f.residual},
              {"points", f.points}};
}

json diagnostics_csv(const DiagnosticSeries& diag, RunContext& ctx, const std::string& name) {
  std::vector<std::string> cols{"t"};
  for (const auto& kv : diag.values) cols.push_back(kv.first);
  CsvWriter csv(cols);
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    std::vector<double> row{diag.times[i]};
    for (const auto& kv : diag.values) row.push_back(i < kv.second.size() ? kv.second[i] : 0.0);
    csv.row(row);
  }
  csv.save(ctx.path(name));
  return json{{"rows", diag.times.size()}};
}

// Largest rise of a series above its running minimum after the transient.
double monotone_excess(const std::vector<double>& t, const std::vector<double>& v,
                       double transient) {
  double runmin = 0.0;
  bool started = false;
  double worst = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < transient) continue;
    if (!started) {
      runmin = v[i];
      started = true;
      continue;
    }
    if (runmin > 0.0) worst = std::max(worst, v[i] / runmin);
    runmin = std::min(runmin, v[i]);
  }
  return worst;
}

// ---- simulate ----

json run_simulate(const json& cfg, RunContext& ctx) {
  const GridPtr grid = grid_from(cfg.at("grid"));
  const DyadicShellSet shells = make_shell_set(grid);
  const double alpha = cfg.at("alpha").get<double>();
  const NormParams params = NormParams::make(alpha, cfg.at("lambda").get<double>());
  SpectralField u0 = data_from(cfg, grid, ctx.seed);

  EvolveOptions eo;
  eo.stepper.dt = cfg.at("stepper").at("dt").get<double>();
  eo.stepper.dealias = cfg.at("stepper").at("dealias").get<bool>();
  eo.stepper.coupling = coupling_from(cfg);
  eo.stepper.scheme = cfg.at("stepper").at("scheme") == "split_strang" ? Scheme::split_strang
                                                                       : Scheme::rk4_interaction;
  eo.params = params;
  eo.output_every = cfg.at("output_every").get<int>();
  eo.keep_fields = false;
  eo.w_diagnostics = cfg.at("w_diagnostics").get<bool>();
  int snap_index = 0, out_index = 0;
  if (ctx.snapshot_stride > 0) {
    eo.on_output = [&](double t, const SpectralField& primary, const SpectralField*) {
      if (out_index++ % ctx.snapshot_stride == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "field_%05d.bin", snap_index++);
        save_snapshot(ctx.out_dir + "/" + name, primary, alpha);
        ctx.outputs.emplace_back(name);
        (void)t;
      }
    };
  }
  const SystemKind kind =
      cfg.at("system") == "transformed" ? SystemKind::transformed : SystemKind::original;
  const Trajectory traj = evolve(shells, alpha, u0, cfg.at("t_end").get<double>(), kind, eo);
  diagnostics_csv(traj.diagnostics, ctx, "diagnostics.csv");
  const BudgetReport budget = budget_check(traj.diagnostics, params, cfg.at("data").at("eps0"));
  json sup(json::object());
  for (const auto& kv : budget.sup_values) sup[kv.first] = kv.second;
  return json{{"wrap_bound", traj.wrap_bound},
              {"wrap_aborted", traj.wrap_aborted},
              {"stability_product", traj.stability_product},
              {"outputs", traj.diagnostics.times.size()},
              {"budget", {{"sup", sup}, {"implied_constant", budget.implied_constant}}}};
}

// ---- decay-linear ----

json run_decay_linear(const json& cfg, RunContext& ctx) {
  const auto alphas = cfg.at("alphas").get<std::vector<double>>();
  const auto shells_k = cfg.at("shells").get<std::vector<int>>();
  const double t_lo = cfg.at("t_lo").get<double>(), t_hi = cfg.at("t_hi").get<double>();
  const auto ts = logspace(t_lo, t_hi, cfg.at("t_points").get<int>());
  json fits = json::array();
  std::map<std::pair<double, int>, double> prefactor;  // median of sup * t^{3/2}
  for (double alpha : alphas) {
    for (int k : shells_k) {
      const RadialProfile prof = shell_profile(k);
      const auto rows = decay_scan(prof, alpha, ts);
      char name[96];
      std::snprintf(name, sizeof(name), "decay_a%.4g_k%d.csv", alpha, k);
      CsvWriter csv({"t", "sup_norm", "l4", "l6", "l2"});
      std::vector<double> tv, sup, l4, l6;
      std::vector<double> comp;
      for (const auto& r : rows) {
        csv.row({r.t, r.sup, r.l4, r.l6, r.l2});
        tv.push_back(r.t);
        sup.push_back(r.sup);
        l4.push_back(r.l4);
        l6.push_back(r.l6);
        comp.push_back(r.sup * std::pow(r.t, 1.5));
      }
      csv.save(ctx.path(name));
      std::sort(comp.begin(), comp.end());
      prefactor[{alpha, k}] = comp[comp.size() / 2];
      const DecayFit fsup = decay_fit(tv, sup, t_lo, t_hi);
      const DecayFit f4 = decay_fit(tv, l4, t_lo, t_hi);
      const DecayFit f6 = decay_fit(tv, l6, t_lo, t_hi);
      fits.push_back(json{{"alpha", alpha},
                          {"k", k},
                          {"sup", fit_to_json(fsup)},
                          {"l4", fit_to_json(f4)},
                          {"l6", fit_to_json(f6)},
                          {"sup_ok", std::fabs(fsup.exponent + 1.5) <= 0.1},
                          {"l4_ok", std::fabs(f4.exponent + 0.75) <= 0.1},
                          {"l6_ok", std::fabs(f6.exponent + 1.0) <= 0.1}});
    }
  }
  // Frequency-scaling prefactor ratios across adjacent shells.
  json ratios = json::array();
  for (double alpha : alphas) {
    for (std::size_t i = 0; i + 1 < shells_k.size(); ++i) {
      if (shells_k[i + 1] != shells_k[i] + 1) continue;
      const double measured =
          prefactor[{alpha, shells_k[i + 1]}] / prefactor[{alpha, shells_k[i]}];
      const double predicted = std::pow(2.0, 3.0 * (1.0 - alpha / 2.0));
      ratios.push_back(json{{"alpha", alpha},
                            {"k_low", shells_k[i]},
                            {"measured", measured},
                            {"predicted", predicted},
                            {"ok", std::fabs(measured / predicted - 1.0) <= 0.1}});
    }
  }
  json out{{"fits", fits}, {"prefactor_ratios", ratios}};
  write_text_file(ctx.path("fit.json"), out.dump(2) + "\n");
  return out;
}

// ---- decay-nonlinear ----

json run_decay_nonlinear(const json& cfg, RunContext& ctx) {
  const double alpha = cfg.at("alpha").get<double>();
  const NormParams params = NormParams::make(alpha, cfg.at("lambda").get<double>());

  auto run_for = [&](const json& gridspec, const std::string& tag) {
    const GridPtr grid = grid_from(gridspec);
    const DyadicShellSet shells = make_shell_set(grid);
    json unit_cfg = cfg;
    unit_cfg["data"]["eps0"] = 1.0;
    const SpectralField unit = data_from(unit_cfg, grid, ctx.seed);

    EvolveOptions eo;
    eo.stepper.dt = cfg.at("stepper").at("dt").get<double>();
    eo.stepper.coupling = coupling_from(cfg);
    eo.params = params;
    eo.output_every = cfg.at("output_every").get<int>();
    eo.keep_fields = false;

    double threshold = cfg.value("threshold", 0.0);
    if (threshold <= 0.0)
      threshold = locate_smallness_threshold(shells, alpha, unit, eo,
                                             cfg.at("threshold_horizon").get<double>());
    const double eps0 = cfg.contains("eps0") ? cfg.at("eps0").get<double>() : threshold / 4.0;

    SpectralField u0 = unit;
    scale_field(u0, eps0);
    const double wrap = wrap_bound_estimate(shells, u0, alpha);
    double t_end = cfg.at("t_end").get<double>();
    if (t_end <= 0.0) t_end = 0.95 * wrap;

    const Trajectory traj = evolve(shells, alpha, u0, t_end, SystemKind::original, eo);
    diagnostics_csv(traj.diagnostics, ctx, "diagnostics_" + tag + ".csv");

    const double transient = cfg.at("transient").get<double>();
    const auto& tv = traj.diagnostics.times;
    const DecayFit fit =
        decay_fit(tv, traj.diagnostics.values.at("u_sup"), transient, t_end);
    json mono(json::object());
    bool mono_ok = true;
    for (const char* key :
         {"w_h10", "w_sup_scaled", "w_weighted", "u_h10", "u_sup_scaled", "u_weighted"}) {
      const double ex = monotone_excess(tv, traj.diagnostics.values.at(key), transient);
      mono[key] = ex;
      mono_ok = mono_ok && ex <= cfg.at("monotone_tol").get<double>();
    }
    return json{{"tag", tag},
                {"threshold", threshold},
                {"eps0", eps0},
                {"wrap_bound", wrap},
                {"t_end", t_end},
                {"sup_fit", fit_to_json(fit)},
                {"sup_exponent_ok", fit.exponent <= cfg.at("exponent_cap").get<double>()},
                {"monotone_excess", mono},
                {"monotone_ok", mono_ok},
                {"delta", params.delta}};
  };

  json out;
  out["main"] = run_for(cfg.at("grid"), "main");
  if (cfg.contains("half_width_sweep")) {
    json sweep = json::array();
    for (double L : cfg.at("half_width_sweep").get<std::vector<double>>()) {
      json gs = cfg.at("grid");
      gs["half_width"] = L;
      char tag[32];
      std::snprintf(tag, sizeof(tag), "L%.6g", L);
      sweep.push_back(run_for(gs, tag));
    }
    out["half_width_sweep"] = sweep;
  }
  write_text_file(ctx.path("fit.json"), out.dump(2) + "\n");
  return out;
}

// ---- resonance-check ----

json region_report_json(const SymbolClassReport& r) {
  json upper_xi(json::object()), upper_eta(json::object());
  for (const auto& kv : r.upper_xi)
    upper_xi[std::to_string(kv.first.first) + "," + std::to_string(kv.first.second)] = kv.second;
  for (const auto& kv : r.upper_eta)
    upper_eta[std::to_string(kv.first.first) + "," + std::to_string(kv.first.second)] = kv.second;
  return json{{"k", r.region.k},
              {"k1", r.region.k1},
              {"k2", r.region.k2},
              {"kind", r.region.kind == RegionKind::HH ? "hh" : "hl"},
              {"samples", r.samples_used},
              {"tau_xi", r.tau_xi},
              {"tau_eta", r.tau_eta},
              {"ell_xi_min", r.ell_xi_min},
              {"ell_xi_max", r.ell_xi_max},
              {"ell_eta_min", r.ell_eta_min},
              {"ell_eta_max", r.ell_eta_max},
              {"dir_cos_min", r.dir_cos_min},
              {"dir_l_min", r.dir_l_min},
              {"upper_xi", upper_xi},
              {"upper_eta", upper_eta},
              {"pass", r.pass}};
}

json run_resonance_check(const json& cfg, RunContext& ctx) {
  std::mt19937_64 rng(ctx.seed);
  const auto alphas = cfg.at("alphas").get<std::vector<double>>();
  const auto offsets = cfg.at("offsets").get<std::vector<int>>();
  const int samples = cfg.at("samples").get<int>();
  const int max_order = cfg.at("max_order").get<int>();
  json regions = json::array();
  json criteria = json::array();
  for (double alpha : alphas) {
    const PhaseContext pc{alpha};
    for (const char* kind_name : {"hh", "hl"}) {
      const std::string kinds = kind_name;
      const RegionKind kind = kinds == "hh" ? RegionKind::HH : RegionKind::HL;
      double exi_lo = 1e300, exi_hi = 0.0, eeta_lo = 1e300, eeta_hi = 0.0;
      int used = 0;
      for (int d0 : offsets)
        for (int d1 : offsets)
          for (int d2 : offsets) {
            RegionSpec spec;
            spec.kind = kind;
            spec.sample_count = samples;
            if (kind == RegionKind::HH) {
              spec.k = d0;
              spec.k1 = d1;
              spec.k2 = d2;
              if (std::abs(spec.k1 - spec.k2) > 10 || spec.k1 < spec.k - 10) continue;
            } else {
              spec.k = d0;
              spec.k1 = d1;
              spec.k2 = d2 - 10;
              if (spec.k1 - spec.k2 < 10 || std::abs(spec.k1 - spec.k) > 10) continue;
            }
            try {
              const SymbolClassReport rep = verify_symbol_class(pc, spec, max_order, rng);
              regions.push_back(region_report_json(rep));
              regions.back()["alpha"] = alpha;
              exi_lo = std::min(exi_lo, rep.ell_xi_min);
              exi_hi = std::max(exi_hi, rep.ell_xi_min);
              eeta_lo = std::min(eeta_lo, rep.ell_eta_min);
              eeta_hi = std::max(eeta_hi, rep.ell_eta_min);
              ++used;
            } catch (const Error&) {
              // geometrically empty triple; skipped
            }
          }
      criteria.push_back(json{{"alpha", alpha},
                              {"kind", kinds},
                              {"regions", used},
                              {"ell_xi_spread", exi_hi / exi_lo},
                              {"ell_eta_spread", eeta_hi / eeta_lo},
                              {"ell_xi_min", exi_lo},
                              {"ell_eta_min", eeta_lo},
                              {"pass", exi_lo > 0.0 && eeta_lo > 0.0 &&
                                           exi_hi / exi_lo <= 4.0 && eeta_hi / eeta_lo <= 4.0}});
    }
  }

  // Degenerate-dispersion trend: HH ellipticity of grad_xi phi as alpha -> 2
  // across growing k1 - k.
  json trend = json::array();
  for (double alpha : {1.5, 1.75, 1.9, 1.975}) {
    const PhaseContext pc{alpha};
    for (int gap : {0, 4, 8}) {
      RegionSpec spec;
      spec.kind = RegionKind::HH;
      spec.k = -gap;
      spec.k1 = 0;
      spec.k2 = 0;
      spec.sample_count = samples;
      const SymbolClassReport rep = verify_symbol_class(pc, spec, 1, rng);
      trend.push_back(json{{"alpha", alpha},
                           {"k1_minus_k", gap},
                           {"ell_xi_min", rep.ell_xi_min},
                           {"ell_eta_min", rep.ell_eta_min}});
    }
  }

  // Lemma 5.1 residuals at random admissible points.
  const int l51_samples = cfg.at("lemma51_samples").get<int>();
  const int l51_orders = cfg.at("lemma51_orders").get<int>();
  double worst51 = 0.0, worst51g = 0.0;
  {
    std::uniform_real_distribution<double> rad(0.25, 4.0), ratio(0.0, 0.25), ang(-1.0, 1.0);
    const PhaseContext pc{alphas.front()};
    for (int i = 0; i < l51_samples; ++i) {
      Vec3 de{ang(rng), ang(rng), ang(rng)};
      Vec3 dd{ang(rng), ang(rng), ang(rng)};
      const double ne = norm3(de), nd = norm3(dd);
      if (ne == 0.0 || nd == 0.0) continue;
      const Vec3 eta = (rad(rng) / ne) * de;
      const Vec3 xi = eta + (ratio(rng) * norm3(eta) / nd) * dd;
      const int n_terms = 1 + (i % l51_orders);
      worst51 = std::max(worst51, lemma51_residual(pc, xi, eta, n_terms));
      worst51g = std::max(worst51g, lemma51_gradient_residual(pc, xi, eta, n_terms));
    }
  }

  // Non-resonance on supp a_LH: min |phi| / |xi|^alpha with |xi-eta| <= 2^-10 |eta|.
  double lh_c = 1e300;
  {
    std::uniform_real_distribution<double> rad(0.25, 4.0), ang(-1.0, 1.0);
    const PhaseContext pc{alphas.front()};
    for (int i = 0; i < 4000; ++i) {
      Vec3 de{ang(rng), ang(rng), ang(rng)};
      Vec3 dd{ang(rng), ang(rng), ang(rng)};
      const double ne = norm3(de), nd = norm3(dd);
      if (ne == 0.0 || nd == 0.0) continue;
      const Vec3 eta = (rad(rng) / ne) * de;
      const Vec3 xi = eta + (std::ldexp(1.0, -10) * norm3(eta) / nd) * dd;
      lh_c = std::min(lh_c, std::fabs(pc.phase(xi, eta)) / std::pow(norm3(xi), pc.alpha));
    }
  }

  json out{{"regions", regions},
           {"criteria", criteria},
           {"alpha2_trend", trend},
           {"lemma51_max_residual", worst51},
           {"lemma51_gradient_max_residual", worst51g},
           {"lh_nonresonance_min", lh_c}};
  write_text_file(ctx.path("resonance.json"), out.dump(2) + "\n");
  return out;
}

// ---- normalform-check ----

json run_normalform_check(const json& cfg, RunContext& ctx) {
  const double alpha = cfg.at("alpha").get<double>();
  const double tol = cfg.at("tolerance").get<double>();
  const GridPtr g1 = grid_from(cfg.at("grid1"));
  const DyadicShellSet sh1 = make_shell_set(g1);
  const std::string cache = ctx.out_dir + "/symcache";

  json expansions = json::array();
  auto report_symbol = [&](const std::string& name, std::vector<SymbolPiece> pieces) {
    const BilinearSymbol sym = expand_symbol_cached(name, std::move(pieces), sh1, tol, 4096, cache);
    json blocks = json::array();
    for (const auto& b : sym.blocks)
      blocks.push_back(json{{"piece", b.piece}, {"j", b.j}, {"k", b.k}, {"terms", b.terms},
                            {"tail", b.tail}});
    expansions.push_back(json{{"symbol", name},
                              {"total_terms", sym.total_terms},
                              {"truncation_bound", sym.truncation_bound},
                              {"blocks", blocks}});
  };
  report_symbol("one", pieces_one());
  report_symbol("a_hh", pieces_a_hh(sh1));
  report_symbol("a_hl", pieces_a_hl(sh1));
  report_symbol("a_lh", pieces_a_lh(sh1));
  report_symbol("b_kernel", pieces_b_kernel(sh1, alpha));

  // Roundtrip and contraction scan on the 3D grid.
  const GridPtr g3 = grid_from(cfg.at("grid3"));
  const DyadicShellSet sh3 = make_shell_set(g3);
  json scan = json::array();
  const double base_amp = cfg.at("scan_amplitude").get<double>();
  double roundtrip_rel = 0.0;
  for (int s = 0; s < 3; ++s) {
    const double amp = base_amp / std::pow(2.0, s);
    json dcfg = cfg;
    dcfg["data"]["eps0"] = amp;
    const SpectralField u = data_from(dcfg, g3, ctx.seed);
    const SpectralField w = normal_form_forward(sh3, alpha, u);
    InversionReport rep;
    const SpectralField back = normal_form_invert(sh3, alpha, w, 1e-12, &rep);
    const double rel = sobolev_norm(axpy({1, 0}, back, {-1, 0}, u), 10.0) /
                       std::max(sobolev_norm(u, 10.0), 1e-300);
    if (s == 0) roundtrip_rel = rel;
    const double factor =
        rep.residuals.size() >= 2 ? rep.residuals[1] / rep.residuals[0] : 0.0;
    scan.push_back(json{{"amplitude", amp},
                        {"roundtrip_rel", rel},
                        {"iterations", rep.iterations},
                        {"contraction_factor", factor}});
  }
  json out{{"expansions", expansions}, {"roundtrip_rel", roundtrip_rel},
           {"amplitude_scan", scan}};
  write_text_file(ctx.path("normalform.json"), out.dump(2) + "\n");
  return out;
}

// ---- dyadic-constants ----

json run_dyadic_constants(const json& cfg, RunContext& ctx) {
  const auto alphas = cfg.at("alphas").get<std::vector<double>>();
  const auto lambdas = cfg.at("lambdas").get<std::vector<double>>();
  const auto ts = logspace(cfg.at("t_lo").get<double>(), cfg.at("t_hi").get<double>(),
                           cfg.at("t_points").get<int>());
  CsvWriter csv({"alpha", "lambda", "t", "c1_envelope", "c2"});
  json fits = json::array();
  for (double alpha : alphas) {
    for (double lambda : lambdas) {
      validate_lambda(alpha, lambda);
      const int k_lo = -static_cast<int>(
                           std::ceil(std::log2(cfg.at("t_hi").get<double>()) / (alpha - 1.0))) -
                       12;
      std::vector<double> c1s, c2s;
      for (double t : ts) {
        const double c1 = dyadic_c1_envelope(alpha, lambda, t, k_lo, 6);
        const double c2 = dyadic_constants(alpha, lambda, t, 0).second;
        csv.row({alpha, lambda, t, c1, c2});
        c1s.push_back(c1);
        c2s.push_back(c2);
      }
      const DecayFit f1 = decay_fit(ts, c1s, ts.front(), ts.back());
      const DecayFit f2 = decay_fit(ts, c2s, ts.front(), ts.back());
      const double eps = decay_epsilon(alpha, lambda);
      const double del = decay_delta(alpha, lambda);
      const auto small = dyadic_constants(alpha, lambda, 1e-3, 0);
      fits.push_back(json{{"alpha", alpha},
                          {"lambda", lambda},
                          {"epsilon", eps},
                          {"delta", del},
                          {"c1_fit", fit_to_json(f1)},
                          {"c2_fit", fit_to_json(f2)},
                          {"c1_ok", std::fabs(f1.exponent + 1.0 + eps) <= 0.05},
                          {"c2_ok", std::fabs(f2.exponent + 1.0 + del) <= 0.05},
                          {"c1_small_t", small.first},
                          {"c2_small_t", small.second}});
    }
  }
  csv.save(ctx.path("dyadic.csv"));
  json out{{"fits", fits}};
  write_text_file(ctx.path("dyadic.json"), out.dump(2) + "\n");
  return out;
}

// ---- scatter-forward ----

json run_scatter_forward(const json& cfg, RunContext& ctx) {
  const GridPtr grid = grid_from(cfg.at("grid"));
  const DyadicShellSet shells = make_shell_set(grid);
  const double alpha = cfg.at("alpha").get<double>();
  SpectralField u0 = data_from(cfg, grid, ctx.seed);

  EvolveOptions eo;
  eo.stepper.dt = cfg.at("stepper").at("dt").get<double>();
  eo.stepper.coupling = coupling_from(cfg);
  eo.params = NormParams::make(alpha, cfg.at("lambda").get<double>());
  eo.output_every = cfg.at("output_every").get<int>();
  eo.keep_fields = true;
  eo.w_diagnostics = false;
  double t_end = cfg.at("t_end").get<double>();
  if (t_end <= 0.0) t_end = 0.9 * wrap_bound_estimate(shells, u0, alpha);
  const Trajectory traj = evolve(shells, alpha, u0, t_end, SystemKind::original, eo);

  const auto diffs = forward_profile_cauchy(traj);
  CsvWriter csv({"t", "profile_diff_h10"});
  std::vector<double> tv, dv;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    csv.row({traj.times[i + 1], diffs[i]});
    if (diffs[i] > 0.0) {
      tv.push_back(traj.times[i + 1]);
      dv.push_back(diffs[i]);
    }
  }
  csv.save(ctx.path("cauchy.csv"));
  json out{{"t_end", t_end}, {"outputs", traj.times.size()}};
  if (tv.size() >= 10) {
    const DecayFit fit = decay_fit(tv, dv, cfg.at("transient").get<double>(), t_end);
    out["diff_fit"] = fit_to_json(fit);
    out["delta_prime"] = -fit.exponent;
  }
  // Dyadic block sums over [T, 2T].
  json blocks = json::array();
  for (double T = cfg.at("transient").get<double>(); 2.0 * T <= t_end; T *= 2.0) {
    double s = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
      if (traj.times[i + 1] > T && traj.times[i + 1] <= 2.0 * T) s += diffs[i];
    blocks.push_back(json{{"T", T}, {"sum", s}});
  }
  out["dyadic_blocks"] = blocks;
  write_text_file(ctx.path("scatter_forward.json"), out.dump(2) + "\n");
  return out;
}

// ---- scatter-final ----

json run_scatter_final(const json& cfg, RunContext& ctx) {
  const GridPtr grid = grid_from(cfg.at("grid"));
  const DyadicShellSet shells = make_shell_set(grid);
  const double alpha = cfg.at("alpha").get<double>();
  const NormParams params = NormParams::make(alpha, cfg.at("lambda").get<double>());
  SpectralField f_inf = data_from(cfg, grid, ctx.seed);

  // Smallness check on the final data.
  const double fn = sobolev_norm(f_inf, 10.0) + w_norm(shells, f_inf, params);
  FinalDataOptions fo;
  fo.coupling = coupling_from(cfg);
  fo.mesh_dt = cfg.at("mesh_dt").get<double>();
  fo.tolerance = cfg.at("tolerance").get<double>();
  double t_max = cfg.at("t_max").get<double>();
  if (t_max <= 0.0) t_max = 0.8 * wrap_bound_estimate(shells, f_inf, alpha);

  const FinalDataResult res = final_data_iterate(shells, alpha, f_inf, t_max, fo);
  save_snapshot(ctx.path("converged_profile_t0.bin"), res.u_profiles.at(grid, 0), alpha);

  EvolveOptions eo;
  eo.stepper.dt = cfg.at("stepper").at("dt").get<double>();
  eo.stepper.coupling = fo.coupling;
  eo.params = params;
  eo.output_every = 1000000;  // endpoints only
  const double rt_full = wave_operator_roundtrip(shells, alpha, f_inf, t_max, fo, eo);
  const double rt_short =
      wave_operator_roundtrip(shells, alpha, f_inf, 0.6 * t_max, fo, eo);

  double max_factor = 0.0;
  for (double r : res.report.contraction_factors) max_factor = std::max(max_factor, r);
  json out{{"final_norm", fn},
           {"t_max", t_max},
           {"iterations", res.report.iterations},
           {"converged", res.report.converged},
           {"diff_norms", res.report.diff_norms},
           {"contraction_factors", res.report.contraction_factors},
           {"max_contraction_factor", max_factor},
           {"quadrature_richardson", res.report.quadrature_richardson},
           {"tail_defect_estimate", res.report.tail_defect_estimate},
           {"roundtrip_defect", rt_full},
           {"roundtrip_defect_short", rt_short},
           {"roundtrip_decreasing", rt_full < rt_short}};
  write_text_file(ctx.path("scatter_final.json"), out.dump(2) + "\n");
  return out;
}

// ---- norms-report ----

json run_norms_report(const json& cfg, RunContext& ctx) {
  const double alpha = cfg.at("alpha").get<double>();
  const NormParams params = NormParams::make(alpha, cfg.at("lambda").get<double>());
  SpectralField f;
  if (cfg.contains("snapshot")) {
    f = load_snapshot(cfg.at("snapshot").get<std::string>()).field;
  } else {
    f = data_from(cfg, grid_from(cfg.at("grid")), ctx.seed);
  }
  const DyadicShellSet shells = make_shell_set(f.grid);
  const WeightedNormReport w = w_norm_report(shells, f, params);
  const WeightedNormReport u = u_norm_report(shells, f, params);
  auto shells_json = [](const WeightedNormReport& r) {
    json a = json::array();
    for (const auto& c : r.shells)
      a.push_back(json{{"k", c.k}, {"l2_term", c.l2_term}, {"d1_term", c.d1_term},
                       {"d2_term", c.d2_term}, {"total", c.total}});
    return a;
  };
  std::mt19937_64 rng(ctx.seed);
  const GridPtr scan_grid = grid_from(cfg.at("scan_grid"));
  const InterpolationScan scan = interpolation_scan(scan_grid, cfg.at("scan_fields").get<int>(), rng);
  json out{{"w_norm", w.value},
           {"u_norm", u.value},
           {"h10", sobolev_norm(f, 10.0)},
           {"w_shells", shells_json(w)},
           {"u_shells", shells_json(u)},
           {"low_lump_flagged", w.low_lump_flagged},
           {"low_lump_l2", w.low_lump_l2},
           {"interpolation", {{"max_c_l1", scan.max_c_l1},
                              {"max_c_l43", scan.max_c_l43},
                              {"fields", scan.fields}}}};
  write_text_file(ctx.path("norms.json"), out.dump(2) + "\n");
  return out;
}

}  // namespace

json effective_config(const json& config) {
  json cfg = config;
  if (!cfg.contains("kind")) fail_validation("config: missing 'kind'");
  const std::string kind = cfg.at("kind").get<std::string>();
  set_default(cfg, "alpha", 1.5);
  set_default(cfg, "lambda", 0.4);
  set_default(cfg, "coupling_re", 1.0);
  set_default(cfg, "coupling_im", 0.0);

  auto data_defaults = [&](int k0, double eps0) {
    json d = cfg.value("data", json::object());
    set_default(d, "family", "shell_bump");
    set_default(d, "k0", k0);
    set_default(d, "eps0", eps0);
    set_default(d, "rel_width", 0.25);
    set_default(d, "width", 0.5);
    cfg["data"] = d;
  };
  auto stepper_defaults = [&](double dt) {
    json s = cfg.value("stepper", json::object());
    set_default(s, "scheme", "rk4");
    set_default(s, "dt", dt);
    set_default(s, "dealias", true);
    cfg["stepper"] = s;
  };

  if (kind == "simulate") {
    set_default(cfg, "grid", grid_defaults(3, 48, 48.0));
    data_defaults(-2, 0.01);
    stepper_defaults(0.02);
    set_default(cfg, "t_end", 5.0);
    set_default(cfg, "output_every", 10);
    set_default(cfg, "system", "original");
    set_default(cfg, "w_diagnostics", true);
  } else if (kind == "decay-linear") {
    set_default(cfg, "alphas", json::array({1.25, 1.5, 1.75}));
    set_default(cfg, "shells", json::array({-1, 0, 1}));
    set_default(cfg, "t_lo", 10.0);
    set_default(cfg, "t_hi", 1000.0);
    set_default(cfg, "t_points", 24);
  } else if (kind == "decay-nonlinear") {
    set_default(cfg, "grid", grid_defaults(3, 96, 48.0));
    data_defaults(-2, 0.0);  // eps0 from threshold/4 unless given
    if (cfg.at("data").at("eps0").get<double>() <= 0.0) cfg.at("data").erase("eps0");
    if (cfg.at("data").contains("eps0") && cfg.at("data").at("eps0").get<double>() > 0.0)
      cfg["eps0"] = cfg.at("data").at("eps0");
    cfg["data"]["eps0"] = 1.0;
    stepper_defaults(0.05);
    set_default(cfg, "t_end", 0.0);  // 0 => 0.95 * wrap bound
    set_default(cfg, "output_every", 10);
    set_default(cfg, "threshold", 0.0);
    set_default(cfg, "threshold_horizon", 3.0);
    set_default(cfg, "transient", 2.0);
    set_default(cfg, "monotone_tol", 1.05);
    set_default(cfg, "exponent_cap", -1.0);
  } else if (kind == "resonance-check") {
    set_default(cfg, "alphas", json::array({1.25, 1.5, 1.75}));
    set_default(cfg, "offsets", json::array({-10, -5, 0, 5, 10}));
    set_default(cfg, "samples", 4000);
    set_default(cfg, "max_order", 2);
    set_default(cfg, "lemma51_samples", 10000);
    set_default(cfg, "lemma51_orders", 8);
  } else if (kind == "normalform-check") {
    set_default(cfg, "grid1", grid_defaults(1, 32, kPi));
    set_default(cfg, "grid3", grid_defaults(3, 16, 16.0));
    set_default(cfg, "tolerance", 1e-8);
    set_default(cfg, "scan_amplitude", 0.02);
    data_defaults(-2, 0.02);
  } else if (kind == "dyadic-constants") {
    set_default(cfg, "alphas", json::array({1.25, 1.5, 1.75}));
    set_default(cfg, "lambdas", json::array({0.38, 0.42, 0.46}));
    set_default(cfg, "t_lo", 1.0);
    set_default(cfg, "t_hi", 1e4);
    set_default(cfg, "t_points", 60);
  } else if (kind == "scatter-forward") {
    set_default(cfg, "grid", grid_defaults(3, 48, 48.0));
    data_defaults(-2, 0.01);
    stepper_defaults(0.05);
    set_default(cfg, "t_end", 0.0);
    set_default(cfg, "output_every", 10);
    set_default(cfg, "transient", 2.0);
  } else if (kind == "scatter-final") {
    set_default(cfg, "grid", grid_defaults(3, 48, 48.0));
    data_defaults(-2, 0.01);
    stepper_defaults(0.05);
    set_default(cfg, "t_max", 0.0);
    set_default(cfg, "mesh_dt", 0.25);
    set_default(cfg, "tolerance", 1e-8);
  } else if (kind == "norms-report") {
    set_default(cfg, "grid", grid_defaults(3, 24, 24.0));
    data_defaults(-1, 0.1);
    set_default(cfg, "scan_grid", grid_defaults(3, 24, 12.0));
    set_default(cfg, "scan_fields", 200);
  } else {
    fail_validation("unknown experiment kind '" + kind + "'");
  }

  // Admissibility before any computation.
  const double alpha = cfg.at("alpha").get<double>();
  if (kind == "decay-linear") {
    for (double a : cfg.at("alphas").get<std::vector<double>>())
      if (!(a > 1.0 && a < 2.0)) fail_validation("alpha must lie in (1,2)");
  } else if (kind == "dyadic-constants" || kind == "resonance-check") {
    for (double a : cfg.at("alphas").get<std::vector<double>>())
      if (!(a > 1.0 && a < 2.0)) fail_validation("alpha must lie in (1,2)");
  } else {
    validate_lambda(alpha, cfg.at("lambda").get<double>());
  }
  if (cfg.contains("grid")) grid_from(cfg.at("grid"));
  return cfg;
}

json run_experiment(const json& config, const std::string& out_dir, std::uint64_t seed,
                    int workers, int snapshot_stride) {
  if (workers < 1) fail_validation("workers must be >= 1");
  const json cfg = effective_config(config);
  std::filesystem::create_directories(out_dir);
  RunContext ctx;
  ctx.out_dir = out_dir;
  ctx.seed = seed;
  ctx.workers = workers;
  ctx.snapshot_stride = snapshot_stride;

  const auto t0 = std::chrono::steady_clock::now();
  const std::string kind = cfg.at("kind").get<std::string>();
  json summary;
  if (kind == "simulate") summary = run_simulate(cfg, ctx);
  else if (kind == "decay-linear") summary = run_decay_linear(cfg, ctx);
  else if (kind == "decay-nonlinear") summary = run_decay_nonlinear(cfg, ctx);
  else if (kind == "resonance-check") summary = run_resonance_check(cfg, ctx);
  else if (kind == "normalform-check") summary = run_normalform_check(cfg, ctx);
  else if (kind == "dyadic-constants") summary = run_dyadic_constants(cfg, ctx);
  else if (kind == "scatter-forward") summary = run_scatter_forward(cfg, ctx);
  else if (kind == "scatter-final") summary = run_scatter_final(cfg, ctx);
  else if (kind == "norms-report") summary = run_norms_report(cfg, ctx);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest{{"config", cfg},
                {"seed", seed},
                {"workers", workers},
                {"snapshot_stride", snapshot_stride},
                {"version", version_string()},
                {"outputs", ctx.outputs},
                {"summary", summary},
                {"wall_seconds", wall}};
  write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace fqs
