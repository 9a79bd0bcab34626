#include "fqs.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "fqs/experiment.hpp"
#include "fqs/io.hpp"
#include "fqs/norms.hpp"

namespace {

thread_local std::string g_last_error;

fqs_status guard(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return FQS_OK;
  } catch (const fqs::Error& e) {
    g_last_error = e.what();
    return static_cast<fqs_status>(static_cast<int>(e.kind()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FQS_ERR_NUMERICAL;
  }
}

// FFT index <-> ascending order mapping for the coefficient accessors.
std::size_t sorted_index(const fqs::Grid& g, std::size_t fft_flat) {
  const int n = g.n;
  auto conv = [n](int m) { return m < n / 2 ? m + n / 2 : m - n / 2; };
  if (g.dim == 1) return static_cast<std::size_t>(conv(static_cast<int>(fft_flat)));
  const std::size_t nn = static_cast<std::size_t>(n);
  const int i0 = static_cast<int>(fft_flat / (nn * nn));
  const int i1 = static_cast<int>((fft_flat / nn) % nn);
  const int i2 = static_cast<int>(fft_flat % nn);
  return (static_cast<std::size_t>(conv(i0)) * nn + conv(i1)) * nn + conv(i2);
}

}  // namespace

struct fqs_grid {
  fqs::GridPtr grid;
};

struct fqs_field {
  fqs::SpectralField field;
};

extern "C" {

const char* fqs_version(void) { return fqs::version_string(); }

const char* fqs_last_error(void) { return g_last_error.c_str(); }

fqs_status fqs_grid_create(int dim, int n, double half_width, fqs_grid** out) {
  if (!out) return FQS_ERR_VALIDATION;
  return guard([&] { *out = new fqs_grid{fqs::make_grid(dim, n, half_width)}; });
}

void fqs_grid_destroy(fqs_grid* g) { delete g; }

fqs_status fqs_field_create(const fqs_grid* g, fqs_field** out) {
  if (!g || !out) return FQS_ERR_VALIDATION;
  return guard([&] { *out = new fqs_field{fqs::SpectralField(g->grid)}; });
}

void fqs_field_destroy(fqs_field* f) { delete f; }

fqs_status fqs_field_set_coeffs(fqs_field* f, const double* interleaved, size_t count) {
  if (!f || !interleaved) return FQS_ERR_VALIDATION;
  return guard([&] {
    if (count != 2 * f->field.size()) fqs::fail_validation("coefficient count mismatch");
    const fqs::Grid& g = *f->field.grid;
    for (std::size_t i = 0; i < f->field.size(); ++i) {
      const std::size_t s = sorted_index(g, i);
      f->field.coeffs[i] = fqs::cplx{interleaved[2 * s], interleaved[2 * s + 1]};
    }
  });
}

fqs_status fqs_field_get_coeffs(const fqs_field* f, double* interleaved, size_t count) {
  if (!f || !interleaved) return FQS_ERR_VALIDATION;
  return guard([&] {
    if (count != 2 * f->field.size()) fqs::fail_validation("coefficient count mismatch");
    const fqs::Grid& g = *f->field.grid;
    for (std::size_t i = 0; i < f->field.size(); ++i) {
      const std::size_t s = sorted_index(g, i);
      interleaved[2 * s] = f->field.coeffs[i].real();
      interleaved[2 * s + 1] = f->field.coeffs[i].imag();
    }
  });
}

fqs_status fqs_field_save(const fqs_field* f, const char* path, double alpha) {
  if (!f || !path) return FQS_ERR_VALIDATION;
  return guard([&] { fqs::save_snapshot(path, f->field, alpha); });
}

fqs_status fqs_field_load(const char* path, fqs_field** out, double* alpha_out) {
  if (!path || !out) return FQS_ERR_VALIDATION;
  return guard([&] {
    fqs::Snapshot snap = fqs::load_snapshot(path);
    if (alpha_out) *alpha_out = snap.alpha;
    *out = new fqs_field{std::move(snap.field)};
  });
}

fqs_status fqs_field_propagate(fqs_field* f, double alpha, double t) {
  if (!f) return FQS_ERR_VALIDATION;
  return guard([&] { fqs::propagate_linear_inplace(f->field, alpha, t); });
}

fqs_status fqs_field_norm(const fqs_field* f, const char* kind, double alpha, double lambda,
                          double* out) {
  if (!f || !kind || !out) return FQS_ERR_VALIDATION;
  return guard([&] {
    const std::string k = kind;
    if (k == "l2") {
      *out = fqs::l2_norm(f->field);
    } else if (k == "sup") {
      *out = fqs::lp_norm(f->field, std::numeric_limits<double>::infinity());
    } else if (k == "h10") {
      *out = fqs::sobolev_norm(f->field, 10.0);
    } else if (k == "w" || k == "u") {
      const fqs::DyadicShellSet shells = fqs::make_shell_set(f->field.grid);
      const fqs::NormParams p = fqs::NormParams::make(alpha, lambda);
      *out = k == "w" ? fqs::w_norm(shells, f->field, p) : fqs::u_norm(shells, f->field, p);
    } else {
      fqs::fail_validation("unknown norm kind '" + k + "'");
    }
  });
}

fqs_status fqs_run_experiment(const char* config_json, const char* out_dir, uint64_t seed,
                              int workers, int snapshot_stride, char** summary_json) {
  if (!config_json || !out_dir) return FQS_ERR_VALIDATION;
  return guard([&] {
    nlohmann::json cfg;
    try {
      cfg = nlohmann::json::parse(config_json);
    } catch (const std::exception& e) {
      fqs::fail_validation(std::string("config JSON parse error: ") + e.what());
    }
    const nlohmann::json summary =
        fqs::run_experiment(cfg, out_dir, seed, workers, snapshot_stride);
    if (summary_json) {
      const std::string s = summary.dump(2);
      *summary_json = static_cast<char*>(std::malloc(s.size() + 1));
      std::memcpy(*summary_json, s.c_str(), s.size() + 1);
    }
  });
}

void fqs_string_free(char* s) { std::free(s); }

}  // extern "C"
