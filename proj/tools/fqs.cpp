// Experiment runner CLI.  Links only the shared C API.
//
// Usage: fqs <kind> [--config PATH] [--out DIR] [--seed N] [--workers N]
//            [--snapshot-stride N]
// Kinds: simulate, decay-linear, decay-nonlinear, resonance-check,
//        normalform-check, dyadic-constants, scatter-forward, scatter-final,
//        norms-report.
// Exit codes: 0 success, 2 validation, 3 numerical failure, 4 I/O.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fqs.h"

int main(int argc, char** argv) {
  CLI::App app{"fqs - fractional quadratic Schrodinger toolkit"};
  app.require_subcommand(1);

  const char* kinds[] = {"simulate",         "decay-linear",   "decay-nonlinear",
                         "resonance-check",  "normalform-check", "dyadic-constants",
                         "scatter-forward",  "scatter-final",  "norms-report"};

  std::string config_path, out_dir = "fqs-out";
  std::uint64_t seed = 1;
  int workers = 1, snapshot_stride = 0;
  bool quiet = false;
  std::string chosen;
  for (const char* k : kinds) {
    CLI::App* sub = app.add_subcommand(k, std::string("run the ") + k + " experiment");
    sub->add_option("--config", config_path, "JSON config file (defaults applied per kind)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--workers", workers, "parallelism cap");
    sub->add_option("--snapshot-stride", snapshot_stride, "field snapshot stride (0 = none)");
    sub->add_flag("--quiet", quiet, "suppress the summary printout");
    sub->callback([&chosen, k] { chosen = k; });
  }

  CLI11_PARSE(app, argc, argv);

  nlohmann::json cfg = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      std::fprintf(stderr, "{\"error\":\"cannot open config '%s'\",\"code\":4}\n",
                   config_path.c_str());
      return 4;
    }
    try {
      is >> cfg;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "{\"error\":\"config parse: %s\",\"code\":2}\n", e.what());
      return 2;
    }
  }
  cfg["kind"] = chosen;

  char* summary = nullptr;
  const fqs_status st = fqs_run_experiment(cfg.dump().c_str(), out_dir.c_str(), seed, workers,
                                           snapshot_stride, &summary);
  if (st != FQS_OK) {
    nlohmann::json err{{"error", fqs_last_error()}, {"code", static_cast<int>(st)}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return static_cast<int>(st);
  }
  if (!quiet && summary) std::printf("%s\n", summary);
  fqs_string_free(summary);
  return 0;
}
