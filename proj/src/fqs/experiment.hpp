#ifndef FQS_EXPERIMENT_HPP
#define FQS_EXPERIMENT_HPP

#include <string>

#include <json.hpp>

namespace fqs {

inline const char* version_string() { return "0.1.0"; }

// Fills defaults for the given experiment kind and validates parameter
// admissibility (alpha in (1,2), lambda interval, grid constraints) before any
// computation.  Returns the effective config echoed into the manifest.
nlohmann::json effective_config(const nlohmann::json& config);

// Runs one experiment; writes CSV/JSON artifacts plus manifest.json under
// out_dir and returns the summary object.  Deterministic given (config, seed).
nlohmann::json run_experiment(const nlohmann::json& config, const std::string& out_dir,
                              std::uint64_t seed, int workers, int snapshot_stride);

}  // namespace fqs

#endif
