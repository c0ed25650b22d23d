// cli.hpp — run configuration, task dispatch and artifact writing
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "photoion/common.hpp"

namespace photoion::cli {

inline constexpr const char* kSchema = "photoion-config-v1";
inline constexpr const char* kVersion = "0.1.0";

// Resolved configuration: every default expanded, unknown keys rejected.
struct RunConfig {
  nlohmann::json resolved;
  std::string task;
  std::string output;
  std::uint64_t seed = 0;
};

// Throws ConfigError naming the offending key (dotted path).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// %.17g
std::string fmt(double v);

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json summary;
};

// Executes the task and writes results.csv, summary.json and plotdata/*.csv into the output
// directory. Library errors propagate; exit_code is 2 when an invariant suite fails.
RunOutcome run(const RunConfig& cfg, int jobs);

// Maps an in-flight exception to the exit-code contract (1 config/budget, 2 validation, 3 convergence).
int exit_code_for(const std::exception& e);

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results land in index order.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace photoion::cli
