#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace crng {

// Config rejected before any computation starts; the CLI maps it to exit 2.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Internal invariant breach detected mid-run; the CLI maps it to exit 4 and
// dumps a reproduction bundle next to the output.
class InvariantBreach : public std::runtime_error {
 public:
  explicit InvariantBreach(const std::string& what) : std::runtime_error(what) {}
};

struct RunOptions {
  int workers = 1;
  uint64_t budget = 0;  // 0: keep the config's / default budget
};

// Executes one experiment config. Deterministic for a fixed (config, seed)
// pair, independent of the worker count. Returns the output text that also
// went to the artifact files (handy for tests).
std::string run_experiment(const nlohmann::json& config, const RunOptions& options);

// Schema plus semantic checks without running; returns a report, one finding
// per line, empty when the config is clean.
std::string validate_experiment(const nlohmann::json& config);

}  // namespace crng
