// crnglab: experiment runner for the coding laboratory. Subcommands take a
// JSON config file; outputs are CSV or JSON and byte-identical for a fixed
// (config, seed) pair regardless of the worker count.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crng/budget.hpp"
#include "crng/experiment.hpp"

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInvariant = 4;

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw crng::SchemaError("cannot open config file: " + path);
  nlohmann::json config;
  try {
    in >> config;
  } catch (const nlohmann::json::parse_error& e) {
    throw crng::SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  return config;
}

struct CommonArgs {
  std::string config_path;
  std::string output_override;
  uint64_t seed_override = 0;
  bool has_seed_override = false;
  int workers = 1;
  uint64_t budget = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("config", args->config_path, "experiment config (JSON)")->required();
  cmd->add_option("--output", args->output_override, "override the config's output path");
  cmd->add_option("--seed", args->seed_override, "override the config's seed")
      ->each([args](const std::string&) { args->has_seed_override = true; });
  cmd->add_option("--workers", args->workers, "worker threads for Monte Carlo trials")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--budget", args->budget, "enumeration budget override");
}

int run_command(const CommonArgs& args, bool validate_only) {
  nlohmann::json config = load_config(args.config_path);
  if (!args.output_override.empty()) config["output"] = args.output_override;
  if (args.has_seed_override) config["seed"] = args.seed_override;

  crng::RunOptions options;
  options.workers = args.workers;
  options.budget = args.budget;
  if (options.budget == 0) {
    if (const char* env = std::getenv("CRNGLAB_BUDGET")) options.budget = std::strtoull(env, nullptr, 10);
  }

  if (validate_only) {
    const std::string report = crng::validate_experiment(config);
    if (report.empty())
      std::cout << "ok\n";
    else
      std::cout << report;
    return 0;
  }
  std::cout << crng::run_experiment(config, options);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coding laboratory experiment runner"};
  app.require_subcommand(1);

  CommonArgs args;
  bool validate_only = false;
  for (const char* name :
       {"region", "simulate-source", "simulate-channel", "verify-hash", "spectral", "validate"}) {
    CLI::App* cmd = app.add_subcommand(name, name);
    add_common(cmd, &args);
    cmd->callback([&args, &validate_only, name]() { validate_only = std::string(name) == "validate"; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(args, validate_only);
  } catch (const crng::SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const crng::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const crng::InvariantBreach& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    // reproduction bundle: the exact config plus the failure message
    try {
      nlohmann::json bundle;
      bundle["config"] = load_config(args.config_path);
      bundle["error"] = e.what();
      std::ofstream out(args.config_path + ".repro.json");
      out << bundle.dump(2) << "\n";
      std::cerr << "reproduction bundle written to " << args.config_path << ".repro.json\n";
    } catch (...) {
    }
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
