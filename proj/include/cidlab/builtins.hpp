#pragma once

#include <string>
#include <vector>

#include "cidlab/experiment.hpp"

namespace cidlab {

struct BuiltinInfo {
  std::string name;
  std::string description;
};

// Catalog of runnable experiments, sorted by name. Every acceptance
// verification has a corresponding entry.
const std::vector<BuiltinInfo>& list_experiments();

bool is_builtin(const std::string& name);

// Full preset config for a catalog entry (seed, replications, model, ...).
nlohmann::json builtin_config(const std::string& name);

// Dispatch to the named driver. Fills summary/replication rows and reports;
// provenance is attached by run_experiment.
RunResult run_builtin_driver(const ExperimentConfig& config, int workers);

}  // namespace cidlab
