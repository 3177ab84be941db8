#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cidlab/measure.hpp"
#include "cidlab/models.hpp"
#include "cidlab/prior.hpp"
#include "cidlab/stats.hpp"

namespace cidlab {

inline constexpr const char* kVersion = "0.1.0";

// Config validation failure carrying every violated field at once.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Declarative experiment description. Strict JSON schema: unknown keys are
// rejected at every level, the seed is required (no entropy defaults), and
// replications must be >= 1.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  long replications = 0;
  std::string output_dir;
  std::vector<std::string> verification;  // empty = every report gates
  std::vector<long> checkpoints;          // empty = driver default
  nlohmann::json model;                   // may be null (driver default)
  nlohmann::json kernel;                  // may be null (matched to model)
  nlohmann::json cls;                     // "class" block, may be null
  nlohmann::json params;                  // driver-specific block

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;  // canonical form (sorted keys)
  std::uint64_t hash() const;      // FNV-1a of the canonical dump
};

struct SummaryRow {
  long n = 0;
  std::string stat;
  double mean = 0.0;
  double se = 0.0;
  long reps = 0;
};

struct ReplicationRow {
  long rep = 0;
  long n = 0;
  std::string stat;
  double value = 0.0;
};

struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version = kVersion;
};

struct RunResult {
  std::string experiment;
  std::vector<SummaryRow> summary;
  std::vector<ReplicationRow> replications;
  std::vector<TestReport> reports;
  std::vector<std::string> selected;  // verification names that gate the run
  Provenance provenance;

  bool all_selected_passed() const;
};

// Executes the experiment's replications (parallel, one RNG stream per
// replication, aggregation in replication order) and writes summary.csv,
// replications.csv and reports.json under the output directory via
// temp-file-then-rename. workers = 0 resolves from CIDLAB_WORKERS or the
// hardware concurrency.
RunResult run_experiment(const ExperimentConfig& config, int workers = 0);

// As above without touching the filesystem.
RunResult run_experiment_in_memory(const ExperimentConfig& config, int workers = 0);

// --- shared config building blocks -----------------------------------------

ProbabilityMeasure measure_from_json(const nlohmann::json& j);
PriorSpec prior_from_json(const nlohmann::json& j);
WeightLaw weight_law_from_json(const nlohmann::json& j);
SetClass set_class_from_json(const nlohmann::json& j, int alphabet_size);
// Registry of densities referenced by name from configs.
std::function<double(double)> named_density(const std::string& name);

// --- execution helpers ------------------------------------------------------

int resolve_workers(int requested);
// Runs body(0..count-1) across workers; results must be written to
// per-index slots. The first exception (if any) is rethrown on the caller.
void parallel_for(long count, int workers, const std::function<void(long)>& body);

// Serialize a double with shortest round-trip formatting.
std::string format_double(double v);

}  // namespace cidlab
