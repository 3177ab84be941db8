#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cidlab/builtins.hpp"
#include "cidlab/experiment.hpp"

namespace {

void print_report(const cidlab::TestReport& r, bool gates) {
  const char* cmp = "<";
  switch (r.comparator) {
    case cidlab::TestReport::Cmp::Less: cmp = "<"; break;
    case cidlab::TestReport::Cmp::LessEq: cmp = "<="; break;
    case cidlab::TestReport::Cmp::Greater: cmp = ">"; break;
    case cidlab::TestReport::Cmp::GreaterEq: cmp = ">="; break;
  }
  std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": statistic "
            << cidlab::format_double(r.statistic) << " " << cmp << " "
            << cidlab::format_double(r.threshold);
  if (!gates) std::cout << " (not selected)";
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cidlab: simulation and verification lab for predictive "
               "distributions of dependent sequences"};
  app.require_subcommand(1);

  auto* list_cmd = app.add_subcommand("list", "list built-in experiments");

  auto* run_cmd = app.add_subcommand("run", "run an experiment");
  std::string config_path, experiment_name, out_dir;
  std::uint64_t seed = 0;
  long reps = 0;
  bool seed_set = false, reps_set = false, out_set = false;
  run_cmd->add_option("--config", config_path, "JSON experiment config file");
  run_cmd->add_option("--experiment", experiment_name, "built-in experiment name");
  run_cmd->add_option("--seed", seed, "master seed override")
      ->each([&](const std::string&) { seed_set = true; });
  run_cmd->add_option("--reps", reps, "replication count override")
      ->each([&](const std::string&) { reps_set = true; });
  run_cmd->add_option("--out", out_dir, "output directory override")
      ->each([&](const std::string&) { out_set = true; });

  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) {
    for (const auto& info : cidlab::list_experiments())
      std::cout << info.name << " - " << info.description << "\n";
    return 0;
  }

  try {
    if (config_path.empty() == experiment_name.empty()) {
      std::cerr << "run: give exactly one of --config or --experiment\n";
      return 2;
    }
    nlohmann::json raw;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "run: cannot open config file '" << config_path << "'\n";
        return 2;
      }
      in >> raw;
    } else {
      raw = cidlab::builtin_config(experiment_name);
    }
    if (seed_set) raw["seed"] = seed;
    if (reps_set) raw["replications"] = reps;
    if (out_set) raw["output_dir"] = out_dir;

    const auto cfg = cidlab::ExperimentConfig::from_json(raw);
    const auto result = cidlab::run_experiment(cfg);
    for (const auto& r : result.reports) {
      const bool gates = result.selected.empty() ||
                         std::find(result.selected.begin(), result.selected.end(),
                                   r.name) != result.selected.end();
      print_report(r, gates);
    }
    std::cout << "artifacts: " << cfg.output_dir << " (config hash "
              << result.provenance.config_hash << ")\n";
    return result.all_selected_passed() ? 0 : 1;
  } catch (const cidlab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
