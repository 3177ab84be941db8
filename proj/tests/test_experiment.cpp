#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cidlab/builtins.hpp"
#include "cidlab/experiment.hpp"

using namespace cidlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json tiny_config(const std::string& name, long reps, const std::string& out) {
  json j = builtin_config(name);
  j["replications"] = reps;
  j["output_dir"] = out;
  return j;
}

}  // namespace

TEST_CASE("catalog is sorted and contains the advertised entries") {
  const auto& infos = list_experiments();
  REQUIRE(!infos.empty());
  for (std::size_t i = 1; i < infos.size(); ++i) CHECK(infos[i - 1].name < infos[i].name);
  bool has_cor4 = false, has_thm7 = false;
  for (const auto& info : infos) {
    if (info.name == "cor4-gaussian-branch") has_cor4 = true;
    if (info.name == "thm7-variance-ratio") has_thm7 = true;
  }
  CHECK(has_cor4);
  CHECK(has_thm7);
}

TEST_CASE("config validation lists every violation and rejects unknown keys") {
  json j;
  j["experiment"] = "no-such-driver";
  j["bogus"] = 1;
  j["replications"] = 0;
  try {
    ExperimentConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    auto has = [&](const char* needle) {
      for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
      return false;
    };
    CHECK(has("unknown key 'bogus'"));
    CHECK(has("seed"));
    CHECK(has(">= 1"));
    CHECK(has("unknown driver"));
  }
}

TEST_CASE("zero replications never writes files") {
  json j = builtin_config("dirichlet-bound");
  j["replications"] = 0;
  const std::string out = "test_out/zero_reps";
  j["output_dir"] = out;
  fs::remove_all(out);
  CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);
  CHECK(!fs::exists(out));
}

TEST_CASE("unknown verification names are rejected") {
  json j = tiny_config("dirichlet-bound", 5, "test_out/bad_verification");
  j["verification"] = {"no-such-report"};
  const auto cfg = ExperimentConfig::from_json(j);
  CHECK_THROWS_AS(run_experiment_in_memory(cfg), ConfigError);
}

TEST_CASE("dirichlet-bound run produces artifacts and deterministic bytes") {
  const std::string out_a = "test_out/db_a", out_b = "test_out/db_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  const auto cfg_a = ExperimentConfig::from_json(tiny_config("dirichlet-bound", 50, out_a));
  const auto cfg_b = ExperimentConfig::from_json(tiny_config("dirichlet-bound", 50, out_b));
  const auto ra = run_experiment(cfg_a, 1);
  const auto rb = run_experiment(cfg_b, 4);
  CHECK(ra.all_selected_passed());
  CHECK(rb.all_selected_passed());
  for (const char* f : {"summary.csv", "replications.csv"})
    CHECK(slurp(fs::path(out_a) / f) == slurp(fs::path(out_b) / f));
  // reports.json differs only in output_dir inside the echoed config; compare
  // the parsed reports and provenance-relevant pieces instead.
  const json ja = json::parse(slurp(fs::path(out_a) / "reports.json"));
  const json jb = json::parse(slurp(fs::path(out_b) / "reports.json"));
  CHECK(ja["reports"] == jb["reports"]);
  CHECK(ja["all_selected_passed"] == jb["all_selected_passed"]);

  // Hash is reproducible for identical configs.
  CHECK(cfg_a.hash() == ExperimentConfig::from_json(cfg_a.to_json()).hash());

  // CSV schema headers.
  const std::string summary = slurp(fs::path(out_a) / "summary.csv");
  CHECK(summary.rfind("experiment,n,stat_name,mean,se,reps\n", 0) == 0);
  const std::string reps = slurp(fs::path(out_a) / "replications.csv");
  CHECK(reps.rfind("experiment,rep,n,stat_name,value\n", 0) == 0);
}

TEST_CASE("verification selection gates the pass status") {
  json j = tiny_config("cor4-gaussian-branch", 80, "test_out/gate");
  j["params"] = {{"n", 64}, {"ks_threshold", 1e-9}};  // forced failure
  const auto cfg = ExperimentConfig::from_json(j);
  const auto result = run_experiment_in_memory(cfg);
  CHECK(!result.all_selected_passed());
}

TEST_CASE("trajectory driver with an explicit kernel override") {
  json j;
  j["experiment"] = "trajectory";
  j["seed"] = 77;
  j["replications"] = 20;
  j["output_dir"] = "test_out/traj";
  j["model"] = {{"kind", "exchangeable"},
                {"prior", {{"kind", "beta"}, {"a", 1.0}, {"b", 1.0}}}};
  j["kernel"] = {{"kind", "dirichlet"},
                 {"alpha", 2.0},
                 {"base", {{"kind", "uniform"}, {"size", 2}}}};
  j["checkpoints"] = {16, 64};
  const auto cfg = ExperimentConfig::from_json(j);
  const auto result = run_experiment_in_memory(cfg);
  CHECK(result.replications.size() == 20 * 2 * 3);  // reps x checkpoints x stats
  CHECK(result.reports.empty());
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 123456.789, 1e-300, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}
