#include "cidlab/experiment.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "cidlab/builtins.hpp"

namespace cidlab {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// ConfigError

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string out = "invalid experiment config:";
  for (const auto& v : violations) out += "\n  - " + v;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)),
      violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back(where + ": expected an object");
    return;
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      errors.push_back(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  std::vector<std::string> errors;
  check_keys(j,
             {"experiment", "seed", "replications", "output_dir", "verification",
              "checkpoints", "model", "kernel", "class", "params"},
             "config", errors);

  ExperimentConfig cfg;
  if (j.is_object()) {
    if (!j.contains("experiment") || !j["experiment"].is_string())
      errors.push_back("experiment: required string naming a driver");
    else {
      cfg.experiment = j["experiment"].get<std::string>();
      if (!is_builtin(cfg.experiment) && cfg.experiment != "trajectory")
        errors.push_back("experiment: unknown driver '" + cfg.experiment + "'");
    }
    if (!j.contains("seed") || !j["seed"].is_number_integer() ||
        (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() &&
         j["seed"].get<long long>() < 0))
      errors.push_back("seed: required nonnegative integer (no entropy defaults)");
    else
      cfg.seed = j["seed"].get<std::uint64_t>();
    if (!j.contains("replications") || !j["replications"].is_number_integer())
      errors.push_back("replications: required integer");
    else {
      cfg.replications = j["replications"].get<long>();
      if (cfg.replications < 1) errors.push_back("replications: must be >= 1");
    }
    if (j.contains("output_dir")) {
      if (!j["output_dir"].is_string())
        errors.push_back("output_dir: expected string");
      else
        cfg.output_dir = j["output_dir"].get<std::string>();
    } else if (!cfg.experiment.empty()) {
      cfg.output_dir = "out/" + cfg.experiment;
    }
    if (j.contains("verification")) {
      if (!j["verification"].is_array())
        errors.push_back("verification: expected array of report names");
      else
        for (const auto& v : j["verification"]) {
          if (!v.is_string())
            errors.push_back("verification: entries must be strings");
          else
            cfg.verification.push_back(v.get<std::string>());
        }
    }
    if (j.contains("checkpoints")) {
      if (!j["checkpoints"].is_array())
        errors.push_back("checkpoints: expected array of integers");
      else {
        long prev = 0;
        for (const auto& v : j["checkpoints"]) {
          if (!v.is_number_integer()) {
            errors.push_back("checkpoints: entries must be integers");
            break;
          }
          const long n = v.get<long>();
          if (n < 1 || n <= prev) {
            errors.push_back("checkpoints: must be strictly increasing and >= 1");
            break;
          }
          cfg.checkpoints.push_back(n);
          prev = n;
        }
      }
    }
    if (j.contains("model")) cfg.model = j["model"];
    if (j.contains("kernel")) cfg.kernel = j["kernel"];
    if (j.contains("class")) cfg.cls = j["class"];
    if (j.contains("params")) {
      if (!j["params"].is_object())
        errors.push_back("params: expected object");
      else
        cfg.params = j["params"];
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  if (cfg.params.is_null()) cfg.params = json::object();
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replications"] = replications;
  j["output_dir"] = output_dir;
  if (!verification.empty()) j["verification"] = verification;
  if (!checkpoints.empty()) j["checkpoints"] = checkpoints;
  if (!model.is_null()) j["model"] = model;
  if (!kernel.is_null()) j["kernel"] = kernel;
  if (!cls.is_null()) j["class"] = cls;
  if (!params.empty()) j["params"] = params;
  return j;
}

std::uint64_t ExperimentConfig::hash() const {
  const std::string dump = to_json().dump();
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Config building blocks

ProbabilityMeasure measure_from_json(const json& j) {
  std::vector<std::string> errors;
  check_keys(j, {"kind", "size", "masses"}, "measure", errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  const std::string kind = j.value("kind", "");
  if (kind == "uniform") {
    if (!j.contains("size")) throw ConfigError({"measure: 'uniform' needs 'size'"});
    return ProbabilityMeasure::finite_uniform(j["size"].get<int>());
  }
  if (kind == "masses") {
    if (!j.contains("masses")) throw ConfigError({"measure: 'masses' needs 'masses'"});
    return ProbabilityMeasure::finite(j["masses"].get<std::vector<double>>());
  }
  throw ConfigError({"measure: unknown kind '" + kind + "'"});
}

std::function<double(double)> named_density(const std::string& name) {
  if (name == "quadratic")  // Beta(2,2) density relative to the uniform
    return [](double v) { return 6.0 * v * (1.0 - v); };
  if (name == "steep-logistic") {  // near-indicator around 1/2, mean 1
    return [](double v) { return 2.0 / (1.0 + std::exp(-(v - 0.5) / 0.003)); };
  }
  if (name == "tilted")  // asymmetric Lipschitz density 2v
    return [](double v) { return 2.0 * v; };
  throw ConfigError({"density: unknown name '" + name + "'"});
}

PriorSpec prior_from_json(const json& j) {
  std::vector<std::string> errors;
  check_keys(j, {"kind", "a", "b", "alpha", "atoms", "components", "name"}, "prior",
             errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  const std::string kind = j.value("kind", "");
  if (kind == "beta") return PriorSpec::beta(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "dirichlet")
    return PriorSpec::dirichlet(j.at("alpha").get<std::vector<double>>());
  if (kind == "atoms") {
    std::vector<std::pair<double, PriorSpec>> parts;
    for (const auto& a : j.at("atoms")) {
      std::vector<std::string> e2;
      check_keys(a, {"theta", "mass"}, "prior.atoms[]", e2);
      if (!e2.empty()) throw ConfigError(std::move(e2));
      const double mass = a.at("mass").get<double>();
      if (a.at("theta").is_number())
        parts.emplace_back(mass, PriorSpec::point_mass_binary(a["theta"].get<double>()));
      else
        parts.emplace_back(mass,
                           PriorSpec::point_mass(a["theta"].get<std::vector<double>>()));
    }
    return parts.size() == 1 ? parts[0].second : PriorSpec::mixture(std::move(parts));
  }
  if (kind == "density") return PriorSpec::density(named_density(j.at("name").get<std::string>()));
  if (kind == "mixture") {
    std::vector<std::pair<double, PriorSpec>> parts;
    for (const auto& c : j.at("components")) {
      std::vector<std::string> e2;
      check_keys(c, {"weight", "prior"}, "prior.components[]", e2);
      if (!e2.empty()) throw ConfigError(std::move(e2));
      parts.emplace_back(c.at("weight").get<double>(), prior_from_json(c.at("prior")));
    }
    return PriorSpec::mixture(std::move(parts));
  }
  throw ConfigError({"prior: unknown kind '" + kind + "'"});
}

WeightLaw weight_law_from_json(const json& j) {
  std::vector<std::string> errors;
  check_keys(j, {"kind", "value", "values", "probs", "a", "b"}, "weights", errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  const std::string kind = j.value("kind", "");
  if (kind == "constant") return WeightLaw::constant(j.at("value").get<double>());
  if (kind == "discrete")
    return WeightLaw::discrete(j.at("values").get<std::vector<double>>(),
                               j.at("probs").get<std::vector<double>>());
  if (kind == "uniform")
    return WeightLaw::uniform(j.at("a").get<double>(), j.at("b").get<double>());
  throw ConfigError({"weights: unknown kind '" + kind + "'"});
}

SetClass set_class_from_json(const json& j, int alphabet_size) {
  if (j.is_null()) return SetClass::all_subsets(alphabet_size);
  std::vector<std::string> errors;
  check_keys(j, {"kind", "members"}, "class", errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  const std::string kind = j.value("kind", "");
  if (kind == "all-subsets") return SetClass::all_subsets(alphabet_size);
  if (kind == "singletons") return SetClass::singletons(alphabet_size);
  if (kind == "disjoint-family")
    return SetClass::disjoint_family(j.at("members").get<std::vector<std::vector<int>>>(),
                                     alphabet_size);
  throw ConfigError({"class: unknown kind '" + kind + "'"});
}

// ---------------------------------------------------------------------------
// Execution helpers

int resolve_workers(int requested) {
  int workers = requested;
  if (workers <= 0) {
    if (const char* env = std::getenv("CIDLAB_WORKERS")) {
      workers = std::atoi(env);
    }
  }
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, workers);
}

void parallel_for(long count, int workers, const std::function<void(long)>& body) {
  workers = std::min<long>(std::max(1, workers), std::max<long>(1, count));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Artifacts

namespace {

void write_atomically(const fs::path& target, const std::string& content) {
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

json report_to_json(const TestReport& r) {
  json j;
  j["name"] = r.name;
  j["context"] = r.context;
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  switch (r.comparator) {
    case TestReport::Cmp::Less: j["comparator"] = "<"; break;
    case TestReport::Cmp::LessEq: j["comparator"] = "<="; break;
    case TestReport::Cmp::Greater: j["comparator"] = ">"; break;
    case TestReport::Cmp::GreaterEq: j["comparator"] = ">="; break;
  }
  j["pass"] = r.pass;
  if (!std::isnan(r.se)) j["se"] = r.se;
  if (!r.sample_sizes.empty()) j["sample_sizes"] = r.sample_sizes;
  if (!r.extras.empty()) {
    json e = json::object();
    for (const auto& [k, v] : r.extras) e[k] = v;
    j["extras"] = e;
  }
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

void write_artifacts(const RunResult& result, const ExperimentConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  std::string summary = "experiment,n,stat_name,mean,se,reps\n";
  for (const auto& row : result.summary) {
    summary += result.experiment;
    summary += ',';
    summary += std::to_string(row.n);
    summary += ',';
    summary += row.stat;
    summary += ',';
    summary += format_double(row.mean);
    summary += ',';
    summary += format_double(row.se);
    summary += ',';
    summary += std::to_string(row.reps);
    summary += '\n';
  }
  write_atomically(dir / "summary.csv", summary);

  std::string reps = "experiment,rep,n,stat_name,value\n";
  for (const auto& row : result.replications) {
    reps += result.experiment;
    reps += ',';
    reps += std::to_string(row.rep);
    reps += ',';
    reps += std::to_string(row.n);
    reps += ',';
    reps += row.stat;
    reps += ',';
    reps += format_double(row.value);
    reps += '\n';
  }
  write_atomically(dir / "replications.csv", reps);

  json j;
  j["experiment"] = result.experiment;
  j["provenance"] = {{"config_hash", result.provenance.config_hash},
                     {"seed", result.provenance.seed},
                     {"version", result.provenance.version}};
  j["config"] = cfg.to_json();
  j["selected"] = result.selected;
  j["all_selected_passed"] = result.all_selected_passed();
  j["reports"] = json::array();
  for (const auto& r : result.reports) j["reports"].push_back(report_to_json(r));
  write_atomically(dir / "reports.json", j.dump(2) + "\n");
}

}  // namespace

bool RunResult::all_selected_passed() const {
  for (const auto& r : reports) {
    const bool gates =
        selected.empty() ||
        std::find(selected.begin(), selected.end(), r.name) != selected.end();
    if (gates && !r.pass) return false;
  }
  return true;
}

RunResult run_experiment_in_memory(const ExperimentConfig& config, int workers) {
  RunResult result = run_builtin_driver(config, resolve_workers(workers));
  result.experiment = config.experiment;
  result.provenance.config_hash = config.hash();
  result.provenance.seed = config.seed;
  result.provenance.version = kVersion;
  result.selected = config.verification;
  if (!result.selected.empty()) {
    std::vector<std::string> errors;
    for (const auto& name : result.selected) {
      const bool known = std::any_of(result.reports.begin(), result.reports.end(),
                                     [&](const TestReport& r) { return r.name == name; });
      if (!known)
        errors.push_back("verification: experiment '" + config.experiment +
                         "' produces no report named '" + name + "'");
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
  }
  return result;
}

RunResult run_experiment(const ExperimentConfig& config, int workers) {
  RunResult result = run_experiment_in_memory(config, workers);
  write_artifacts(result, config);
  return result;
}

}  // namespace cidlab
