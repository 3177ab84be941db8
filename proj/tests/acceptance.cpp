// Acceptance suite: runs every verification at its stated scale and
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cidlab/builtins.hpp"
#include "cidlab/experiment.hpp"
#include "cidlab/predictive.hpp"
#include "cidlab/processes.hpp"

using namespace cidlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void line(int num, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", num,
              title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunResult run_named(const std::string& name, long reps, const std::string& out,
                    int workers = 0) {
  json j = builtin_config(name);
  if (reps > 0) j["replications"] = reps;
  j["output_dir"] = out;
  return run_experiment(ExperimentConfig::from_json(j), workers);
}

const TestReport& report_named(const RunResult& r, const std::string& name) {
  for (const auto& rep : r.reports)
    if (rep.name == name) return rep;
  throw std::runtime_error("missing report " + name);
}

std::string fmt(double v) { return format_double(v); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criterion 11 helpers ---------------------------------------------------

// Quadrature path (density representation) against the conjugate closed form.
double quad_vs_conjugate_worst(double u1, double u2, std::uint64_t seed) {
  const double lognorm = std::lgamma(u1 + u2) - std::lgamma(u1) - std::lgamma(u2);
  const auto density_prior = PriorSpec::density([=](double t) {
    return std::exp(lognorm + (u1 - 1.0) * std::log(t) + (u2 - 1.0) * std::log1p(-t));
  });
  const auto conjugate = PriorSpec::beta(u1, u2);
  double worst = 0.0;
  for (long rep = 0; rep < 100; ++rep) {
    Rng rng(seed, static_cast<std::uint64_t>(rep), 0);
    const long n = 1 + static_cast<long>(rng.uniform_int(200));
    const auto path = sample_exchangeable(conjugate, n, rng);
    PosteriorState quad(density_prior);
    long r = 0;
    for (int x : path.observations) {
      quad.observe(x);
      r += x;
    }
    const double closed =
        (u1 + static_cast<double>(r)) / (u1 + u2 + static_cast<double>(n));
    worst = std::max(worst, std::abs(quad.predictive_one() - closed));
  }
  // Extreme histories: all ones / all zeros at the largest n.
  for (long r_all : {0L, 200L}) {
    std::vector<int> h(200, r_all == 0 ? 0 : 1);
    PosteriorState quad(density_prior);
    for (int x : h) quad.observe(x);
    const double closed = (u1 + static_cast<double>(r_all)) / (u1 + u2 + 200.0);
    worst = std::max(worst, std::abs(quad.predictive_one() - closed));
  }
  return worst;
}

// Brute-force posterior mean of theta for a binary history under a prior of
// atoms plus a Beta(2,2) continuous part, via a 10^6-point Riemann sum.
double brute_posterior_mean_atom_beta22(long r, long n) {
  const long cells = 1000000;
  auto lik = [&](double t) {
    double ll = 0.0;
    if (r > 0) ll += static_cast<double>(r) * std::log(t);
    if (n - r > 0) ll += static_cast<double>(n - r) * std::log1p(-t);
    return std::exp(ll);
  };
  double num = 0.5 * lik(0.5) * 0.5, den = 0.5 * lik(0.5);
  double cn = 0.0, cd = 0.0;
  for (long i = 0; i < cells; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / cells;
    const double v = 6.0 * t * (1.0 - t) * lik(t);
    cd += v;
    cn += v * t;
  }
  num += 0.5 * cn / cells;
  den += 0.5 * cd / cells;
  return num / den;
}

}  // namespace

int main() {
  const std::string out = "acceptance_out";
  fs::remove_all(out);

  // 1. Dirichlet exactness at 10^4 random histories, n <= 4096, < 10 s.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_named("dirichlet-bound", 10000, out + "/dirichlet-bound");
    const double secs = elapsed_s(t0);
    const auto& identity = report_named(r, "dirichlet-identity");
    const auto& bound = report_named(r, "dirichlet-bound");
    line(1, "Dirichlet exactness",
         identity.pass && bound.pass && secs < 10.0,
         "max identity residual " + fmt(identity.statistic) + ", max bound excess " +
             fmt(bound.statistic) + ", " + fmt(secs) + " s");
  }

  // 2. Gaussian branch: standardized W_n at n = 4096 against N(0,1), < 60 s.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_named("cor4-gaussian-branch", 2000, out + "/cor4-gaussian-branch");
    const double secs = elapsed_s(t0);
    const auto& ks = report_named(r, "ks-w-standardized");
    line(2, "Gaussian branch KS", ks.pass && secs < 60.0,
         "KS " + fmt(ks.statistic) + " < " + fmt(ks.threshold) + ", " + fmt(secs) + " s");
  }

  // 3. Atomic branch conditional KS plus the atom-free log-log rate.
  {
    const auto r1 = run_named("cor4-atomic-branch", 2000, out + "/cor4-atomic-branch");
    const auto& ks = report_named(r1, "ks-c-conditional-atom");
    const auto r2 = run_named("cn-rate-loglog", 500, out + "/cn-rate-loglog");
    const auto& slope = report_named(r2, "cn-rate-slope");
    double slope_value = 0.0;
    for (const auto& [k, v] : slope.extras)
      if (k == "slope") slope_value = v;
    line(3, "atomic branch + C_n rate", ks.pass && slope.pass,
         "max conditional KS " + fmt(ks.statistic) + ", slope " + fmt(slope_value));
  }

  // 4. Stable convergence probe with power check.
  {
    const auto r = run_named("stable-probe", 4000, out + "/stable-probe");
    const auto& null_probe = report_named(r, "stable-probe-null");
    const auto& power = report_named(r, "stable-probe-power");
    line(4, "stable convergence probe", null_probe.pass && power.pass,
         "conditional KS " + fmt(null_probe.statistic) + " < 0.06, plant KS " +
             fmt(power.statistic) + " > 0.10");
  }

  // 5. a.s.-rate diagnostic with divergent control.
  {
    const auto r = run_named("cor5-as-rate", 200, out + "/cor5-as-rate");
    const auto& diag = report_named(r, "as-diagnostic");
    const auto& control = report_named(r, "as-divergent-control");
    line(5, "a.s. rate diagnostic", diag.pass && control.pass,
         "fraction " + fmt(diag.statistic) + " >= 0.85, control " +
             fmt(control.statistic) + " < 0.2");
  }

  // 6. Martingale-residual gap flatness, SEs reported, < 2 min.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_named("thm2-gap", 2000, out + "/thm2-gap");
    const double secs = elapsed_s(t0);
    const auto& ratio = report_named(r, "ngap-ratio");
    std::string ses;
    for (const auto& [k, v] : ratio.extras)
      if (k.rfind("n_gap_se_", 0) == 0) ses += " " + fmt(v);
    line(6, "martingale-residual gap O(1/n)", ratio.pass && secs < 120.0,
         "n*gap spread " + fmt(ratio.statistic) + " <= 3, SEs" + ses + ", " +
             fmt(secs) + " s");
  }

  // 7. Urn limit-variance ratio within +-30% of 1/9.
  {
    const auto r = run_named("thm7-variance-ratio", 2000, out + "/thm7-variance-ratio");
    const auto& ratio = report_named(r, "variance-ratio");
    double fitted = 0.0;
    for (const auto& [k, v] : ratio.extras)
      if (k == "fitted_ratio") fitted = v;
    line(7, "urn limit-variance ratio", ratio.pass,
         "fitted " + fmt(fitted) + " vs 1/9, rel err " + fmt(ratio.statistic) +
             " < 0.3");
  }

  // 8. Degenerate-weights identity (urn with Z = 1 vs Ferguson-Dirichlet).
  {
    const auto r =
        run_named("urn-dirichlet-degenerate", 2000, out + "/urn-dirichlet-degenerate");
    const auto& ks = report_named(r, "ks-urn-vs-dirichlet");
    line(8, "degenerate-weights identity", ks.pass,
         "two-sample KS " + fmt(ks.statistic) + " < " + fmt(ks.threshold));
  }

  // 9. Union-mass bound instrument across union masses {1, 1/4, 1/16}.
  {
    const auto r = run_named("ineq6-union-mass", 400, out + "/ineq6-union-mass");
    const auto& mono = report_named(r, "ineq6-monotone");
    const auto& bounded = report_named(r, "ineq6-ratio-bounded");
    line(9, "union-mass bound instrument", mono.pass && bounded.pass,
         "max increase " + fmt(mono.statistic) + " <= 0, ratio spread " +
             fmt(bounded.statistic) + " <= 4");
  }

  // 10. Urn c.i.d. diagnostic at 1e5 replications.
  {
    const auto r = run_named("lemma6-cid", 100000, out + "/lemma6-cid");
    const auto& cond = report_named(r, "cid-conditional");
    const auto& uncond = report_named(r, "cid-unconditional");
    line(10, "urn c.i.d. diagnostic", cond.pass && uncond.pass,
         "max |diff|/SE " + fmt(std::max(cond.statistic, uncond.statistic)) + " < 3");
  }

  // 11. Oracle equivalences.
  {
    const double worst_beta22 = quad_vs_conjugate_worst(2.0, 2.0, 901);
    const double worst_beta11 = quad_vs_conjugate_worst(1.0, 1.0, 902);
    const bool quad_ok = worst_beta22 <= 1e-8 && worst_beta11 <= 1e-8;

    // C_n against the brute-force conditional mean of W_n over every binary
    // history of length <= 6, atom + smooth prior through the kernel route.
    const auto prior = PriorSpec::mixture(
        {{0.5, PriorSpec::point_mass_binary(0.5)}, {0.5, PriorSpec::beta(2.0, 2.0)}});
    const auto kernel = PredictiveKernel::mixture(prior);
    double worst_c = 0.0;
    for (long n = 1; n <= 6; ++n) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> h(n);
        long ones = 0;
        for (long i = 0; i < n; ++i) {
          h[i] = static_cast<int>((mask >> i) & 1u);
          ones += h[i];
        }
        const double root_n = std::sqrt(static_cast<double>(n));
        const double mu_n = static_cast<double>(ones) / static_cast<double>(n);
        const double c_kernel = root_n * (mu_n - kernel.evaluate(h).mass(1));
        const double c_brute =
            root_n * (mu_n - brute_posterior_mean_atom_beta22(ones, n));
        worst_c = std::max(worst_c, std::abs(c_kernel - c_brute));
      }
    }
    const bool brute_ok = worst_c <= 1e-8;

    // Bridge sampler covariance against min(s,t) - st.
    const std::vector<double> times{0.2, 0.5, 0.7};
    const int m = 100000;
    std::vector<std::vector<double>> draws(times.size(), std::vector<double>(m));
    for (int i = 0; i < m; ++i) {
      Rng rng(903, static_cast<std::uint64_t>(i), 0);
      const auto g = sample_brownian_bridge(times, rng);
      for (std::size_t j = 0; j < times.size(); ++j) draws[j][i] = g[j];
    }
    double worst_cov = 0.0;
    for (std::size_t a = 0; a < times.size(); ++a)
      for (std::size_t b = 0; b < times.size(); ++b) {
        double cov = 0.0;
        for (int i = 0; i < m; ++i) cov += draws[a][i] * draws[b][i];
        cov /= m;
        worst_cov = std::max(
            worst_cov, std::abs(cov - (std::min(times[a], times[b]) - times[a] * times[b])));
      }
    const bool cov_ok = worst_cov < 0.01;

    line(11, "oracle equivalences", quad_ok && brute_ok && cov_ok,
         "quad vs conjugate " + fmt(std::max(worst_beta22, worst_beta11)) +
             " <= 1e-8, C_n vs brute " + fmt(worst_c) + " <= 1e-8, bridge cov " +
             fmt(worst_cov) + " < 0.01");
  }

  // 12. Determinism: byte-identical artifacts across runs and worker counts.
  {
    const std::map<std::string, long> reduced = {
        {"lemma6-cid", 600},  {"stable-probe", 600},       {"cor5-as-rate", 100},
        {"cor4-atomic-branch", 240}, {"trajectory", 20},
    };
    bool all_ok = true;
    std::string first_bad;
    for (const auto& info : list_experiments()) {
      long reps = 24;
      if (auto it = reduced.find(info.name); it != reduced.end()) reps = it->second;
      const std::string dir = out + "/det/" + info.name;
      const int worker_counts[3] = {1, 8, 1};
      std::vector<std::map<std::string, std::string>> snapshots;
      for (int pass_i = 0; pass_i < 3; ++pass_i) {
        run_named(info.name, reps, dir, worker_counts[pass_i]);
        std::map<std::string, std::string> snap;
        for (const char* f : {"summary.csv", "replications.csv", "reports.json"})
          snap[f] = slurp(fs::path(dir) / f);
        snapshots.push_back(std::move(snap));
      }
      const bool same = snapshots[0] == snapshots[1] && snapshots[1] == snapshots[2];
      if (!same && first_bad.empty()) first_bad = info.name;
      all_ok = all_ok && same;
    }
    line(12, "determinism across runs and workers {1,8}", all_ok,
         all_ok ? "all built-ins byte-identical" : "mismatch in " + first_bad);
  }

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "OK" : "FAILED", failures);
  return failures;
}
