#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cidlab/measure.hpp"
#include "cidlab/models.hpp"

namespace cidlab {

struct TestReport {
  enum class Cmp { Less, LessEq, Greater, GreaterEq };

  std::string name;
  std::string context;
  double statistic = 0.0;
  double threshold = 0.0;
  Cmp comparator = Cmp::Less;
  bool pass = false;
  double se = std::numeric_limits<double>::quiet_NaN();
  std::vector<long> sample_sizes;
  std::vector<std::pair<std::string, double>> extras;
  std::vector<std::string> warnings;
};

// pass is derived from (statistic, comparator, threshold); never set by hand.
TestReport make_report(std::string name, double statistic, double threshold,
                       TestReport::Cmp comparator, std::string context = "");

double mean_of(std::span<const double> xs);
// Standard error of the mean (0 for a single observation).
double se_of_mean(std::span<const double> xs);

// One-sample Kolmogorov-Smirnov statistic:
// max_i max(i/m - F(x_(i)), F(x_(i)) - (i-1)/m).
double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS distance between empirical CDFs.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// Conditional two-sample KS between {values | event} and {limit | event},
// probing stable (not merely distributional) convergence; the unconditional
// KS is reported in extras. Requires >= 200 event replications.
TestReport stable_convergence_probe(std::span<const double> values,
                                    const std::vector<bool>& events,
                                    std::span<const double> limit_draws,
                                    double threshold, std::string name = "stable-probe");

struct UIEntry {
  long n = 0;
  double c = 0.0;
  double tail_mean = 0.0;  // E[ X 1{X > c} ]
  double se = 0.0;
};

struct UITable {
  std::vector<UIEntry> entries;
  // max over n of the tail expectation is nonincreasing in c.
  bool max_decreasing_in_c = true;
};

UITable uniform_integrability_table(
    const std::vector<std::pair<long, std::vector<double>>>& samples_by_n,
    std::span<const double> thresholds);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares slope of log(mean) against log(n); needs >= 3 checkpoints
// and positive means.
LogLogFit loglog_rate(std::span<const long> ns, std::span<const double> means);

// Oscillation falsifier for a.s. convergence of ||D_n||: per path,
// osc(n) = max_{m in [n,4n]} | ||D_m|| - ||D_n|| |; the statistic is the
// fraction of paths with osc(n_large) <= osc(n_small) (ties succeed).
// The median oscillation ratio is reported in extras.
TestReport as_convergence_diagnostic(const std::vector<std::vector<double>>& sup_d_by_path,
                                     std::span<const long> checkpoints,
                                     double pass_fraction);

struct GapEstimate {
  long n = 0;
  double gap = 0.0;    // estimate of E0(f^2) - E0(E0(f|G_n)^2)
  double n_gap = 0.0;  // n * gap
  double se = 0.0;     // Monte Carlo SE of gap
  long reps = 0;
};

// Martingale-residual gap for f = h(V), V the latent success probability
// under a Beta(u1,u2) reference prior: simulates paths from the mixture
// sampler and estimates E0[(f - E0(f|G_n))^2], with
// E0(f|G_n) computed by log-space quadrature over the Beta(u1+r, u2+n-r)
// posterior. (The residual form is algebraically equal in expectation to
// E0(f^2) - E0(E0(f|G_n)^2) and has O(1/n^2) Monte Carlo variance instead
// of O(1).)
GapEstimate theorem2_gap(const std::function<double(double)>& h, double u1, double u2,
                         long n, long reps, std::uint64_t master_seed,
                         std::uint64_t substream = 0,
                         std::vector<double>* out_residual_sq = nullptr);

struct UrnConfig {
  double alpha = 1.0;
  ProbabilityMeasure base_y = ProbabilityMeasure::finite_uniform(2);
  WeightLaw weights = WeightLaw::constant(1.0);
};

// Conditional-identity diagnostic for the urn model: buckets replications
// by the exact prefix pattern of length prefix_n and compares the
// frequencies of {Y_{n+1} in B} and {Y_{n+2} in B} per bucket as a paired
// difference. statistic = max |diff| / SE(diff); buckets with fewer than
// 100 hits are skipped with a warning.
TestReport cid_diagnostic(const UrnConfig& config, long prefix_n,
                          std::span<const int> target_set, long reps,
                          std::uint64_t master_seed, std::uint64_t substream = 0);

// Regression through the origin of C_n(B)^2 on x = mu_hat(B)(1 - mu_hat(B)),
// compared against the limit ratio var(Z)/(EZ)^2. For a positive target the
// statistic is the relative error of the fitted ratio; for a zero-variance
// weight law it is the fitted ratio itself.
TestReport variance_ratio_check(std::span<const double> c_samples,
                                std::span<const double> mu_hats,
                                const WeightLaw& weights, double tolerance);

}  // namespace cidlab
