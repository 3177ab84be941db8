#include "cidlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cidlab/predictive.hpp"
#include "cidlab/quadrature.hpp"
#include "cidlab/rng.hpp"

namespace cidlab {

namespace {

bool comparator_holds(double statistic, TestReport::Cmp cmp, double threshold) {
  switch (cmp) {
    case TestReport::Cmp::Less: return statistic < threshold;
    case TestReport::Cmp::LessEq: return statistic <= threshold;
    case TestReport::Cmp::Greater: return statistic > threshold;
    case TestReport::Cmp::GreaterEq: return statistic >= threshold;
  }
  return false;
}

}  // namespace

TestReport make_report(std::string name, double statistic, double threshold,
                       TestReport::Cmp comparator, std::string context) {
  TestReport r;
  r.name = std::move(name);
  r.context = std::move(context);
  r.statistic = statistic;
  r.threshold = threshold;
  r.comparator = comparator;
  r.pass = comparator_holds(statistic, comparator, threshold);
  return r;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean_of: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double se_of_mean(std::span<const double> xs) {
  const std::size_t m = xs.size();
  if (m == 0) throw std::invalid_argument("se_of_mean: empty sample");
  if (m == 1) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (static_cast<double>(m - 1) * static_cast<double>(m)));
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_statistic(std::span<const double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    sup = std::max(sup, (static_cast<double>(i) + 1.0) / m - f);
    sup = std::max(sup, f - static_cast<double>(i) / m);
  }
  return sup;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> xa(a.begin(), a.end()), xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size()), nb = static_cast<double>(xb.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < xa.size() && j < xb.size()) {
    const double v = std::min(xa[i], xb[j]);
    while (i < xa.size() && xa[i] <= v) ++i;
    while (j < xb.size() && xb[j] <= v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return sup;
}

TestReport stable_convergence_probe(std::span<const double> values,
                                    const std::vector<bool>& events,
                                    std::span<const double> limit_draws,
                                    double threshold, std::string name) {
  if (values.size() != events.size() || values.size() != limit_draws.size())
    throw std::invalid_argument("stable_convergence_probe: input size mismatch");
  std::vector<double> cond_values, cond_limits;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!events[i]) continue;
    cond_values.push_back(values[i]);
    cond_limits.push_back(limit_draws[i]);
  }
  if (cond_values.size() < 200)
    throw std::invalid_argument(
        "stable_convergence_probe: fewer than 200 replications with the event true");
  const double cond_ks = ks_two_sample(cond_values, cond_limits);
  const double uncond_ks = ks_two_sample(values, limit_draws);
  TestReport r = make_report(std::move(name), cond_ks, threshold, TestReport::Cmp::Less,
                             "two-sample KS of the conditional laws given H");
  r.sample_sizes = {static_cast<long>(cond_values.size()),
                    static_cast<long>(values.size())};
  r.extras.emplace_back("unconditional_ks", uncond_ks);
  return r;
}

// ---------------------------------------------------------------------------
// Uniform integrability

UITable uniform_integrability_table(
    const std::vector<std::pair<long, std::vector<double>>>& samples_by_n,
    std::span<const double> thresholds) {
  UITable table;
  std::vector<double> max_by_c(thresholds.size(), 0.0);
  for (const auto& [n, sample] : samples_by_n) {
    if (sample.empty())
      throw std::invalid_argument("uniform_integrability_table: empty sample");
    for (std::size_t ci = 0; ci < thresholds.size(); ++ci) {
      const double c = thresholds[ci];
      std::vector<double> tail(sample.size());
      for (std::size_t i = 0; i < sample.size(); ++i)
        tail[i] = sample[i] > c ? sample[i] : 0.0;
      UIEntry e;
      e.n = n;
      e.c = c;
      e.tail_mean = mean_of(tail);
      e.se = se_of_mean(tail);
      max_by_c[ci] = std::max(max_by_c[ci], e.tail_mean);
      table.entries.push_back(e);
    }
  }
  for (std::size_t ci = 1; ci < max_by_c.size(); ++ci)
    if (max_by_c[ci] > max_by_c[ci - 1]) table.max_decreasing_in_c = false;
  return table;
}

// ---------------------------------------------------------------------------
// Rate regression

LogLogFit loglog_rate(std::span<const long> ns, std::span<const double> means) {
  if (ns.size() != means.size() || ns.size() < 3)
    throw std::invalid_argument("loglog_rate: need >= 3 checkpoints");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(means[i] > 0.0))
      throw std::invalid_argument("loglog_rate: means must be positive");
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(means[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("loglog_rate: degenerate abscissae");
  LogLogFit fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

// ---------------------------------------------------------------------------
// a.s.-convergence falsifier

TestReport as_convergence_diagnostic(const std::vector<std::vector<double>>& sup_d_by_path,
                                     std::span<const long> checkpoints,
                                     double pass_fraction) {
  if (sup_d_by_path.size() < 100)
    throw std::invalid_argument("as_convergence_diagnostic: need >= 100 paths");
  if (checkpoints.size() < 4)
    throw std::invalid_argument("as_convergence_diagnostic: need >= 4 checkpoints");
  for (const auto& path : sup_d_by_path)
    if (path.size() != checkpoints.size())
      throw std::invalid_argument("as_convergence_diagnostic: ragged trajectory table");

  // Window starts: checkpoints n whose window [n, 4n] is fully observable.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (4 * checkpoints[i] <= checkpoints.back()) starts.push_back(i);
  if (starts.size() < 2)
    throw std::invalid_argument("as_convergence_diagnostic: checkpoint range too short");
  const std::size_t i_small = starts.front();
  const std::size_t i_large = starts.back();

  auto osc = [&](const std::vector<double>& d, std::size_t start) {
    const long n = checkpoints[start];
    double o = 0.0;
    for (std::size_t j = start; j < checkpoints.size() && checkpoints[j] <= 4 * n; ++j)
      o = std::max(o, std::abs(d[j] - d[start]));
    return o;
  };

  long successes = 0;
  std::vector<double> ratios;
  for (const auto& d : sup_d_by_path) {
    const double o_small = osc(d, i_small);
    const double o_large = osc(d, i_large);
    if (o_large <= o_small) ++successes;
    if (o_small > 0.0)
      ratios.push_back(o_large / o_small);
    else
      ratios.push_back(o_large == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  }
  const double fraction =
      static_cast<double>(successes) / static_cast<double>(sup_d_by_path.size());
  std::sort(ratios.begin(), ratios.end());
  const double median_ratio = ratios[ratios.size() / 2];

  TestReport r = make_report("as-convergence", fraction, pass_fraction,
                             TestReport::Cmp::GreaterEq,
                             "fraction of paths with osc(n_large) <= osc(n_small)");
  r.sample_sizes = {static_cast<long>(sup_d_by_path.size())};
  r.extras.emplace_back("n_small", static_cast<double>(checkpoints[i_small]));
  r.extras.emplace_back("n_large", static_cast<double>(checkpoints[i_large]));
  r.extras.emplace_back("median_osc_ratio", median_ratio);
  return r;
}

// ---------------------------------------------------------------------------
// Martingale-residual gap

GapEstimate theorem2_gap(const std::function<double(double)>& h, double u1, double u2,
                         long n, long reps, std::uint64_t master_seed,
                         std::uint64_t substream, std::vector<double>* out_residual_sq) {
  if (n < 1 || reps < 2) throw std::invalid_argument("theorem2_gap: need n >= 1, reps >= 2");
  const UnitGrid& grid = unit_grid();
  for (double t : grid.node) {
    const double v = h(t);
    if (!std::isfinite(v) || !(v >= 0.0))
      throw std::invalid_argument("theorem2_gap: h is not integrable on the grid");
  }
  const PriorSpec reference = PriorSpec::beta(u1, u2);
  std::vector<double> residual_sq(reps);
  for (long rep = 0; rep < reps; ++rep) {
    Rng rng(master_seed, static_cast<std::uint64_t>(rep), substream);
    const PathSample path = sample_exchangeable(reference, n, rng);
    long r = 0;
    for (int x : path.observations) r += x;
    const double v = path.theta[1];
    const double f = h(v);
    const double g = beta_expectation(h, u1 + static_cast<double>(r),
                                      u2 + static_cast<double>(n - r));
    residual_sq[rep] = (f - g) * (f - g);
  }
  GapEstimate e;
  e.n = n;
  e.gap = mean_of(residual_sq);
  e.n_gap = static_cast<double>(n) * e.gap;
  e.se = se_of_mean(residual_sq);
  e.reps = reps;
  if (out_residual_sq) *out_residual_sq = std::move(residual_sq);
  return e;
}

// ---------------------------------------------------------------------------
// c.i.d. diagnostic

TestReport cid_diagnostic(const UrnConfig& config, long prefix_n,
                          std::span<const int> target_set, long reps,
                          std::uint64_t master_seed, std::uint64_t substream) {
  if (prefix_n < 0 || prefix_n > 16)
    throw std::invalid_argument("cid_diagnostic: prefix length must lie in [0, 16]");
  if (reps < 1) throw std::invalid_argument("cid_diagnostic: reps >= 1 required");
  const int k = config.base_y.space().size();
  const long horizon = prefix_n + 2;

  auto in_target = [&](int y) {
    for (int t : target_set)
      if (t == y) return true;
    return false;
  };

  // bucket key -> paired indicator differences (1[Y_{n+1} in B] - 1[Y_{n+2} in B])
  std::vector<std::vector<double>> diffs;
  {
    long buckets = 1;
    for (long i = 0; i < prefix_n; ++i) buckets *= k;
    diffs.assign(static_cast<std::size_t>(buckets), {});
  }
  for (long rep = 0; rep < reps; ++rep) {
    Rng rng(master_seed, static_cast<std::uint64_t>(rep), substream);
    const PathSample path =
        sample_generalized_polya(config.alpha, config.base_y, config.weights, horizon, rng);
    long key = 0;
    for (long i = 0; i < prefix_n; ++i) key = key * k + path.observations[i];
    const double d = (in_target(path.observations[prefix_n]) ? 1.0 : 0.0) -
                     (in_target(path.observations[prefix_n + 1]) ? 1.0 : 0.0);
    diffs[key].push_back(d);
  }

  TestReport r;
  r.name = "cid-diagnostic";
  r.context = "max |P(Y_{n+1} in B | bucket) - P(Y_{n+2} in B | bucket)| in SE units";
  r.comparator = TestReport::Cmp::Less;
  r.threshold = 3.0;
  double max_z = 0.0;
  long used = 0;
  for (std::size_t key = 0; key < diffs.size(); ++key) {
    const auto& d = diffs[key];
    if (d.size() < 100) {
      if (!d.empty())
        r.warnings.push_back("bucket " + std::to_string(key) + " skipped (" +
                             std::to_string(d.size()) + " hits)");
      continue;
    }
    ++used;
    const double m = mean_of(d);
    const double se = se_of_mean(d);
    double z;
    if (se > 0.0)
      z = std::abs(m) / se;
    else
      z = m == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    max_z = std::max(max_z, z);
    r.extras.emplace_back("bucket_" + std::to_string(key) + "_diff", m);
    r.extras.emplace_back("bucket_" + std::to_string(key) + "_se", se);
    r.sample_sizes.push_back(static_cast<long>(d.size()));
  }
  if (used == 0)
    throw std::invalid_argument("cid_diagnostic: no bucket reached 100 hits");
  r.statistic = max_z;
  r.pass = comparator_holds(r.statistic, r.comparator, r.threshold);
  return r;
}

// ---------------------------------------------------------------------------
// Limit-variance ratio

TestReport variance_ratio_check(std::span<const double> c_samples,
                                std::span<const double> mu_hats,
                                const WeightLaw& weights, double tolerance) {
  if (c_samples.size() != mu_hats.size() || c_samples.empty())
    throw std::invalid_argument("variance_ratio_check: input size mismatch");
  const double target =
      weights.variance() / (weights.mean() * weights.mean());

  std::vector<double> xs(mu_hats.size());
  for (std::size_t i = 0; i < mu_hats.size(); ++i)
    xs[i] = mu_hats[i] * (1.0 - mu_hats[i]);

  TestReport r;
  r.name = "variance-ratio";
  r.comparator = TestReport::Cmp::Less;
  r.threshold = tolerance;
  r.sample_sizes = {static_cast<long>(c_samples.size())};

  const double x_mean = mean_of(xs);
  const double x_sd = se_of_mean(xs) * std::sqrt(static_cast<double>(xs.size()));
  double fitted;
  if (x_sd < 1e-9 * std::max(1.0, std::abs(x_mean))) {
    // Degenerate regressor spread: single-bin fallback.
    std::vector<double> ys(c_samples.size());
    for (std::size_t i = 0; i < c_samples.size(); ++i) ys[i] = c_samples[i] * c_samples[i];
    fitted = x_mean > 0.0 ? mean_of(ys) / x_mean : 0.0;
    r.warnings.push_back("degenerate mu_hat spread; single-bin ratio used");
  } else {
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += xs[i] * c_samples[i] * c_samples[i];
      sxx += xs[i] * xs[i];
    }
    fitted = sxy / sxx;
    // Heteroskedasticity-robust SE of the through-origin slope.
    double s2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double resid = c_samples[i] * c_samples[i] - fitted * xs[i];
      s2 += xs[i] * xs[i] * resid * resid;
    }
    r.se = std::sqrt(s2) / sxx;
  }
  r.extras.emplace_back("fitted_ratio", fitted);
  r.extras.emplace_back("target_ratio", target);
  r.context = target > 0.0 ? "relative error of fitted vs var(Z)/(EZ)^2"
                           : "fitted ratio (zero-variance weights)";
  r.statistic = target > 0.0 ? std::abs(fitted / target - 1.0) : fitted;
  r.pass = comparator_holds(r.statistic, r.comparator, r.threshold);
  return r;
}

}  // namespace cidlab
