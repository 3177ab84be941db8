#include "cidlab/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cidlab {

// ---------------------------------------------------------------------------
// PredictiveKernel

PredictiveKernel PredictiveKernel::dirichlet(double alpha, ProbabilityMeasure base) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("PredictiveKernel: alpha must be positive");
  if (base.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("PredictiveKernel: base must be on a finite alphabet");
  return PredictiveKernel(Kind::Dirichlet, alpha, std::move(base),
                          PriorSpec::beta(1.0, 1.0));
}

PredictiveKernel PredictiveKernel::mixture(PriorSpec prior) {
  if (!prior.is_binary())
    throw std::invalid_argument("PredictiveKernel: mixture kernels are binary-only");
  return PredictiveKernel(Kind::Mixture, 0.0, ProbabilityMeasure::finite_uniform(2),
                          std::move(prior));
}

PredictiveKernel PredictiveKernel::urn(double alpha, ProbabilityMeasure base_y) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("PredictiveKernel: alpha must be positive");
  if (base_y.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("PredictiveKernel: base must be on a finite alphabet");
  return PredictiveKernel(Kind::Urn, alpha, std::move(base_y),
                          PriorSpec::beta(1.0, 1.0));
}

ProbabilityMeasure PredictiveKernel::evaluate(std::span<const int> history_y,
                                              std::span<const double> history_z) const {
  switch (kind_) {
    case Kind::Dirichlet:
      return dirichlet_predictive(history_y, alpha_, base_);
    case Kind::Mixture:
      return mixture_predictive(history_y, prior_);
    case Kind::Urn:
      return urn_predictive(history_y, history_z, alpha_, base_);
  }
  throw std::logic_error("PredictiveKernel: unreachable");
}

// ---------------------------------------------------------------------------
// LimitOracle

LimitOracle LimitOracle::exact_theta() { return LimitOracle{}; }

LimitOracle LimitOracle::plug_in(long horizon) {
  if (horizon < 1) throw std::invalid_argument("LimitOracle: horizon must be >= 1");
  LimitOracle o;
  o.plug_in_ = true;
  o.horizon_ = horizon;
  return o;
}

// ---------------------------------------------------------------------------
// compute_trajectory

std::vector<long> default_checkpoints() {
  std::vector<long> ns;
  for (long n = 16; n <= 4096; n *= 2) ns.push_back(n);
  return ns;
}

Trajectory compute_trajectory(const PathSample& path, const PredictiveKernel& kernel,
                              const LimitOracle& oracle, const SetClass& cls,
                              std::span<const long> checkpoints) {
  if (checkpoints.empty())
    throw std::invalid_argument("compute_trajectory: no checkpoints");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
    throw std::invalid_argument("compute_trajectory: checkpoints must be ascending");
  const long n_max = checkpoints.back();
  if (checkpoints.front() < 1 || n_max > path.n())
    throw std::invalid_argument("compute_trajectory: checkpoints must lie in [1, path length]");
  if (!cls.compatible_with(path.space))
    throw std::invalid_argument("compute_trajectory: class incompatible with path space");
  const int k = path.space.size();

  // The limit measure mu.
  ProbabilityMeasure mu = ProbabilityMeasure::finite_uniform(k);
  if (oracle.is_plug_in()) {
    if (oracle.horizon() > path.n())
      throw std::invalid_argument("compute_trajectory: plug-in horizon exceeds path length");
    if (oracle.horizon() < 16 * n_max)
      throw std::invalid_argument(
          "compute_trajectory: plug-in horizon must be >= 16x the largest checkpoint");
    std::span<const int> head(path.observations.data(),
                              static_cast<std::size_t>(oracle.horizon()));
    mu = empirical_measure(head, path.space).measure();
  } else {
    if (path.theta.empty())
      throw std::invalid_argument(
          "compute_trajectory: exact-theta oracle requires a latent theta");
    mu = ProbabilityMeasure::finite(path.theta);
  }

  if (kernel.kind() == PredictiveKernel::Kind::Urn &&
      path.weights.size() != path.observations.size())
    throw std::invalid_argument("compute_trajectory: urn kernel needs per-step weights");
  if (kernel.kind() == PredictiveKernel::Kind::Mixture && k != 2)
    throw std::invalid_argument("compute_trajectory: mixture kernel is binary-only");

  Trajectory traj;
  traj.path_seed = path.seed;
  traj.oracle_mode = oracle.mode_name();
  const auto& eval_sets = cls.eval_sets();
  for (const auto& member : eval_sets) traj.mu_values.push_back(mu.mass_of(member));

  std::vector<long> counts(k, 0);
  std::vector<double> wcounts(k, 0.0);
  double wsum = 0.0;
  PosteriorState posterior(kernel.prior());

  std::size_t next = 0;
  for (long i = 0; i < n_max; ++i) {
    const int x = path.observations[i];
    ++counts[x];
    if (kernel.kind() == PredictiveKernel::Kind::Urn) {
      wcounts[x] += path.weights[i];
      wsum += path.weights[i];
    } else if (kernel.kind() == PredictiveKernel::Kind::Mixture) {
      posterior.observe(x);
    }
    const long n = i + 1;
    if (next >= checkpoints.size() || checkpoints[next] != n) continue;
    ++next;

    std::vector<double> mu_n(k);
    for (int j = 0; j < k; ++j)
      mu_n[j] = static_cast<double>(counts[j]) / static_cast<double>(n);
    std::vector<double> a_n(k);
    switch (kernel.kind()) {
      case PredictiveKernel::Kind::Dirichlet:
        for (int j = 0; j < k; ++j)
          a_n[j] = (kernel.alpha() * kernel.base().mass(j) + static_cast<double>(counts[j])) /
                   (kernel.alpha() + static_cast<double>(n));
        break;
      case PredictiveKernel::Kind::Urn:
        for (int j = 0; j < k; ++j)
          a_n[j] = (kernel.alpha() * kernel.base().mass(j) + wcounts[j]) /
                   (kernel.alpha() + wsum);
        break;
      case PredictiveKernel::Kind::Mixture: {
        const double p = posterior.predictive_one();
        a_n[0] = 1.0 - p;
        a_n[1] = p;
        break;
      }
    }
    const auto mu_n_measure = ProbabilityMeasure::finite(mu_n);
    const auto a_n_measure = ProbabilityMeasure::finite(a_n);

    TrajectoryPoint pt;
    pt.n = n;
    const double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t s = 0; s < eval_sets.size(); ++s) {
      const auto& member = eval_sets[s];
      const double mn = mu_n_measure.mass_of(member);
      pt.c_values.push_back(root_n * (mn - a_n_measure.mass_of(member)));
      pt.w_values.push_back(root_n * (mn - traj.mu_values[s]));
    }
    pt.sup_c = root_n * sup_distance(mu_n_measure, a_n_measure, cls);
    pt.sup_w = root_n * sup_distance(mu_n_measure, mu, cls);
    pt.sup_d = root_n * pt.sup_c;
    traj.points.push_back(std::move(pt));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Limit laws

double sample_limit_cor4(double theta, std::span<const double> atom_set, Rng& rng) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("sample_limit_cor4: theta must lie in [0,1]");
  bool in_atoms = false;
  for (double a : atom_set)
    if (std::abs(a - theta) <= 1e-12) {
      in_atoms = true;
      break;
    }
  if (!in_atoms) return 0.0;
  const double var = theta * (1.0 - theta);
  return var > 0.0 ? rng.normal(0.0, std::sqrt(var)) : 0.0;
}

namespace {

// Lower Cholesky of a PSD matrix; zero pivots (singular directions) get a
// zero column, which reproduces the degenerate Gaussian exactly.
std::vector<std::vector<double>> cholesky_psd(const std::vector<std::vector<double>>& a) {
  const std::size_t m = a.size();
  std::vector<std::vector<double>> l(m, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    double d = a[j][j];
    for (std::size_t t = 0; t < j; ++t) d -= l[j][t] * l[j][t];
    if (d > 1e-14) {
      l[j][j] = std::sqrt(d);
      for (std::size_t i = j + 1; i < m; ++i) {
        double s = a[i][j];
        for (std::size_t t = 0; t < j; ++t) s -= l[i][t] * l[j][t];
        l[i][j] = s / l[j][j];
      }
    }  // else: zero pivot, column stays zero
  }
  return l;
}

}  // namespace

std::vector<double> sample_brownian_bridge(std::span<const double> times, Rng& rng) {
  const std::size_t m = times.size();
  if (!std::is_sorted(times.begin(), times.end()))
    throw std::invalid_argument("sample_brownian_bridge: times must be nondecreasing");
  for (double t : times)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("sample_brownian_bridge: times must lie in [0,1]");
  std::vector<std::vector<double>> cov(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      cov[i][j] = std::min(times[i], times[j]) - times[i] * times[j];
  const auto l = cholesky_psd(cov);
  std::vector<double> z(m);
  for (double& v : z) v = rng.normal();
  std::vector<double> g(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) g[i] += l[i][j] * z[j];
  return g;
}

LimitLawSample sample_bridge_limit(std::span<const double> mu_masses,
                                   const WeightLaw& weights, Rng& rng) {
  double total = 0.0;
  for (double p : mu_masses) {
    if (!(p >= 0.0))
      throw std::invalid_argument("sample_bridge_limit: masses must be nonnegative");
    total += p;
  }
  if (total > 1.0 + 1e-12)
    throw std::invalid_argument("sample_bridge_limit: masses must sum to at most 1");
  std::vector<double> times;
  times.reserve(mu_masses.size());
  double t = 0.0;
  for (double p : mu_masses) {
    t = std::min(1.0, t + p);
    times.push_back(t);
  }
  const double scale =
      weights.mean() > 0.0 ? std::sqrt(weights.variance()) / weights.mean() : 0.0;
  const auto g = sample_brownian_bridge(times, rng);
  LimitLawSample out;
  double prev = 0.0;
  for (double gv : g) {
    const double v = scale * (gv - prev);
    prev = gv;
    out.values.push_back(v);
    out.sup_abs = std::max(out.sup_abs, std::abs(v));
  }
  return out;
}

}  // namespace cidlab
