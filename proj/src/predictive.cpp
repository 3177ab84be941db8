#include "cidlab/predictive.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cidlab/quadrature.hpp"

namespace cidlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// r*log(t) + (n-r)*log(1-t) with 0*log(0) = 0.
double bernoulli_loglik(double t, long r, long n) {
  double ll = 0.0;
  if (r > 0) ll += static_cast<double>(r) * std::log(t);
  if (n - r > 0) ll += static_cast<double>(n - r) * std::log1p(-t);
  return ll;
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed-form kernels

ProbabilityMeasure dirichlet_predictive(std::span<const int> history, double alpha,
                                        const ProbabilityMeasure& base) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("dirichlet_predictive: alpha must be positive");
  if (base.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("dirichlet_predictive: base must be on a finite alphabet");
  const int k = base.space().size();
  std::vector<double> mass(k);
  const double n = static_cast<double>(history.size());
  std::vector<long> counts(k, 0);
  for (int x : history) {
    if (x < 0 || x >= k)
      throw std::invalid_argument("dirichlet_predictive: observation outside space");
    ++counts[x];
  }
  for (int i = 0; i < k; ++i)
    mass[i] = (alpha * base.mass(i) + static_cast<double>(counts[i])) / (alpha + n);
  return ProbabilityMeasure::finite(std::move(mass));
}

ProbabilityMeasure urn_predictive(std::span<const int> history_y,
                                  std::span<const double> history_z, double alpha,
                                  const ProbabilityMeasure& base_y) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("urn_predictive: alpha must be positive");
  if (history_y.size() != history_z.size())
    throw std::invalid_argument("urn_predictive: Y and Z histories must have equal length");
  if (base_y.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("urn_predictive: base must be on a finite alphabet");
  const int k = base_y.space().size();
  std::vector<double> wcounts(k, 0.0);
  double wsum = 0.0;
  for (std::size_t i = 0; i < history_y.size(); ++i) {
    const int y = history_y[i];
    const double z = history_z[i];
    if (y < 0 || y >= k)
      throw std::invalid_argument("urn_predictive: observation outside space");
    if (!(z > 0.0))
      throw std::invalid_argument("urn_predictive: weights must be positive");
    wcounts[y] += z;
    wsum += z;
  }
  std::vector<double> mass(k);
  for (int i = 0; i < k; ++i)
    mass[i] = (alpha * base_y.mass(i) + wcounts[i]) / (alpha + wsum);
  return ProbabilityMeasure::finite(std::move(mass));
}

// ---------------------------------------------------------------------------
// PosteriorState

PosteriorState::PosteriorState(PriorSpec prior, int grid_nodes)
    : prior_(std::move(prior)), grid_nodes_(grid_nodes) {
  if (!prior_.is_binary())
    throw std::invalid_argument("PosteriorState: binary priors only");
}

void PosteriorState::observe(int x) {
  if (x != 0 && x != 1)
    throw std::invalid_argument("PosteriorState: observations must be 0 or 1");
  ++n_;
  if (x == 1) ++ones_;
}

PosteriorState::ComponentPosterior PosteriorState::component_posterior(
    std::size_t j) const {
  const auto& c = prior_.components()[j];
  const long r = ones_, n = n_;
  switch (c.kind) {
    case PriorSpec::ComponentKind::PointMass: {
      const double t = c.theta[1];
      return {bernoulli_loglik(t, r, n), t};
    }
    case PriorSpec::ComponentKind::Beta: {
      const double a = c.a + static_cast<double>(r);
      const double b = c.b + static_cast<double>(n - r);
      return {log_beta_fn(a, b) - log_beta_fn(c.a, c.b), a / (a + b)};
    }
    case PriorSpec::ComponentKind::Dirichlet: {
      // Binary Dirichlet(alpha0, alpha1) is Beta(alpha1, alpha0) on theta{1}.
      const double a = c.alpha[1] + static_cast<double>(r);
      const double b = c.alpha[0] + static_cast<double>(n - r);
      return {log_beta_fn(a, b) - log_beta_fn(c.alpha[1], c.alpha[0]), a / (a + b)};
    }
    case PriorSpec::ComponentKind::Density: {
      const UnitGrid& grid = unit_grid(grid_nodes_);
      const std::size_t m = grid.node.size();
      std::vector<double> lw(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double g = c.density(grid.node[i]);
        lw[i] = g > 0.0 ? grid.log_weight[i] + static_cast<double>(r) * grid.log_node[i] +
                              static_cast<double>(n - r) * grid.log1m_node[i] + std::log(g)
                        : kNegInf;
      }
      const double lse = log_sum_exp(lw);
      if (!std::isfinite(lse)) return {kNegInf, 0.0};
      double mean = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        if (lw[i] != kNegInf) mean += std::exp(lw[i] - lse) * grid.node[i];
      return {lse, mean};
    }
  }
  throw std::logic_error("PosteriorState: unreachable");
}

double PosteriorState::predictive_one() const {
  const auto& comps = prior_.components();
  std::vector<double> log_post(comps.size());
  std::vector<double> means(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto cp = component_posterior(j);
    log_post[j] =
        comps[j].weight > 0.0 ? std::log(comps[j].weight) + cp.log_marginal : kNegInf;
    means[j] = cp.mean_theta;
  }
  const double total = log_sum_exp(log_post);
  if (!std::isfinite(total))
    throw std::runtime_error("mixture_predictive: prior-inconsistent history");
  double mean = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j)
    if (log_post[j] != kNegInf) mean += std::exp(log_post[j] - total) * means[j];
  return mean;
}

double PosteriorState::atom_mass(double theta_one) const {
  const auto& comps = prior_.components();
  std::vector<double> log_post(comps.size());
  std::ptrdiff_t target = -1;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto cp = component_posterior(j);
    log_post[j] =
        comps[j].weight > 0.0 ? std::log(comps[j].weight) + cp.log_marginal : kNegInf;
    if (comps[j].kind == PriorSpec::ComponentKind::PointMass &&
        std::abs(comps[j].theta[1] - theta_one) <= 1e-12)
      target = static_cast<std::ptrdiff_t>(j);
  }
  if (target < 0)
    throw std::invalid_argument("posterior_atom_mass: theta is not an atom of the prior");
  const double total = log_sum_exp(log_post);
  if (!std::isfinite(total))
    throw std::runtime_error("posterior_atom_mass: prior-inconsistent history");
  return log_post[target] == kNegInf ? 0.0 : std::exp(log_post[target] - total);
}

double PosteriorState::continuous_mass() const {
  const auto& comps = prior_.components();
  std::vector<double> log_post(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto cp = component_posterior(j);
    log_post[j] =
        comps[j].weight > 0.0 ? std::log(comps[j].weight) + cp.log_marginal : kNegInf;
  }
  const double total = log_sum_exp(log_post);
  if (!std::isfinite(total))
    throw std::runtime_error("PosteriorState: prior-inconsistent history");
  double mass = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j)
    if (comps[j].kind != PriorSpec::ComponentKind::PointMass && log_post[j] != kNegInf)
      mass += std::exp(log_post[j] - total);
  return mass;
}

double PosteriorState::posterior_mean_of(const std::function<double(double)>& h) const {
  const auto& comps = prior_.components();
  const long r = ones_, n = n_;
  std::vector<double> log_post(comps.size());
  std::vector<double> hmeans(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto& c = comps[j];
    const auto cp = component_posterior(j);
    log_post[j] = c.weight > 0.0 ? std::log(c.weight) + cp.log_marginal : kNegInf;
    switch (c.kind) {
      case PriorSpec::ComponentKind::PointMass:
        hmeans[j] = h(c.theta[1]);
        break;
      case PriorSpec::ComponentKind::Beta:
        hmeans[j] = beta_expectation(h, c.a + static_cast<double>(r),
                                     c.b + static_cast<double>(n - r), grid_nodes_);
        break;
      case PriorSpec::ComponentKind::Dirichlet:
        hmeans[j] = beta_expectation(h, c.alpha[1] + static_cast<double>(r),
                                     c.alpha[0] + static_cast<double>(n - r), grid_nodes_);
        break;
      case PriorSpec::ComponentKind::Density: {
        const UnitGrid& grid = unit_grid(grid_nodes_);
        const std::size_t m = grid.node.size();
        std::vector<double> lw(m);
        for (std::size_t i = 0; i < m; ++i) {
          const double g = c.density(grid.node[i]);
          lw[i] = g > 0.0
                      ? grid.log_weight[i] + static_cast<double>(r) * grid.log_node[i] +
                            static_cast<double>(n - r) * grid.log1m_node[i] + std::log(g)
                      : kNegInf;
        }
        const double lse = log_sum_exp(lw);
        double mean = 0.0;
        if (std::isfinite(lse))
          for (std::size_t i = 0; i < m; ++i)
            if (lw[i] != kNegInf) mean += std::exp(lw[i] - lse) * h(grid.node[i]);
        hmeans[j] = mean;
        break;
      }
    }
  }
  const double total = log_sum_exp(log_post);
  if (!std::isfinite(total))
    throw std::runtime_error("PosteriorState: prior-inconsistent history");
  double mean = 0.0;
  for (std::size_t j = 0; j < comps.size(); ++j)
    if (log_post[j] != kNegInf) mean += std::exp(log_post[j] - total) * hmeans[j];
  return mean;
}

// ---------------------------------------------------------------------------
// Free functions

ProbabilityMeasure mixture_predictive(std::span<const int> history,
                                      const PriorSpec& prior) {
  PosteriorState state(prior);
  for (int x : history) state.observe(x);
  const double p = state.predictive_one();
  return ProbabilityMeasure::finite({1.0 - p, p});
}

double posterior_atom_mass(std::span<const int> history, const PriorSpec& prior,
                           double theta_one) {
  PosteriorState state(prior);
  for (int x : history) state.observe(x);
  return state.atom_mass(theta_one);
}

double beta_expectation(const std::function<double(double)>& h, double a, double b,
                        int grid_nodes) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("beta_expectation: parameters must be positive");
  const UnitGrid& grid = unit_grid(grid_nodes);
  const std::size_t m = grid.node.size();
  std::vector<double> lw(m);
  for (std::size_t i = 0; i < m; ++i)
    lw[i] = grid.log_weight[i] + (a - 1.0) * grid.log_node[i] +
            (b - 1.0) * grid.log1m_node[i];
  const double lse = log_sum_exp(lw);
  double mean = 0.0;
  for (std::size_t i = 0; i < m; ++i) mean += std::exp(lw[i] - lse) * h(grid.node[i]);
  return mean;
}

}  // namespace cidlab
