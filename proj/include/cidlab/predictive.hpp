#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cidlab/measure.hpp"
#include "cidlab/prior.hpp"

namespace cidlab {

// (alpha*base + n*mu_n) / (alpha + n); the empty history returns base.
ProbabilityMeasure dirichlet_predictive(std::span<const int> history, double alpha,
                                        const ProbabilityMeasure& base);

// (alpha*base_y + sum_i z_i 1[y_i = .]) / (alpha + sum_i z_i).
ProbabilityMeasure urn_predictive(std::span<const int> history_y,
                                  std::span<const double> history_z, double alpha,
                                  const ProbabilityMeasure& base_y);

// Incremental posterior for a binary mixture model. Likelihood products
// theta^r (1-theta)^(n-r) are accumulated in log space; density components
// are integrated on the fixed quadrature grid with log-sum-exp
// normalization.
class PosteriorState {
 public:
  explicit PosteriorState(PriorSpec prior, int grid_nodes = 4096);

  void observe(int x);  // x in {0, 1}
  long n() const { return n_; }
  long ones() const { return ones_; }

  // a_n{1} = posterior mean of theta{1}. Throws "prior-inconsistent
  // history" when every component has likelihood zero.
  double predictive_one() const;

  // Posterior probability of the point-mass component at theta{1} = t
  // (error when t is not an atom of the prior).
  double atom_mass(double theta_one) const;
  // Posterior mass of the non-atomic (Beta/Dirichlet/density) part.
  double continuous_mass() const;

  // Posterior mean of an arbitrary h(theta{1}).
  double posterior_mean_of(const std::function<double(double)>& h) const;

  const PriorSpec& prior() const { return prior_; }

 private:
  struct ComponentPosterior {
    double log_marginal;  // log integral theta^r (1-theta)^(n-r) d(component)
    double mean_theta;    // posterior mean of theta{1} within the component
  };
  ComponentPosterior component_posterior(std::size_t j) const;

  PriorSpec prior_;
  int grid_nodes_;
  long n_ = 0;
  long ones_ = 0;
};

// Posterior-mean predictive mass of {1} for a binary history under the
// mixture prior: conjugate path for Beta components, exact sums for atoms,
// log-space quadrature for density components.
ProbabilityMeasure mixture_predictive(std::span<const int> history,
                                      const PriorSpec& prior);

// Posterior probability that theta{1} equals the given prior atom.
double posterior_atom_mass(std::span<const int> history, const PriorSpec& prior,
                           double theta_one);

// E[h(V)] for V ~ Beta(a, b), on the fixed quadrature grid (log-space
// weights, so large parameters are fine).
double beta_expectation(const std::function<double(double)>& h, double a, double b,
                        int grid_nodes = 4096);

}  // namespace cidlab
