#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cidlab/measure.hpp"
#include "cidlab/models.hpp"
#include "cidlab/predictive.hpp"
#include "cidlab/prior.hpp"
#include "cidlab/rng.hpp"

namespace cidlab {

// A deterministic rule mapping a history prefix to the exact predictive
// measure, bound to one of the three sequence models.
class PredictiveKernel {
 public:
  enum class Kind { Dirichlet, Mixture, Urn };

  static PredictiveKernel dirichlet(double alpha, ProbabilityMeasure base);
  static PredictiveKernel mixture(PriorSpec prior);
  static PredictiveKernel urn(double alpha, ProbabilityMeasure base_y);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const ProbabilityMeasure& base() const { return base_; }
  const PriorSpec& prior() const { return prior_; }

  // Predictive given the full prefix (history_z only used by urn kernels).
  ProbabilityMeasure evaluate(std::span<const int> history_y,
                              std::span<const double> history_z = {}) const;

 private:
  PredictiveKernel(Kind kind, double alpha, ProbabilityMeasure base, PriorSpec prior)
      : kind_(kind), alpha_(alpha), base_(std::move(base)), prior_(std::move(prior)) {}
  Kind kind_;
  double alpha_;
  ProbabilityMeasure base_;
  PriorSpec prior_;
};

// Source of the limit measure mu: the exact latent theta carried by mixture
// paths, or the long-horizon empirical plug-in for urn-type paths. The
// plug-in horizon must be at least 16x the largest checkpoint.
class LimitOracle {
 public:
  static LimitOracle exact_theta();
  static LimitOracle plug_in(long horizon);

  bool is_plug_in() const { return plug_in_; }
  long horizon() const { return horizon_; }
  const char* mode_name() const { return plug_in_ ? "plug-in" : "exact-theta"; }

 private:
  bool plug_in_ = false;
  long horizon_ = 0;
};

struct TrajectoryPoint {
  long n = 0;
  std::vector<double> c_values;  // C_n(B) per eval set
  std::vector<double> w_values;  // W_n(B) per eval set
  double sup_c = 0.0;            // sup over the whole class
  double sup_w = 0.0;
  double sup_d = 0.0;            // sqrt(n) * sup_c
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::vector<double> mu_values;  // oracle mu(B) per eval set
  SeedRecord path_seed;
  std::string oracle_mode;
};

// Walks the path once, evaluating mu_n, a_n and mu at each checkpoint:
// C_n(B) = sqrt(n){mu_n(B) - a_n(B)}, W_n(B) = sqrt(n){mu_n(B) - mu(B)}.
Trajectory compute_trajectory(const PathSample& path, const PredictiveKernel& kernel,
                              const LimitOracle& oracle, const SetClass& cls,
                              std::span<const long> checkpoints);

// Geometric grid 2^4 .. 2^12.
std::vector<long> default_checkpoints();

// Atom-mixture limit law: a centered Gaussian with variance theta(1-theta)
// when theta lies in the atom set, the point mass at zero otherwise.
double sample_limit_cor4(double theta, std::span<const double> atom_set, Rng& rng);

// Exact joint draw of a standard Brownian bridge at the given sorted times
// in [0,1] (Cholesky of Cov(G(s),G(t)) = min(s,t) - st; duplicated times and
// pinned endpoints make the covariance singular, which the PSD factorization
// handles exactly).
std::vector<double> sample_brownian_bridge(std::span<const double> times, Rng& rng);

struct LimitLawSample {
  std::vector<double> values;  // scaled bridge increments per set
  double sup_abs = 0.0;
};

// Limit law of the urn-model empirical process over a disjoint family:
// L(B_k) = (sd(Z)/EZ) * {G(T_k) - G(T_{k-1})} with T_k the cumulative
// mu-masses.
LimitLawSample sample_bridge_limit(std::span<const double> mu_masses,
                                   const WeightLaw& weights, Rng& rng);

}  // namespace cidlab
