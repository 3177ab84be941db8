#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cidlab/measure.hpp"
#include "cidlab/prior.hpp"
#include "cidlab/rng.hpp"

namespace cidlab {

enum class ModelKind { Exchangeable, FergusonDirichlet, GeneralizedPolya };

struct SeedRecord {
  std::uint64_t master = 0;
  std::uint64_t replication = 0;
};

// One simulated trajectory with its latent ground truth: theta for mixture
// models, realized reinforcement weights for the urn model.
struct PathSample {
  ModelKind model = ModelKind::Exchangeable;
  StateSpace space = StateSpace::finite(2);
  std::vector<int> observations;  // Y for the urn model
  std::vector<double> weights;    // Z, urn model only
  std::vector<double> theta;      // latent mass vector, mixture model only
  SeedRecord seed;

  long n() const { return static_cast<long>(observations.size()); }
};

// Law of the i.i.d. reinforcement weights Z with bounded support
// 0 < a <= Z <= b: either a finite discrete law or Uniform(a, b).
// Mean and variance are recomputed from the support description at
// construction.
class WeightLaw {
 public:
  static WeightLaw constant(double z);
  static WeightLaw discrete(std::vector<double> values, std::vector<double> probs);
  static WeightLaw uniform(double a, double b);

  double lower() const { return a_; }
  double upper() const { return b_; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  double sample(Rng& rng) const;

 private:
  WeightLaw() = default;
  bool is_uniform_ = false;
  std::vector<double> values_, probs_;
  double a_ = 0.0, b_ = 0.0, mean_ = 0.0, variance_ = 0.0;
};

// Draws theta from the prior, then n i.i.d. observations from theta.
// theta is recorded in the latent block.
PathSample sample_exchangeable(const PriorSpec& prior, long n, Rng& rng);

// Sequential draw from the Ferguson-Dirichlet predictive
// a_m = (alpha*base + m*mu_m) / (alpha + m). No latent theta.
PathSample sample_ferguson_dirichlet(double alpha, const ProbabilityMeasure& base,
                                     long n, Rng& rng);

// Generalized Polya urn: Z_{m+1} i.i.d. from the weight law, then Y_{m+1}
// from the weighted-reinforcement predictive
// (alpha*base + sum Z_i 1[Y_i = .]) / (alpha + sum Z_i).
PathSample sample_generalized_polya(double alpha, const ProbabilityMeasure& base_y,
                                    const WeightLaw& weights, long n, Rng& rng);

}  // namespace cidlab
