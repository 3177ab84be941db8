#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cidlab {

// Deterministic stream RNG. Every (master_seed, replication, substream)
// triple owns an independent engine, so replication sets can be scheduled
// on any number of workers in any order and still reproduce bit-for-bit.
//
// All variates are derived from the engine through fixed algorithms below
// (never through std::*_distribution, whose output is implementation
// defined), so a given stream id yields the same draws on any platform.
class Rng {
 public:
  Rng(std::uint64_t master_seed, std::uint64_t replication,
      std::uint64_t substream = 0);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t replication() const { return replication_; }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01();
  double uniform(double a, double b);
  // Uniform on {0, ..., n-1}.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p);

  // Standard normal via the Marsaglia polar method.
  double normal();
  double normal(double mean, double sd);

  // Index drawn from a nonnegative mass vector (need not be normalized).
  int discrete(std::span<const double> masses);

  // Gamma(shape, 1) via Marsaglia-Tsang; Beta and Dirichlet from gammas.
  double gamma(double shape);
  double beta(double a, double b);
  std::vector<double> dirichlet(std::span<const double> alpha);

 private:
  std::uint64_t master_;
  std::uint64_t replication_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cidlab
