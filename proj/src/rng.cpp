#include "cidlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cidlab {

namespace {

std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t replication,
                            std::uint64_t substream) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master),
      static_cast<std::uint32_t>(master >> 32),
      static_cast<std::uint32_t>(replication),
      static_cast<std::uint32_t>(replication >> 32),
      static_cast<std::uint32_t>(substream),
      static_cast<std::uint32_t>(substream >> 32),
  };
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t master_seed, std::uint64_t replication,
         std::uint64_t substream)
    : master_(master_seed),
      replication_(replication),
      engine_(make_engine(master_seed, replication, substream)) {}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) {
  if (!(a <= b)) throw std::invalid_argument("uniform: requires a <= b");
  return a + (b - a) * uniform01();
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

int Rng::discrete(std::span<const double> masses) {
  if (masses.empty()) throw std::invalid_argument("discrete: empty mass vector");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("discrete: negative mass");
    total += m;
  }
  if (total <= 0.0) throw std::invalid_argument("discrete: zero total mass");
  double u = uniform01() * total;
  for (std::size_t i = 0; i + 1 < masses.size(); ++i) {
    u -= masses[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(masses.size() - 1);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
    const double g = gamma(shape + 1.0);
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  const double s = x + y;
  if (s <= 0.0) return 0.5;  // both underflowed; a,b astronomically small
  return x / s;
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
  if (alpha.empty()) throw std::invalid_argument("dirichlet: empty alpha");
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(alpha[i]);
    total += out[i];
  }
  if (total <= 0.0) {
    const double u = 1.0 / static_cast<double>(alpha.size());
    for (double& v : out) v = u;
    return out;
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace cidlab
