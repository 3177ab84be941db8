#include "cidlab/models.hpp"

#include <cmath>
#include <stdexcept>

namespace cidlab {

// ---------------------------------------------------------------------------
// WeightLaw

WeightLaw WeightLaw::constant(double z) { return discrete({z}, {1.0}); }

WeightLaw WeightLaw::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw std::invalid_argument("WeightLaw: values/probs size mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("WeightLaw: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("WeightLaw: probabilities must sum to 1 within 1e-12");
  WeightLaw w;
  w.values_ = std::move(values);
  w.probs_ = std::move(probs);
  for (double& p : w.probs_) p /= total;
  w.a_ = w.b_ = w.values_.front();
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < w.values_.size(); ++i) {
    const double z = w.values_[i];
    if (!(z > 0.0)) throw std::invalid_argument("WeightLaw: weights must be positive");
    w.a_ = std::min(w.a_, z);
    w.b_ = std::max(w.b_, z);
    m1 += w.probs_[i] * z;
    m2 += w.probs_[i] * z * z;
  }
  w.mean_ = m1;
  w.variance_ = std::max(0.0, m2 - m1 * m1);
  return w;
}

WeightLaw WeightLaw::uniform(double a, double b) {
  if (!(0.0 < a) || !(a <= b))
    throw std::invalid_argument("WeightLaw: requires 0 < a <= b");
  WeightLaw w;
  w.is_uniform_ = true;
  w.a_ = a;
  w.b_ = b;
  w.mean_ = 0.5 * (a + b);
  w.variance_ = (b - a) * (b - a) / 12.0;
  return w;
}

double WeightLaw::sample(Rng& rng) const {
  if (is_uniform_) return rng.uniform(a_, b_);
  if (values_.size() == 1) return values_[0];
  return values_[rng.discrete(probs_)];
}

// ---------------------------------------------------------------------------
// Samplers

PathSample sample_exchangeable(const PriorSpec& prior, long n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_exchangeable: n >= 1 required");
  PathSample path;
  path.model = ModelKind::Exchangeable;
  path.space = StateSpace::finite(prior.alphabet_size());
  path.seed = {rng.master_seed(), rng.replication()};
  path.theta = prior.sample_theta(rng);
  path.observations.reserve(n);
  for (long i = 0; i < n; ++i)
    path.observations.push_back(rng.discrete(path.theta));
  return path;
}

PathSample sample_ferguson_dirichlet(double alpha, const ProbabilityMeasure& base,
                                     long n, Rng& rng) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("sample_ferguson_dirichlet: alpha must be positive");
  if (base.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("sample_ferguson_dirichlet: base must be on a finite alphabet");
  if (n < 1) throw std::invalid_argument("sample_ferguson_dirichlet: n >= 1 required");
  PathSample path;
  path.model = ModelKind::FergusonDirichlet;
  path.space = base.space();
  path.seed = {rng.master_seed(), rng.replication()};
  const int k = base.space().size();
  std::vector<double> weights(k);
  std::vector<long> counts(k, 0);
  path.observations.reserve(n);
  for (long m = 0; m < n; ++m) {
    for (int i = 0; i < k; ++i)
      weights[i] = alpha * base.mass(i) + static_cast<double>(counts[i]);
    const int x = rng.discrete(weights);
    ++counts[x];
    path.observations.push_back(x);
  }
  return path;
}

PathSample sample_generalized_polya(double alpha, const ProbabilityMeasure& base_y,
                                    const WeightLaw& weights, long n, Rng& rng) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("sample_generalized_polya: alpha must be positive");
  if (base_y.space().kind() != SpaceKind::Finite)
    throw std::invalid_argument("sample_generalized_polya: base must be on a finite alphabet");
  if (n < 1) throw std::invalid_argument("sample_generalized_polya: n >= 1 required");
  PathSample path;
  path.model = ModelKind::GeneralizedPolya;
  path.space = base_y.space();
  path.seed = {rng.master_seed(), rng.replication()};
  const int k = base_y.space().size();
  std::vector<double> pred(k);
  std::vector<double> wcounts(k, 0.0);
  path.observations.reserve(n);
  path.weights.reserve(n);
  for (long m = 0; m < n; ++m) {
    // Z_{m+1} first: it is independent of the history and of Y_{m+1}.
    const double z = weights.sample(rng);
    for (int i = 0; i < k; ++i)
      pred[i] = alpha * base_y.mass(i) + wcounts[i];
    const int y = rng.discrete(pred);
    path.weights.push_back(z);
    path.observations.push_back(y);
    wcounts[y] += z;
  }
  return path;
}

}  // namespace cidlab
