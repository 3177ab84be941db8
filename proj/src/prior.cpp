#include "cidlab/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cidlab/measure.hpp"
#include "cidlab/quadrature.hpp"

namespace cidlab {

namespace {

void check_theta(const std::vector<double>& theta) {
  if (theta.size() < 2)
    throw std::invalid_argument("PriorSpec: theta needs an alphabet of size >= 2");
  double total = 0.0;
  for (double m : theta) {
    if (!(m >= 0.0) || m > 1.0 + ProbabilityMeasure::kMassTolerance)
      throw std::invalid_argument("PriorSpec: atom location outside the simplex");
    total += m;
  }
  if (std::abs(total - 1.0) > ProbabilityMeasure::kMassTolerance)
    throw std::invalid_argument("PriorSpec: atom masses must sum to 1 within 1e-12");
}

}  // namespace

PriorSpec PriorSpec::point_mass(std::vector<double> theta) {
  check_theta(theta);
  PriorSpec p;
  p.alphabet_size_ = static_cast<int>(theta.size());
  Component c;
  c.kind = ComponentKind::PointMass;
  c.theta = std::move(theta);
  p.components_.push_back(std::move(c));
  p.validate_and_finalize();
  return p;
}

PriorSpec PriorSpec::point_mass_binary(double p1) {
  return point_mass({1.0 - p1, p1});
}

PriorSpec PriorSpec::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("PriorSpec: Beta parameters must be positive");
  PriorSpec p;
  p.alphabet_size_ = 2;
  Component c;
  c.kind = ComponentKind::Beta;
  c.a = a;
  c.b = b;
  p.components_.push_back(std::move(c));
  p.validate_and_finalize();
  return p;
}

PriorSpec PriorSpec::dirichlet(std::vector<double> alpha) {
  if (alpha.size() < 2)
    throw std::invalid_argument("PriorSpec: Dirichlet needs an alphabet of size >= 2");
  for (double a : alpha)
    if (!(a > 0.0))
      throw std::invalid_argument("PriorSpec: Dirichlet parameters must be positive");
  PriorSpec p;
  p.alphabet_size_ = static_cast<int>(alpha.size());
  Component c;
  c.kind = ComponentKind::Dirichlet;
  c.alpha = std::move(alpha);
  p.components_.push_back(std::move(c));
  p.validate_and_finalize();
  return p;
}

PriorSpec PriorSpec::density(std::function<double(double)> g) {
  if (!g) throw std::invalid_argument("PriorSpec: null density");
  PriorSpec p;
  p.alphabet_size_ = 2;
  Component c;
  c.kind = ComponentKind::Density;
  c.density = std::move(g);
  p.components_.push_back(std::move(c));
  p.validate_and_finalize();
  return p;
}

PriorSpec PriorSpec::mixture(std::vector<std::pair<double, PriorSpec>> parts) {
  if (parts.empty()) throw std::invalid_argument("PriorSpec: empty mixture");
  PriorSpec p;
  p.alphabet_size_ = parts.front().second.alphabet_size_;
  for (auto& [w, part] : parts) {
    if (!(w >= 0.0)) throw std::invalid_argument("PriorSpec: negative mixture weight");
    if (part.alphabet_size_ != p.alphabet_size_)
      throw std::invalid_argument("PriorSpec: mixture parts on different alphabets");
    for (Component c : part.components_) {
      c.weight *= w;
      p.components_.push_back(std::move(c));
    }
  }
  p.validate_and_finalize();
  return p;
}

void PriorSpec::validate_and_finalize() {
  double total = 0.0;
  for (const Component& c : components_) total += c.weight;
  if (std::abs(total - 1.0) > ProbabilityMeasure::kMassTolerance)
    throw std::invalid_argument("PriorSpec: mixture weights must sum to 1 within 1e-12");
  for (Component& c : components_) c.weight /= total;

  cum_tables_.assign(components_.size(), {});
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const Component& c = components_[j];
    if (c.kind != ComponentKind::Density) continue;
    if (!is_binary())
      throw std::invalid_argument("PriorSpec: density components are binary-only");
    // Midpoint cumulative table on kInverseCdfCells cells; the density is
    // only ever evaluated at interior points.
    auto& cum = cum_tables_[j].cum;
    cum.assign(kInverseCdfCells + 1, 0.0);
    const double h = 1.0 / kInverseCdfCells;
    for (int i = 0; i < kInverseCdfCells; ++i) {
      const double g = c.density((i + 0.5) * h);
      if (!(g >= 0.0) || !std::isfinite(g))
        throw std::invalid_argument("PriorSpec: density must be finite and nonnegative");
      cum[i + 1] = cum[i] + g * h;
    }
    if (!(cum.back() > 0.0))
      throw std::invalid_argument("PriorSpec: density integrates to zero");
  }
}

bool PriorSpec::purely_atomic() const {
  return std::all_of(components_.begin(), components_.end(), [](const Component& c) {
    return c.kind == ComponentKind::PointMass;
  });
}

std::vector<double> PriorSpec::atom_locations_binary() const {
  if (!is_binary())
    throw std::logic_error("PriorSpec: atom_locations_binary on non-binary prior");
  std::vector<double> locs;
  for (const Component& c : components_)
    if (c.kind == ComponentKind::PointMass) locs.push_back(c.theta[1]);
  return locs;
}

std::vector<double> PriorSpec::sample_theta(Rng& rng) const {
  std::vector<double> weights;
  weights.reserve(components_.size());
  for (const Component& c : components_) weights.push_back(c.weight);
  const int j = rng.discrete(weights);
  const Component& c = components_[j];
  switch (c.kind) {
    case ComponentKind::PointMass:
      return c.theta;
    case ComponentKind::Beta: {
      const double t = rng.beta(c.a, c.b);
      return {1.0 - t, t};
    }
    case ComponentKind::Dirichlet:
      return rng.dirichlet(c.alpha);
    case ComponentKind::Density: {
      const auto& cum = cum_tables_[j].cum;
      const double u = rng.uniform01() * cum.back();
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      const int cell = std::max<int>(1, static_cast<int>(it - cum.begin()));
      const int k = std::min(cell, kInverseCdfCells);
      const double lo = cum[k - 1], hi = cum[k];
      const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
      const double t = (static_cast<double>(k - 1) + frac) / kInverseCdfCells;
      return {1.0 - t, t};
    }
  }
  throw std::logic_error("PriorSpec: unreachable");
}

PriorSpec PriorSpec::size_biased() const {
  if (!is_binary())
    throw std::logic_error("PriorSpec: size_biased on non-binary prior");
  std::vector<std::pair<double, PriorSpec>> parts;
  for (const Component& c : components_) {
    switch (c.kind) {
      case ComponentKind::PointMass: {
        if (c.theta[1] > 0.0)
          parts.emplace_back(c.weight * c.theta[1], point_mass(c.theta));
        break;
      }
      case ComponentKind::Beta: {
        // E[theta] = a/(a+b); theta-weighting maps Beta(a,b) -> Beta(a+1,b).
        parts.emplace_back(c.weight * c.a / (c.a + c.b), beta(c.a + 1.0, c.b));
        break;
      }
      case ComponentKind::Dirichlet: {
        const double total = c.alpha[0] + c.alpha[1];
        std::vector<double> alpha = c.alpha;
        alpha[1] += 1.0;
        parts.emplace_back(c.weight * c.alpha[1] / total, dirichlet(std::move(alpha)));
        break;
      }
      case ComponentKind::Density: {
        const auto g = c.density;
        // Normalizer E[theta] under g, on the fixed quadrature grid.
        const UnitGrid& grid = unit_grid();
        double mean = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < grid.node.size(); ++i) {
          const double v = grid.weight[i] * g(grid.node[i]);
          norm += v;
          mean += grid.node[i] * v;
        }
        if (mean > 0.0)
          parts.emplace_back(c.weight * mean / norm,
                             density([g](double t) { return t * g(t); }));
        break;
      }
    }
  }
  if (parts.empty())
    throw std::invalid_argument("PriorSpec: size-biased prior is degenerate (theta{1} = 0 a.s.)");
  // Renormalize: mixture() requires outer weights summing to 1.
  double total = 0.0;
  for (const auto& [w, _] : parts) total += w;
  for (auto& [w, _] : parts) w /= total;
  return mixture(std::move(parts));
}

}  // namespace cidlab
