#include "cidlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cidlab {

// ---------------------------------------------------------------------------
// StateSpace

StateSpace StateSpace::finite(int size) {
  if (size < 2) throw std::invalid_argument("StateSpace: finite alphabet needs size >= 2");
  std::vector<std::string> labels(size);
  for (int i = 0; i < size; ++i) labels[i] = std::to_string(i);
  return StateSpace(SpaceKind::Finite, std::move(labels));
}

StateSpace StateSpace::finite(std::vector<std::string> labels) {
  if (labels.size() < 2) throw std::invalid_argument("StateSpace: finite alphabet needs size >= 2");
  return StateSpace(SpaceKind::Finite, std::move(labels));
}

StateSpace StateSpace::real_line() { return StateSpace(SpaceKind::RealLine, {}); }

int StateSpace::size() const {
  if (kind_ != SpaceKind::Finite) throw std::logic_error("StateSpace: size() on real line");
  return static_cast<int>(labels_.size());
}

bool StateSpace::contains(int label) const {
  return kind_ == SpaceKind::Finite && label >= 0 &&
         label < static_cast<int>(labels_.size());
}

bool StateSpace::contains_real(double x) const {
  return kind_ == SpaceKind::RealLine && std::isfinite(x);
}

// ---------------------------------------------------------------------------
// ProbabilityMeasure

namespace {

// Renormalize a total within kMassTolerance of 1; reject anything worse.
void normalize_total(std::vector<double>& masses, double extra = 0.0) {
  double total = extra;
  for (double m : masses) {
    if (!(m >= 0.0)) throw std::invalid_argument("ProbabilityMeasure: negative mass");
    total += m;
  }
  if (std::abs(total - 1.0) > ProbabilityMeasure::kMassTolerance)
    throw std::invalid_argument("ProbabilityMeasure: masses must sum to 1 within 1e-12");
  if (total != 1.0 && total > 0.0)
    for (double& m : masses) m /= total;
}

}  // namespace

ProbabilityMeasure ProbabilityMeasure::finite(std::vector<double> masses) {
  normalize_total(masses);
  ProbabilityMeasure p(StateSpace::finite(static_cast<int>(masses.size())));
  p.masses_ = std::move(masses);
  return p;
}

ProbabilityMeasure ProbabilityMeasure::finite_uniform(int size) {
  return finite(std::vector<double>(size, 1.0 / size));
}

ProbabilityMeasure ProbabilityMeasure::real_atomic(std::vector<Atom> atoms) {
  return real_mixed(std::move(atoms), 0.0, {});
}

ProbabilityMeasure ProbabilityMeasure::real_mixed(
    std::vector<Atom> atoms, double continuous_weight,
    std::function<double(double)> continuous_cdf) {
  if (continuous_weight < 0.0)
    throw std::invalid_argument("ProbabilityMeasure: negative continuous weight");
  if (continuous_weight > 0.0 && !continuous_cdf)
    throw std::invalid_argument("ProbabilityMeasure: continuous weight without a CDF");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.location < b.location; });
  // Merge duplicate locations so cdf_left sees one jump per point.
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!(a.mass >= 0.0)) throw std::invalid_argument("ProbabilityMeasure: negative mass");
    if (!std::isfinite(a.location))
      throw std::invalid_argument("ProbabilityMeasure: non-finite atom location");
    if (!merged.empty() && merged.back().location == a.location)
      merged.back().mass += a.mass;
    else
      merged.push_back(a);
  }
  std::vector<double> masses;
  masses.reserve(merged.size());
  for (const Atom& a : merged) masses.push_back(a.mass);
  normalize_total(masses, continuous_weight);
  for (std::size_t i = 0; i < merged.size(); ++i) merged[i].mass = masses[i];

  ProbabilityMeasure p(StateSpace::real_line());
  p.atoms_ = std::move(merged);
  p.continuous_weight_ = continuous_weight;
  p.continuous_cdf_ = std::move(continuous_cdf);
  return p;
}

const std::vector<double>& ProbabilityMeasure::masses() const {
  if (space_.kind() != SpaceKind::Finite)
    throw std::logic_error("ProbabilityMeasure: masses() on real-line measure");
  return masses_;
}

double ProbabilityMeasure::mass(int label) const {
  if (!space_.contains(label))
    throw std::invalid_argument("ProbabilityMeasure: label outside space");
  return masses_[label];
}

double ProbabilityMeasure::mass_of(std::span<const int> subset) const {
  double total = 0.0;
  for (int label : subset) total += mass(label);
  return total;
}

double ProbabilityMeasure::cdf(double t) const {
  if (space_.kind() != SpaceKind::RealLine)
    throw std::logic_error("ProbabilityMeasure: cdf() on finite measure");
  double f = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location > t) break;
    f += a.mass;
  }
  if (continuous_weight_ > 0.0) f += continuous_weight_ * continuous_cdf_(t);
  return f;
}

double ProbabilityMeasure::cdf_left(double t) const {
  if (space_.kind() != SpaceKind::RealLine)
    throw std::logic_error("ProbabilityMeasure: cdf_left() on finite measure");
  double f = 0.0;
  for (const Atom& a : atoms_) {
    if (a.location >= t) break;
    f += a.mass;
  }
  // A continuous CDF has no jump: F_c(t-) = F_c(t).
  if (continuous_weight_ > 0.0) f += continuous_weight_ * continuous_cdf_(t);
  return f;
}

// ---------------------------------------------------------------------------
// SetClass

SetClass SetClass::all_subsets(int alphabet_size) {
  if (alphabet_size < 2) throw std::invalid_argument("SetClass: alphabet size >= 2 required");
  SetClass c(SetClassKind::AllSubsets, alphabet_size);
  for (int i = 0; i < alphabet_size; ++i) c.eval_sets_.push_back({i});
  return c;
}

SetClass SetClass::singletons(int alphabet_size) {
  if (alphabet_size < 2) throw std::invalid_argument("SetClass: alphabet size >= 2 required");
  SetClass c(SetClassKind::Singletons, alphabet_size);
  for (int i = 0; i < alphabet_size; ++i) c.eval_sets_.push_back({i});
  return c;
}

SetClass SetClass::half_lines() { return SetClass(SetClassKind::HalfLines, -1); }

SetClass SetClass::disjoint_family(std::vector<std::vector<int>> members,
                                   int alphabet_size) {
  if (members.empty()) throw std::invalid_argument("SetClass: empty family");
  std::vector<bool> used(alphabet_size, false);
  for (const auto& m : members) {
    for (int label : m) {
      if (label < 0 || label >= alphabet_size)
        throw std::invalid_argument("SetClass: family member outside alphabet");
      if (used[label])
        throw std::invalid_argument("SetClass: family members must be pairwise disjoint");
      used[label] = true;
    }
  }
  SetClass c(SetClassKind::DisjointFamily, alphabet_size);
  c.eval_sets_ = std::move(members);
  return c;
}

bool SetClass::compatible_with(const StateSpace& space) const {
  if (kind_ == SetClassKind::HalfLines) return space.kind() == SpaceKind::RealLine;
  return space.kind() == SpaceKind::Finite && space.size() == alphabet_size_;
}

// ---------------------------------------------------------------------------
// sup_distance

namespace {

void require_compatible(const ProbabilityMeasure& p, const ProbabilityMeasure& q,
                        const SetClass& cls) {
  if (!(p.space() == q.space()))
    throw std::invalid_argument("sup_distance: measures on different spaces");
  if (!cls.compatible_with(p.space()))
    throw std::invalid_argument("sup_distance: class incompatible with space");
}

double half_line_sup(const ProbabilityMeasure& p, const ProbabilityMeasure& q) {
  double sup = 0.0;
  auto visit = [&](double t) {
    sup = std::max(sup, std::abs(p.cdf(t) - q.cdf(t)));
    sup = std::max(sup, std::abs(p.cdf_left(t) - q.cdf_left(t)));
  };
  for (const Atom& a : p.atoms()) visit(a.location);
  for (const Atom& a : q.atoms()) visit(a.location);
  return sup;
}

}  // namespace

double sup_distance(const ProbabilityMeasure& p, const ProbabilityMeasure& q,
                    const SetClass& cls) {
  require_compatible(p, q, cls);
  switch (cls.kind()) {
    case SetClassKind::AllSubsets: {
      // sup over all subsets = (1/2) L1: the maximizing set is {i : p_i > q_i}.
      double l1 = 0.0;
      for (int i = 0; i < cls.alphabet_size(); ++i)
        l1 += std::abs(p.mass(i) - q.mass(i));
      return 0.5 * l1;
    }
    case SetClassKind::Singletons: {
      double sup = 0.0;
      for (int i = 0; i < cls.alphabet_size(); ++i)
        sup = std::max(sup, std::abs(p.mass(i) - q.mass(i)));
      return sup;
    }
    case SetClassKind::DisjointFamily: {
      double sup = 0.0;
      for (const auto& member : cls.eval_sets())
        sup = std::max(sup, std::abs(p.mass_of(member) - q.mass_of(member)));
      return sup;
    }
    case SetClassKind::HalfLines:
      return half_line_sup(p, q);
  }
  throw std::logic_error("sup_distance: unreachable");
}

// ---------------------------------------------------------------------------
// EmpiricalMeasure

EmpiricalMeasure::EmpiricalMeasure(std::span<const int> prefix,
                                   const StateSpace& space)
    : space_(space), n_(static_cast<long>(prefix.size())) {
  if (prefix.empty())
    throw std::invalid_argument("empirical_measure: undefined for n=0");
  if (space.kind() != SpaceKind::Finite)
    throw std::invalid_argument("empirical_measure: integer prefix needs a finite space");
  counts_.assign(space.size(), 0);
  for (int x : prefix) {
    if (!space.contains(x))
      throw std::invalid_argument("empirical_measure: point outside space");
    ++counts_[x];
  }
}

EmpiricalMeasure::EmpiricalMeasure(std::span<const double> prefix)
    : space_(StateSpace::real_line()), n_(static_cast<long>(prefix.size())) {
  if (prefix.empty())
    throw std::invalid_argument("empirical_measure: undefined for n=0");
  sorted_.assign(prefix.begin(), prefix.end());
  for (double x : sorted_)
    if (!std::isfinite(x))
      throw std::invalid_argument("empirical_measure: point outside space");
  std::sort(sorted_.begin(), sorted_.end());
}

const std::vector<long>& EmpiricalMeasure::counts() const {
  if (space_.kind() != SpaceKind::Finite)
    throw std::logic_error("EmpiricalMeasure: counts() on real-line sample");
  return counts_;
}

const std::vector<double>& EmpiricalMeasure::sorted_sample() const {
  if (space_.kind() != SpaceKind::RealLine)
    throw std::logic_error("EmpiricalMeasure: sorted_sample() on finite sample");
  return sorted_;
}

ProbabilityMeasure EmpiricalMeasure::measure() const {
  if (space_.kind() == SpaceKind::Finite) {
    std::vector<double> masses(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i)
      masses[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
    return ProbabilityMeasure::finite(std::move(masses));
  }
  std::vector<Atom> atoms;
  const double w = 1.0 / static_cast<double>(n_);
  for (double x : sorted_) atoms.push_back({x, w});
  return ProbabilityMeasure::real_atomic(std::move(atoms));
}

EmpiricalMeasure empirical_measure(std::span<const int> prefix,
                                   const StateSpace& space) {
  return EmpiricalMeasure(prefix, space);
}

EmpiricalMeasure empirical_measure(std::span<const double> prefix) {
  return EmpiricalMeasure(prefix);
}

}  // namespace cidlab
