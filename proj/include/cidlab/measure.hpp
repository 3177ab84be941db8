#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cidlab {

enum class SpaceKind { Finite, RealLine };

// Finite alphabet {0, ..., size-1} with display labels, or the real line.
class StateSpace {
 public:
  static StateSpace finite(int size);
  static StateSpace finite(std::vector<std::string> labels);
  static StateSpace real_line();

  SpaceKind kind() const { return kind_; }
  int size() const;  // finite only
  const std::vector<std::string>& labels() const { return labels_; }

  bool contains(int label) const;
  bool contains_real(double x) const;

  // Spaces are interchangeable when kind and cardinality agree.
  friend bool operator==(const StateSpace& a, const StateSpace& b) {
    return a.kind_ == b.kind_ && a.labels_.size() == b.labels_.size();
  }

 private:
  StateSpace(SpaceKind kind, std::vector<std::string> labels)
      : kind_(kind), labels_(std::move(labels)) {}
  SpaceKind kind_;
  std::vector<std::string> labels_;
};

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

// A probability on a finite alphabet (mass vector) or on the real line
// (sorted atoms plus an optional continuous piece given by its CDF).
// Immutable after construction; construction renormalizes total-mass
// deviations below 1e-12 and rejects anything larger.
class ProbabilityMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  static ProbabilityMeasure finite(std::vector<double> masses);
  static ProbabilityMeasure finite_uniform(int size);
  static ProbabilityMeasure real_atomic(std::vector<Atom> atoms);
  static ProbabilityMeasure real_mixed(std::vector<Atom> atoms,
                                       double continuous_weight,
                                       std::function<double(double)> continuous_cdf);

  const StateSpace& space() const { return space_; }

  // Finite-alphabet accessors.
  const std::vector<double>& masses() const;
  double mass(int label) const;
  double mass_of(std::span<const int> subset) const;

  // Real-line accessors. cdf_left(t) = F(t-).
  double cdf(double t) const;
  double cdf_left(double t) const;
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool has_continuous_part() const { return continuous_weight_ > 0.0; }

 private:
  explicit ProbabilityMeasure(StateSpace space) : space_(std::move(space)) {}

  StateSpace space_;
  std::vector<double> masses_;        // finite case
  std::vector<Atom> atoms_;           // real-line case, sorted by location
  double continuous_weight_ = 0.0;    // real-line case
  std::function<double(double)> continuous_cdf_;
};

enum class SetClassKind { AllSubsets, Singletons, HalfLines, DisjointFamily };

// A class of measurable sets with a canonical countable subclass realizing
// the sup-distance: all subsets / singletons of a finite alphabet, half-lines
// (-inf, t] on the real line, or an explicit pairwise-disjoint family.
class SetClass {
 public:
  static SetClass all_subsets(int alphabet_size);
  static SetClass singletons(int alphabet_size);
  static SetClass half_lines();
  // members are label lists; must be pairwise disjoint.
  static SetClass disjoint_family(std::vector<std::vector<int>> members,
                                  int alphabet_size);

  SetClassKind kind() const { return kind_; }
  int alphabet_size() const { return alphabet_size_; }
  bool compatible_with(const StateSpace& space) const;

  // Finite family recorded per trajectory checkpoint. For AllSubsets this is
  // the singleton list (the sup itself is still over every subset).
  const std::vector<std::vector<int>>& eval_sets() const { return eval_sets_; }

 private:
  SetClass(SetClassKind kind, int alphabet_size)
      : kind_(kind), alphabet_size_(alphabet_size) {}
  SetClassKind kind_;
  int alphabet_size_;  // -1 for half-lines
  std::vector<std::vector<int>> eval_sets_;
};

// sup_{B in D0} |p(B) - q(B)|.
//
// AllSubsets uses the half-L1 identity sup = (1/2) * sum_i |p_i - q_i|;
// Singletons/DisjointFamily take the max over members; HalfLines evaluates
// |F_p - F_q| at every atom location of p and q together with its left
// limit, which attains the sup whenever at least one side is purely atomic
// (the empirical-vs-model cases this library produces).
double sup_distance(const ProbabilityMeasure& p, const ProbabilityMeasure& q,
                    const SetClass& cls);

// Counts per label (finite) or sorted sample (real line).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(std::span<const int> prefix, const StateSpace& space);
  explicit EmpiricalMeasure(std::span<const double> prefix);

  long n() const { return n_; }
  const StateSpace& space() const { return space_; }
  const std::vector<long>& counts() const;
  const std::vector<double>& sorted_sample() const;

  // The induced probability measure (mass c_i/n, or atoms at sample points).
  ProbabilityMeasure measure() const;

 private:
  StateSpace space_;
  long n_;
  std::vector<long> counts_;
  std::vector<double> sorted_;
};

EmpiricalMeasure empirical_measure(std::span<const int> prefix,
                                   const StateSpace& space);
EmpiricalMeasure empirical_measure(std::span<const double> prefix);

}  // namespace cidlab
