#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cidlab/rng.hpp"

namespace cidlab {

// Prior over the parameter theta of an i.i.d. finite-alphabet model;
// theta is the mass vector of the single-observation law. Supported
// components: point masses (atoms), conjugate Beta/Dirichlet families,
// and, for the binary case, an arbitrary density on (0,1) for
// theta{1}. A PriorSpec is a mixture of such components.
class PriorSpec {
 public:
  enum class ComponentKind { PointMass, Beta, Dirichlet, Density };

  struct Component {
    ComponentKind kind;
    double weight = 1.0;
    std::vector<double> theta;             // PointMass: mass vector
    double a = 0.0, b = 0.0;               // Beta(a, b) on theta{1}
    std::vector<double> alpha;             // Dirichlet concentration
    std::function<double(double)> density; // on (0,1), binary only
  };

  static PriorSpec point_mass(std::vector<double> theta);
  // Binary convenience: point mass at theta{1} = p.
  static PriorSpec point_mass_binary(double p);
  static PriorSpec beta(double a, double b);
  static PriorSpec dirichlet(std::vector<double> alpha);
  static PriorSpec density(std::function<double(double)> g);
  static PriorSpec mixture(std::vector<std::pair<double, PriorSpec>> parts);

  int alphabet_size() const { return alphabet_size_; }
  bool is_binary() const { return alphabet_size_ == 2; }
  const std::vector<Component>& components() const { return components_; }

  // True when every component is a point mass (the purely atomic case).
  bool purely_atomic() const;
  // theta{1} locations of the atom components (binary only).
  std::vector<double> atom_locations_binary() const;

  // Exact draw of theta: atoms directly, Beta/Dirichlet via gamma draws,
  // densities via inverse CDF on a 4096-point cumulative grid with linear
  // interpolation.
  std::vector<double> sample_theta(Rng& rng) const;

  // The theta{1}-size-biased prior: d(pi')/d(pi) proportional to theta{1}.
  // This is the conditional prior given a first observation equal to 1.
  // Binary only.
  PriorSpec size_biased() const;

 private:
  PriorSpec() = default;
  void validate_and_finalize();

  int alphabet_size_ = 0;
  std::vector<Component> components_;
  // Per-density-component cumulative tables for inverse-CDF sampling.
  struct CumTable {
    std::vector<double> cum;  // size kInverseCdfCells + 1, cum[0] = 0
  };
  std::vector<CumTable> cum_tables_;  // parallel to components_ (empty slots
                                      // for non-density components)
  static constexpr int kInverseCdfCells = 4096;
};

}  // namespace cidlab
