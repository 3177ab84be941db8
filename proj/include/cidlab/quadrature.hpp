#pragma once

#include <span>
#include <vector>

namespace cidlab {

// Fixed deterministic quadrature rule on (0,1): composite two-point
// Gauss-Legendre over node_count/2 uniform cells. Endpoints are never
// evaluated, so densities with integrable endpoint singularities are fine.
struct UnitGrid {
  std::vector<double> node;
  std::vector<double> weight;
  std::vector<double> log_node;    // log(t_i)
  std::vector<double> log1m_node;  // log(1 - t_i)
  std::vector<double> log_weight;
};

// Cached grids; node_count must be even. 4096 is the production size,
// 8192 exists for grid-doubling stability checks.
const UnitGrid& unit_grid(int node_count = 4096);

// log of sum_i exp(log_terms[i]); -inf-safe.
double log_sum_exp(std::span<const double> log_terms);

}  // namespace cidlab
