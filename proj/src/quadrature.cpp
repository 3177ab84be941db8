#include "cidlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace cidlab {

namespace {

UnitGrid build_grid(int node_count) {
  if (node_count < 2 || node_count % 2 != 0)
    throw std::invalid_argument("unit_grid: node count must be even and >= 2");
  const int cells = node_count / 2;
  const double h = 1.0 / cells;
  // Two-point Gauss-Legendre nodes at cell centers +- h/(2*sqrt(3)),
  // each with weight h/2.
  const double off = h / (2.0 * std::sqrt(3.0));
  UnitGrid g;
  g.node.reserve(node_count);
  for (int c = 0; c < cells; ++c) {
    const double mid = (c + 0.5) * h;
    g.node.push_back(mid - off);
    g.node.push_back(mid + off);
  }
  g.weight.assign(node_count, h / 2.0);
  g.log_node.reserve(node_count);
  g.log1m_node.reserve(node_count);
  g.log_weight.reserve(node_count);
  for (int i = 0; i < node_count; ++i) {
    g.log_node.push_back(std::log(g.node[i]));
    g.log1m_node.push_back(std::log1p(-g.node[i]));
    g.log_weight.push_back(std::log(g.weight[i]));
  }
  return g;
}

}  // namespace

const UnitGrid& unit_grid(int node_count) {
  static std::mutex mu;
  static std::map<int, UnitGrid> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(node_count);
  if (it == cache.end()) it = cache.emplace(node_count, build_grid(node_count)).first;
  return it->second;
}

double log_sum_exp(std::span<const double> log_terms) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : log_terms)
    if (t > m) m = t;
  if (!std::isfinite(m)) return m;  // all -inf (or some +inf/nan propagates)
  double s = 0.0;
  for (double t : log_terms) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace cidlab
