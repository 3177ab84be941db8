#include <doctest.h>

#include <cmath>

#include "cidlab/rng.hpp"

using namespace cidlab;

TEST_CASE("streams are deterministic and replication-disjoint") {
  Rng a(42, 7, 0), b(42, 7, 0), c(42, 8, 0);
  bool all_equal = true, any_differs = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform01(), vb = b.uniform01(), vc = c.uniform01();
    all_equal = all_equal && va == vb;
    any_differs = any_differs || va != vc;
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("substreams are independent of draw order") {
  Rng path(3, 5, 0);
  for (int i = 0; i < 17; ++i) path.uniform01();
  Rng limit_after(3, 5, 1);
  Rng limit_fresh(3, 5, 1);
  CHECK(limit_after.uniform01() == limit_fresh.uniform01());
}

TEST_CASE("normal moments") {
  Rng rng(1, 0, 0);
  double s = 0.0, s2 = 0.0;
  const int m = 200000;
  for (int i = 0; i < m; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / m) < 0.01);
  CHECK(std::abs(s2 / m - 1.0) < 0.02);
}

TEST_CASE("beta and dirichlet moments") {
  Rng rng(2, 0, 0);
  double s = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) s += rng.beta(2.0, 2.0);
  CHECK(std::abs(s / m - 0.5) < 0.005);

  const std::vector<double> alpha{1.0, 2.0, 3.0};
  double s1 = 0.0;
  for (int i = 0; i < m; ++i) {
    const auto d = rng.dirichlet(alpha);
    CHECK(std::abs(d[0] + d[1] + d[2] - 1.0) < 1e-12);
    s1 += d[1];
  }
  CHECK(std::abs(s1 / m - 2.0 / 6.0) < 0.005);
}

TEST_CASE("discrete respects masses") {
  Rng rng(5, 0, 0);
  const std::vector<double> masses{0.2, 0.3, 0.5};
  std::vector<long> counts(3, 0);
  const int m = 100000;
  for (int i = 0; i < m; ++i) ++counts[rng.discrete(masses)];
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(static_cast<double>(counts[j]) / m - masses[j]) < 0.01);
  CHECK_THROWS(rng.discrete(std::vector<double>{}));
}

TEST_CASE("gamma shape below one") {
  Rng rng(6, 0, 0);
  double s = 0.0;
  const int m = 100000;
  for (int i = 0; i < m; ++i) s += rng.gamma(0.5);
  CHECK(std::abs(s / m - 0.5) < 0.01);
}
