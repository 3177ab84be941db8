#include <doctest.h>

#include <cmath>

#include "cidlab/models.hpp"
#include "cidlab/stats.hpp"

using namespace cidlab;

TEST_CASE("weight law moments and validation") {
  const auto u = WeightLaw::uniform(1.0, 2.0);
  CHECK(u.mean() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(u.variance() == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  const auto d = WeightLaw::discrete({1.0, 2.0}, {0.5, 0.5});
  CHECK(d.mean() == doctest::Approx(1.5));
  CHECK(d.variance() == doctest::Approx(0.25));
  CHECK(d.lower() == 1.0);
  CHECK(d.upper() == 2.0);
  CHECK_THROWS(WeightLaw::uniform(0.0, 1.0));
  CHECK_THROWS(WeightLaw::discrete({-1.0}, {1.0}));
  CHECK_THROWS(WeightLaw::discrete({1.0, 2.0}, {0.7, 0.7}));
}

TEST_CASE("exchangeable sampler under a degenerate prior") {
  Rng rng(21, 0, 0);
  const auto prior = PriorSpec::point_mass_binary(0.3);
  const auto path = sample_exchangeable(prior, 100000, rng);
  CHECK(path.theta[1] == 0.3);
  long ones = 0;
  for (int x : path.observations) ones += x;
  CHECK(std::abs(static_cast<double>(ones) / 100000.0 - 0.3) < 0.005);

  Rng rng2(21, 1, 0);
  const auto all_ones = sample_exchangeable(PriorSpec::point_mass_binary(1.0), 50, rng2);
  for (int x : all_ones.observations) CHECK(x == 1);
}

TEST_CASE("uniform prior gives P(X1 = 1) = 1/2") {
  long ones = 0;
  const long reps = 100000;
  const auto prior = PriorSpec::beta(1.0, 1.0);
  for (long r = 0; r < reps; ++r) {
    Rng rng(22, static_cast<std::uint64_t>(r), 0);
    ones += sample_exchangeable(prior, 1, rng).observations[0];
  }
  CHECK(std::abs(static_cast<double>(ones) / reps - 0.5) < 0.005);
}

TEST_CASE("ferguson-dirichlet first draw follows the base") {
  const auto base = ProbabilityMeasure::finite({0.2, 0.8});
  long ones = 0;
  const long reps = 20000;
  for (long r = 0; r < reps; ++r) {
    Rng rng(23, static_cast<std::uint64_t>(r), 0);
    ones += sample_ferguson_dirichlet(1.0, base, 1, rng).observations[0];
  }
  const double se = std::sqrt(0.2 * 0.8 / reps);
  CHECK(std::abs(static_cast<double>(ones) / reps - 0.8) < 3.0 * se);
  Rng rng(23, 0, 0);
  CHECK_THROWS(sample_ferguson_dirichlet(0.0, base, 1, rng));
  CHECK_THROWS(sample_ferguson_dirichlet(-1.0, base, 1, rng));
}

TEST_CASE("large alpha pins the empirical law to the base") {
  const auto base = ProbabilityMeasure::finite({0.25, 0.75});
  double worst = 0.0;
  for (long r = 0; r < 1000; ++r) {
    Rng rng(24, static_cast<std::uint64_t>(r), 0);
    const auto path = sample_ferguson_dirichlet(1e6, base, 100, rng);
    long ones = 0;
    for (int x : path.observations) ones += x;
    worst = std::max(worst, std::abs(static_cast<double>(ones) / 100.0 - 0.75));
  }
  // Binomial(100, 0.75) noise dominates; 0.01 applies to the mean deviation.
  double total = 0.0;
  for (long r = 0; r < 1000; ++r) {
    Rng rng(24, static_cast<std::uint64_t>(r), 0);
    const auto path = sample_ferguson_dirichlet(1e6, base, 100, rng);
    long ones = 0;
    for (int x : path.observations) ones += x;
    total += static_cast<double>(ones) / 100.0;
  }
  CHECK(std::abs(total / 1000.0 - 0.75) < 0.01);
}

TEST_CASE("urn sampler records weights within bounds and first draw is the base") {
  const auto base = ProbabilityMeasure::finite_uniform(2);
  const auto law = WeightLaw::uniform(1.0, 2.0);
  Rng rng(25, 0, 0);
  const auto path = sample_generalized_polya(1.0, base, law, 500, rng);
  CHECK(path.weights.size() == 500);
  for (double z : path.weights) {
    CHECK(z >= 1.0);
    CHECK(z <= 2.0);
  }
  long ones = 0;
  const long reps = 20000;
  for (long r = 0; r < reps; ++r) {
    Rng rr(25, static_cast<std::uint64_t>(r), 0);
    ones += sample_generalized_polya(1.0, base, law, 1, rr).observations[0];
  }
  CHECK(std::abs(static_cast<double>(ones) / reps - 0.5) < 3.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("exchangeability: patterns (1,0) and (0,1) are equally likely") {
  const auto prior = PriorSpec::beta(2.0, 2.0);
  long n10 = 0, n01 = 0;
  const long reps = 100000;
  for (long r = 0; r < reps; ++r) {
    Rng rng(26, static_cast<std::uint64_t>(r), 0);
    const auto path = sample_exchangeable(prior, 2, rng);
    if (path.observations[0] == 1 && path.observations[1] == 0) ++n10;
    if (path.observations[0] == 0 && path.observations[1] == 1) ++n01;
  }
  const double diff = static_cast<double>(n10 - n01) / reps;
  const double se = std::sqrt(0.4 / reps);  // crude bound on the paired variance
  CHECK(std::abs(diff) < 3.0 * se);
}

TEST_CASE("ferguson-dirichlet matches the Dirichlet-prior mixture") {
  // de Finetti cross-check on a three-letter alphabet at n = 200.
  const auto base = ProbabilityMeasure::finite_uniform(3);
  const double alpha = 2.0;
  const long reps = 2000, n = 200;
  std::vector<double> fd(reps), mix(reps);
  const auto prior = PriorSpec::dirichlet({alpha / 3.0, alpha / 3.0, alpha / 3.0});
  for (long r = 0; r < reps; ++r) {
    Rng rng_fd(27, static_cast<std::uint64_t>(r), 0);
    const auto a = sample_ferguson_dirichlet(alpha, base, n, rng_fd);
    long ones = 0;
    for (int x : a.observations) ones += x == 1;
    fd[r] = static_cast<double>(ones) / n;
    Rng rng_mix(27, static_cast<std::uint64_t>(r), 1);
    const auto b = sample_exchangeable(prior, n, rng_mix);
    ones = 0;
    for (int x : b.observations) ones += x == 1;
    mix[r] = static_cast<double>(ones) / n;
  }
  CHECK(ks_two_sample(fd, mix) < 0.06);
}

TEST_CASE("unit-weight urn reproduces the Ferguson-Dirichlet law") {
  const auto base = ProbabilityMeasure::finite_uniform(2);
  const auto unit = WeightLaw::constant(1.0);
  const long reps = 2000, n = 200;
  std::vector<double> urn(reps), fd(reps);
  for (long r = 0; r < reps; ++r) {
    Rng ru(28, static_cast<std::uint64_t>(r), 0);
    const auto pu = sample_generalized_polya(1.0, base, unit, n, ru);
    long ones = 0;
    for (int y : pu.observations) ones += y;
    urn[r] = static_cast<double>(ones) / n;
    Rng rf(28, static_cast<std::uint64_t>(r), 1);
    const auto pf = sample_ferguson_dirichlet(1.0, base, n, rf);
    ones = 0;
    for (int y : pf.observations) ones += y;
    fd[r] = static_cast<double>(ones) / n;
  }
  CHECK(ks_two_sample(urn, fd) < 0.05);
}

TEST_CASE("identical seeds reproduce paths byte for byte") {
  const auto base = ProbabilityMeasure::finite_uniform(2);
  const auto law = WeightLaw::discrete({1.0, 2.0}, {0.5, 0.5});
  Rng a(31, 4, 0), b(31, 4, 0);
  const auto pa = sample_generalized_polya(1.0, base, law, 300, a);
  const auto pb = sample_generalized_polya(1.0, base, law, 300, b);
  CHECK(pa.observations == pb.observations);
  CHECK(pa.weights == pb.weights);
  CHECK(pa.seed.master == 31);
  CHECK(pa.seed.replication == 4);

  Rng c(31, 4, 0), d(31, 4, 0);
  const auto prior = PriorSpec::beta(2.0, 2.0);
  const auto pc = sample_exchangeable(prior, 64, c);
  const auto pd = sample_exchangeable(prior, 64, d);
  CHECK(pc.theta == pd.theta);
  CHECK(pc.observations == pd.observations);
}

TEST_CASE("size-biased prior transform") {
  // Beta(2,2) size-biased is Beta(3,2): mean 0.6.
  const auto sb = PriorSpec::beta(2.0, 2.0).size_biased();
  double s = 0.0;
  const int m = 100000;
  Rng rng(33, 0, 0);
  for (int i = 0; i < m; ++i) s += sb.sample_theta(rng)[1];
  CHECK(std::abs(s / m - 0.6) < 0.005);

  // Atom at zero is killed by the theta-weighting.
  const auto atoms = PriorSpec::mixture({{0.5, PriorSpec::point_mass_binary(0.0)},
                                         {0.5, PriorSpec::point_mass_binary(0.5)}});
  const auto sb_atoms = atoms.size_biased();
  for (int i = 0; i < 50; ++i) CHECK(sb_atoms.sample_theta(rng)[1] == 0.5);

  // Density 2t size-biased has density 3t^2, mean 3/4.
  const auto sb_density =
      PriorSpec::density([](double t) { return 2.0 * t; }).size_biased();
  s = 0.0;
  for (int i = 0; i < m; ++i) s += sb_density.sample_theta(rng)[1];
  CHECK(std::abs(s / m - 0.75) < 0.005);

  CHECK_THROWS(PriorSpec::point_mass_binary(0.0).size_biased());
}

TEST_CASE("prior validation") {
  CHECK_THROWS(PriorSpec::point_mass({0.5, 0.6}));
  CHECK_THROWS(PriorSpec::beta(0.0, 1.0));
  CHECK_THROWS(PriorSpec::mixture({{0.5, PriorSpec::beta(1, 1)},
                                   {0.6, PriorSpec::beta(1, 1)}}));
  CHECK_THROWS(PriorSpec::density([](double) { return -1.0; }));
  Rng rng(32, 0, 0);
  CHECK_THROWS(sample_exchangeable(PriorSpec::beta(1, 1), 0, rng));
}
