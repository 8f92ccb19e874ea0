#include <cmath>
#include <random>

#include "doctest.h"
#include "rdesign/error.hpp"
#include "rdesign/sampling.hpp"
#include "test_util.hpp"

using namespace rdesign;
using doctest::Approx;

TEST_CASE("draw_counts examples") {
  Rng rng(1);
  CHECK(draw_counts(DesignWeights(Vector{1, 0}), 5, rng).counts == std::vector<std::uint64_t>{5, 0});
  CHECK(draw_counts(DesignWeights(Vector{0, 1}), 5, rng).counts == std::vector<std::uint64_t>{0, 5});
  const auto zero = draw_counts(uniform_design(3), 0, rng);
  CHECK(zero.counts == std::vector<std::uint64_t>{0, 0, 0});
  CHECK(zero.n == 0);
  // Binomial(1e5, 1/2): 1000 away from the mean is 6.3 sigma.
  const auto big = draw_counts(uniform_design(2), 100000, rng);
  CHECK(big.n == 100000);
  CHECK(big.counts[0] >= 49000);
  CHECK(big.counts[0] <= 51000);
}

TEST_CASE("draw_counts is deterministic by seed") {
  Rng a(77), b(77);
  const auto mu = DesignWeights(Vector{0.1, 0.2, 0.3, 0.4});
  CHECK(draw_counts(mu, 1000, a) == draw_counts(mu, 1000, b));
}

TEST_CASE("empirical frequencies converge") {
  Rng rng(3);
  const Vector w{0.05, 0.15, 0.3, 0.5};
  const std::uint64_t n = 1000000;
  const auto c = draw_counts(DesignWeights(w), n, rng);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double freq = double(c.counts[k]) / double(n);
    CHECK(std::abs(freq - w[k]) <= 5.0 * std::sqrt(w[k] * (1 - w[k]) / double(n)) + 1e-6);
  }
}

TEST_CASE("realized_info examples") {
  const auto c2 = ExperimentPool::canonical(2);
  const SymMatrix s = realized_info(c2, SampleCounts({2, 3}));
  CHECK(testutil::max_abs_diff(s, SymMatrix::diagonal(Vector{2, 3})) < 1e-15);
  CHECK(realized_info(c2, SampleCounts({0, 0})).max_abs() == 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  const SymMatrix t = realized_info(ExperimentPool(2, {{1, 0}, {r, r}}), SampleCounts({1, 2}));
  CHECK(t(0, 0) == Approx(2.0));
  CHECK(t(0, 1) == Approx(1.0));
  CHECK(t(1, 1) == Approx(1.0));
  CHECK_THROWS_AS(realized_info(c2, SampleCounts({1, 2, 3})), InvalidInput);
}

TEST_CASE("realized_info equals the explicit count-weighted sum") {
  Rng rng(5);
  const auto pool = testutil::random_pool(9, 4, rng);
  const auto counts = draw_counts(testutil::random_weights(9, rng), 500, rng);
  SymMatrix ref(4);
  for (std::size_t k = 0; k < 9; ++k)
    for (std::uint64_t i = 0; i < counts.counts[k]; ++i) ref.add_outer(pool.row(k));
  CHECK(testutil::max_abs_diff(realized_info(pool, counts), ref) <= 1e-9 * ref.max_abs());
}

TEST_CASE("score_realized examples") {
  const auto c2 = ExperimentPool::canonical(2);
  const auto uni = uniform_design(2);
  auto s = score_realized(c2, SampleCounts({3, 3}), uni);
  CHECK(s.ratio_E == Approx(1.0));
  CHECK(s.ratio_G == Approx(1.0));
  s = score_realized(c2, SampleCounts({3, 1}), uni);
  CHECK(s.ratio_E == Approx(2.0));  // (1/2 * 4) / 1
  CHECK(s.ratio_G == Approx(2.0));  // max(1/3, 1) * 4 / 2
  CHECK_THROWS_AS(score_realized(c2, SampleCounts({4, 0}), uni), Singular);
  CHECK_THROWS_AS(score_realized(c2, SampleCounts({0, 0}), uni), Singular);
}

TEST_CASE("ratios against solver optima are at least one up to tolerance") {
  Rng rng(7);
  const auto pool = testutil::random_pool(20, 3, rng);
  const auto e = solve_E_relaxed(pool, 1e-8);
  const auto g = solve_G_relaxed(pool, 1e-8);
  for (int t = 0; t < 200; ++t) {
    const auto ce = draw_counts(e.weights, 60, rng);
    const auto cg = draw_counts(g.weights, 60, rng);
    try {
      CHECK(score_realized(pool, ce, e.weights).ratio_E >= 1.0 - (e.certificate_gap + 1e-9) / e.objective);
    } catch (const Singular&) {
    }
    try {
      CHECK(score_realized(pool, cg, g.weights).ratio_G >= 1.0 - 1e-9);
    } catch (const Singular&) {
    }
  }
}

TEST_CASE("replicate with one trial is draw then score") {
  Rng seed_rng(9);
  const auto pool = testutil::random_pool(8, 3, seed_rng);
  const auto mu = testutil::random_weights(8, seed_rng);
  const auto r = replicate(pool, mu, 40, 1, 1234);
  Rng rng = make_rng(split_seed(1234, 0));
  const auto s = score_realized(pool, draw_counts(mu, 40, rng), mu);
  REQUIRE(r.size() == 1);
  CHECK_FALSE(r[0].censored);
  CHECK(r[0].ratio_E == s.ratio_E);
  CHECK(r[0].ratio_G == s.ratio_G);
}

TEST_CASE("replicate censors singular trials") {
  const auto r = replicate(ExperimentPool::canonical(2), DesignWeights(Vector{1, 0}), 10, 50, 1);
  for (const auto& t : r) {
    CHECK(t.censored);
    CHECK(std::isnan(t.ratio_E));
  }
  CHECK_THROWS_AS(replicate(ExperimentPool::canonical(2), uniform_design(2), 10, 0, 1), InvalidInput);
}

TEST_CASE("replicate is reproducible and index-ordered") {
  Rng seed_rng(11);
  const auto pool = testutil::random_pool(12, 4, seed_rng);
  const auto mu = uniform_design(12);
  const auto a = replicate(pool, mu, 30, 300, 99);
  const auto b = replicate(pool, mu, 30, 300, 99);
  const auto head = replicate(pool, mu, 30, 50, 99);
  for (std::size_t t = 0; t < a.size(); ++t) {
    REQUIRE(a[t].censored == b[t].censored);
    if (!a[t].censored) REQUIRE(a[t].ratio_E == b[t].ratio_E);
  }
  // A shorter run is a prefix of a longer one.
  for (std::size_t t = 0; t < head.size(); ++t)
    if (!head[t].censored) REQUIRE(head[t].ratio_G == a[t].ratio_G);
}

TEST_CASE("replicate mean ratio_E matches a scalar binomial simulation") {
  // Canonical R^2 with uniform mu: lambda_min(S_n) = min(k, n - k), k ~ Bin(n, 1/2).
  const std::uint64_t n = 100;
  const std::size_t trials = 10000;
  const auto r = replicate(ExperimentPool::canonical(2), uniform_design(2), n, trials, 2024);
  double mean = 0.0;
  for (const auto& t : r) {
    REQUIRE_FALSE(t.censored);
    mean += t.ratio_E / double(trials);
  }
  CHECK(mean >= 1.0);
  CHECK(mean <= 1.5);

  std::mt19937_64 oracle_rng(555);
  std::binomial_distribution<int> bin(int(n), 0.5);
  double oracle = 0.0, sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int k = bin(oracle_rng);
    const double v = 0.5 * double(n) / double(std::min<int>(k, int(n) - k));
    oracle += v / double(trials);
    sq += v * v / double(trials);
  }
  const double se = std::sqrt((sq - oracle * oracle) / double(trials));
  CHECK(std::abs(mean - oracle) < 5.0 * std::sqrt(2.0) * se);
}

TEST_CASE("average realized matrix approaches n M(mu)") {
  Rng rng(13);
  const auto pool = testutil::random_pool(10, 3, rng);
  const auto mu = testutil::random_weights(10, rng);
  const std::uint64_t n = 50;
  const int trials = 4000;
  const SymMatrix target = info_matrix(pool, mu) * double(n);
  SymMatrix avg(3), sq(3);
  for (int t = 0; t < trials; ++t) {
    const SymMatrix s = realized_info(pool, draw_counts(mu, n, rng));
    avg += s * (1.0 / trials);
    std::vector<double> e2(9);
    for (std::size_t i = 0; i < 9; ++i) e2[i] = s.data()[i] * s.data()[i] / trials;
    sq += SymMatrix(3, e2);
  }
  for (std::size_t i = 0; i < 9; ++i) {
    const double var = sq.data()[i] - avg.data()[i] * avg.data()[i];
    CHECK(std::abs(avg.data()[i] - target.data()[i]) <= 5.0 * std::sqrt(var / trials) + 1e-9);
  }
}
