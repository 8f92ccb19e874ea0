#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rdesign/bounds.hpp"
#include "rdesign/error.hpp"
#include "rdesign/sampling.hpp"
#include "test_util.hpp"

using namespace rdesign;
using doctest::Approx;

namespace {

SymMatrix diag(std::initializer_list<double> v) {
  const Vector d(v);
  return SymMatrix::diagonal(d);
}

// Independent scalar re-evaluations of the closed forms.
double base_min(double e) { return std::exp(-e) / std::pow(1 - e, 1 - e); }
double base_max(double e) { return std::exp(e) / std::pow(1 + e, 1 + e); }

}  // namespace

TEST_CASE("hoeffding_bound examples") {
  const double want = 2.0 * std::pow(std::exp(-0.5) / std::sqrt(0.5), 10.0);
  CHECK(hoeffding_bound(Side::Min, 0.5, 10, 2, 1, 1).bound_value == Approx(want));
  CHECK(want == Approx(0.4312).epsilon(1e-4));
  CHECK(hoeffding_bound(Side::Min, 1e-9, 10, 3, 1, 1).bound_value == Approx(3.0));
  CHECK(hoeffding_bound(Side::Max, 1e-9, 10, 3, 1, 1).vacuous());
  CHECK(hoeffding_bound(Side::Min, 0.5, 20, 2, 1, 1).bound_value < hoeffding_bound(Side::Min, 0.5, 10, 2, 1, 1).bound_value);
  CHECK(hoeffding_bound(Side::Max, 0.3, 7, 4, 2.0, 0.8).bound_value == Approx(4.0 * std::pow(base_max(0.3), 7 * 0.8 / 2.0)));
  CHECK_THROWS_AS(hoeffding_bound(Side::Min, 0.0, 10, 2, 1, 1), InvalidInput);
  CHECK_THROWS_AS(hoeffding_bound(Side::Min, 1.0, 10, 2, 1, 1), InvalidInput);
  CHECK_THROWS_AS(hoeffding_bound(Side::Max, 0.5, 10, 2, 0.0, 1), InvalidInput);
  CHECK(chernoff_base(Side::Min, 0.4) == Approx(base_min(0.4)));
  CHECK(chernoff_base(Side::Max, 0.4) == Approx(base_max(0.4)));
}

TEST_CASE("hoeffding_bound is monotone in n and eps") {
  for (Side side : {Side::Min, Side::Max})
    for (int i = 1; i < 50; ++i) {
      const double eps = 0.02 * i;
      for (double n = 1; n < 200; n += 7) {
        REQUIRE(hoeffding_bound(side, eps, n + 7, 3, 1, 0.2).bound_value <
                hoeffding_bound(side, eps, n, 3, 1, 0.2).bound_value);
        REQUIRE(hoeffding_bound(side, eps + 0.01, n, 3, 1, 0.2).bound_value <
                hoeffding_bound(side, eps, n, 3, 1, 0.2).bound_value);
      }
    }
}

TEST_CASE("hoeffding_simplified") {
  const auto r = hoeffding_simplified(0.5, 1, 2, 1, 10);
  CHECK(r.bound_value == Approx(2.0 * std::exp(-1.25)));
  CHECK(r.bound_value == Approx(0.5730).epsilon(1e-4));
  REQUIRE(r.alternate_value);
  CHECK_THROWS_AS(hoeffding_simplified(1.0, 1, 2, 1, 10), InvalidInput);
  // The n-scaled variant is weaker than the Chernoff form everywhere on a grid.
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) {
      const double eps = 0.095 * i, n = 5.0 * j;
      const auto s = hoeffding_simplified(eps, n, 3, 2.0, 0.4);
      CHECK(*s.alternate_value >= hoeffding_bound(Side::Min, eps, n, 3, 2.0, 0.4).bound_value);
    }
}

TEST_CASE("bennett_bound") {
  CHECK(bennett_bound(0, 5, 3, 1, 1).bound_value == 3.0);
  CHECK(bennett_bound(2, 1, 1, 1, 1).bound_value == Approx(std::exp(-1.2)));
  CHECK(bennett_bound(2, 1, 1, 1, 1).bound_value == Approx(0.3012).epsilon(1e-4));
  // Large t: exponent -> 3t/(2L). L is scaled with t so the bound stays representable.
  const double t = 1e6, L = 1e6;
  CHECK(-std::log(bennett_bound(t, 1, 1, L, 1).bound_value) / (3 * t / (2 * L)) == Approx(1.0).epsilon(1e-9));
  for (double s = 0.5; s < 20; s += 0.5)
    CHECK(bennett_bound(s + 0.5, 10, 2, 1, 0.3).bound_value < bennett_bound(s, 10, 2, 1, 0.3).bound_value);
  CHECK_THROWS_AS(bennett_bound(-1, 1, 1, 1, 1), InvalidInput);
}

TEST_CASE("bennett_precision") {
  CHECK(bennett_precision(2.0 / std::numbers::e, 2, 1, 3, 1) == Approx(0.5 + std::sqrt(1.25)));
  CHECK(bennett_precision(2.0 / std::numbers::e, 2, 1, 3, 1) == Approx(1.6180).epsilon(1e-4));
  // L -> 0 leaves the sub-Gaussian term.
  CHECK(bennett_precision(0.1, 50, 3, 0.0, 2.0) == Approx(std::sqrt(2 * 2.0 * std::log(60.0) / 50)));
  CHECK(bennett_precision(0.1, 100, 3, 1, 1) < bennett_precision(0.1, 50, 3, 1, 1));
  // The root makes the Bennett exponent exactly log(2d/delta): bound = delta/2.
  for (double n : {5.0, 50.0, 500.0})
    for (double delta : {0.01, 0.1, 0.5}) {
      const double t = bennett_precision(delta, n, 4, 2.5, 0.7);
      CHECK(bennett_bound(n * t, n, 4, 2.5, 0.7).bound_value == Approx(delta / 2));
    }
  CHECK_THROWS_AS(bennett_precision(0.0, 1, 1, 1, 1), InvalidInput);
  CHECK_THROWS_AS(bennett_precision(1.0, 1, 1, 1, 1), InvalidInput);
}

TEST_CASE("bernstein_tail") {
  auto b = bernstein_tail(0, 3, 4, 1, 1);
  CHECK(b.threshold == 0.0);
  CHECK(b.probability == 4.0);
  b = bernstein_tail(1, 2, 1, 1, 1);
  CHECK(b.threshold == Approx(3.0));
  CHECK(b.probability == Approx(std::exp(-1.0)));
  CHECK(bernstein_tail(2.5, 7, 1, 0.3, 0).threshold == Approx(std::sqrt(2 * 7 * 0.3 * 2.5)));
  CHECK_THROWS_AS(bernstein_tail(-1, 1, 1, 1, 1), InvalidInput);
  CHECK_THROWS_AS(bernstein_tail(1, 1, 1, 1, -1), InvalidInput);
}

TEST_CASE("hoeffding_intdim") {
  const double n = 40, L = 2, eps = 0.3;
  const auto flat = hoeffding_intdim(eps, SymMatrix::identity(4) * n, L);
  CHECK(flat.bound_value == Approx(8.0 * std::pow(base_max(eps), n / L)));
  CHECK(*flat.effective_dimension == Approx(2.0 * hoeffding_bound(Side::Max, eps, n, 4, L, 1).effective_dimension.value()));

  const auto spiky = hoeffding_intdim(eps, diag({10, 1e-6, 1e-6, 1e-6, 1e-6}), 1);
  CHECK(*spiky.effective_dimension == Approx(2.0 * (1.0 + 4e-7)));
  CHECK(5.0 / *spiky.effective_dimension == Approx(2.5).epsilon(1e-5));
  CHECK_THROWS_AS(hoeffding_intdim(eps, SymMatrix(3), 1), InvalidInput);
}

TEST_CASE("hoeffding_refined") {
  // n diag(3,2,1), side max, eps 0.5, n ||EX_1|| / L = 10 (n = 10, anchor 3, L 3).
  const auto r = hoeffding_refined(Side::Max, 0.5, diag({3, 2, 1}) * 10.0, 3.0, 10, 3.0);
  const double dt = 1.5 + 1.5 * std::exp(-10 * 0.5 * (1 - 1.0 / 3));
  CHECK(dt == Approx(1.5536).epsilon(1e-4));
  CHECK(*r.effective_dimension == Approx(dt));
  CHECK(r.bound_value == Approx(dt * std::pow(base_max(0.5), 10)));

  const auto m = hoeffding_refined(Side::Min, 0.5, diag({3, 2, 1}) * 10.0, 1.0, 10, 3.0);
  const double dm = 1.5 + 1.5 * std::exp(-10 * 0.5 * 1.0 * (3 - 1) / 3.0);
  CHECK(*m.effective_dimension == Approx(dm));
  CHECK(m.bound_value == Approx(dm * std::pow(base_min(0.5), 10.0 / 3.0)));

  // Flat spectrum: prefactor is exactly d.
  for (Side side : {Side::Min, Side::Max}) {
    const auto f = hoeffding_refined(side, 0.4, SymMatrix::identity(5) * 30.0, 1.0, 30, 1.0);
    CHECK(*f.effective_dimension == 5.0);
    CHECK(f.bound_value == Approx(hoeffding_bound(side, 0.4, 30, 5, 1.0, 1.0).bound_value));
  }
  // Large n: prefactor tends to updim and stays within twice the intdim prefactor.
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const SymMatrix V = testutil::random_psd(4, rng);
    const auto s = dimension_summary(V);
    const auto big = hoeffding_refined(Side::Max, 0.5, V * 1e4, s.spectral_norm, 1e4, 1.0);
    CHECK(*big.effective_dimension == Approx(s.updim).epsilon(1e-6));
    CHECK(*big.effective_dimension <= 2.0 * s.intdim);
    CHECK(*big.effective_dimension <= 4.0 + s.lowdim);
  }
  CHECK_THROWS_AS(hoeffding_refined(Side::Max, 0.5, diag({1, 0}), 1, 1, 1), Singular);
}

TEST_CASE("bernstein_refined") {
  const auto flat = bernstein_refined(1.0, 16, SymMatrix::identity(3), 1.0);
  CHECK(*flat.effective_dimension == 3.0);
  CHECK(flat.bound_value == Approx(3.0 * std::exp(-0.25)));

  const auto r = bernstein_refined(1.0, 16, diag({3, 2, 1}), 1.0);
  CHECK(*r.effective_dimension == Approx(1.5 + 1.5 * std::exp(-(1 - 1.0 / 3))));
  CHECK(*r.effective_dimension == Approx(2.2702).epsilon(1e-4));
  CHECK(r.bound_value == Approx(*r.effective_dimension * std::exp(-1.0 / 12.0)));
  // as-printed replaces sigma^2 by ||V||^2
  const auto p = bernstein_refined(1.0, 16, diag({3, 2, 1}), 1.0, true);
  CHECK(p.bound_value == Approx(*r.effective_dimension * std::exp(-1.0 / 36.0)));
  CHECK(*p.alternate_value == Approx(r.bound_value));

  // n = 1, sigma^2 = 1, L = 100: the window is empty.
  for (double t : {0.01, 1.0, 10.0, 100.0}) CHECK_FALSE(bernstein_refined(t, 1, SymMatrix::identity(2), 100).conditions_met);
  // A nonempty window: n = 100, sigma^2 = 1, L = 1 gives 10.03 < t < 300.
  CHECK(bernstein_refined(20, 100, SymMatrix::identity(2), 1).conditions_met);
  CHECK_FALSE(bernstein_refined(5, 100, SymMatrix::identity(2), 1).conditions_met);
}

TEST_CASE("guarantee_E") {
  const double delta = 2.0 / std::numbers::e;  // log(d/delta) = 1 at d = 2
  CHECK_THROWS_AS(guarantee_E(4, delta, 2, 1, 2), SampleSizeTooSmall);
  try {
    guarantee_E(3, delta, 2, 1, 2);
  } catch (const SampleSizeTooSmall& e) {
    CHECK(e.n_min() == 4);
  }
  CHECK(guarantee_E(16, delta, 2, 1, 2).multiplier == Approx(2.0));
  CHECK(guarantee_E(64, delta, 2, 1, 2).multiplier == Approx(4.0 / 3.0));
  CHECK(guarantee_E(16, delta, 2, 1, 2).n_min == 4);
  CHECK(guarantee_E(16, delta, 2, 1, 2).confidence == Approx(1 - delta));
  double prev = 1e300;
  for (double n = 5; n < 500; n += 5) {
    const double m = guarantee_E(n, delta, 2, 1, 2).multiplier;
    CHECK(m < prev);
    CHECK(m >= 1.0);
    prev = m;
  }
}

TEST_CASE("guarantee_G_full") {
  const auto c2 = ExperimentPool::canonical(2);
  const auto mu = uniform_design(2);
  const double s2 = sigma2_theorem(mu, 1.0);
  CHECK(s2 == Approx(0.5));
  const SymMatrix M = info_matrix(c2, mu);
  const double n = 1e4, delta = 0.1, d = 2, L = 1;
  const auto g = guarantee_G_full(n, delta, 2, L, M, s2);

  // Direct re-evaluation of the displayed expression with ||M^{-1}|| = 2.
  const double inv = 2.0, ell = std::log(2 * d / delta);
  const double abs_bound = inv * inv * (L / 3 * ell + std::sqrt(2 * n * s2 * ell)) / (n * n * (1 - std::sqrt(2 * L / n * inv * ell)));
  CHECK(g.absolute_bound == Approx(abs_bound));
  CHECK(g.multiplier == Approx(1 + L * n / d * abs_bound));
  CHECK(g.multiplier >= 1.0);
  CHECK(std::isfinite(g.multiplier));
  CHECK(g.leading_term == Approx(L / d * inv * inv * std::sqrt(2 * s2 / n * std::log(d / delta))));
  CHECK(g.n_min == std::uint64_t(std::ceil(2 * L * inv * ell)));

  // Variance-free case.
  const auto z = guarantee_G_full(n, delta, 2, L, M, 0.0);
  CHECK(z.leading_term == 0.0);
  CHECK(z.absolute_bound == Approx(inv * inv * (L / 3 * ell) / (n * n * (1 - std::sqrt(2 * L / n * inv * ell)))));

  CHECK_THROWS_AS(guarantee_G_full(10, delta, 2, L, M, s2), SampleSizeTooSmall);

  // Multiplier - 1 shrinks like 1/sqrt(n).
  for (double m = 1e4; m < 1e8; m *= 4) {
    const double a = guarantee_G_full(m, delta, 2, L, M, s2).multiplier - 1;
    const double b = guarantee_G_full(4 * m, delta, 2, L, M, s2).multiplier - 1;
    CHECK(b <= 0.55 * a);
  }
}

TEST_CASE("guarantee_G_refined") {
  const SymMatrix V = diag({3, 2, 1});
  const SymMatrix M = diag({0.5, 0.4, 0.3});
  const auto g = guarantee_G_refined(16, 0.1, 3, 1.0, M, V);
  CHECK(*g.effective_dimension == Approx(2.2702).epsilon(1e-4));
  CHECK(std::log(*g.effective_dimension / 0.1) == Approx(3.1224).epsilon(1e-4));
  CHECK(g.confidence == Approx(0.8));

  // Flat V: d~ = d, leading term is the factor-4 version of guarantee_G_full's.
  const auto flat = guarantee_G_refined(1e5, 0.1, 3, 1.0, M, SymMatrix::identity(3) * 0.7);
  CHECK(*flat.effective_dimension == 3.0);
  CHECK(flat.leading_term == Approx(1.0 / 3 * std::pow(1 / 0.3, 2) * std::sqrt(4 * 0.7 / 1e5 * std::log(3 / 0.1))));

  // d~ tends to updim(V).
  CHECK(*guarantee_G_refined(1e6, 0.1, 3, 1.0, M, V).effective_dimension == Approx(1.5));

  // n_min is the smallest n at which conditions hold.
  const auto small = guarantee_G_refined(2, 0.1, 3, 1.0, M, V);
  CHECK_FALSE(small.conditions_met);
  CHECK(guarantee_G_refined(double(small.n_min), 0.1, 3, 1.0, M, V).conditions_met);
  CHECK_FALSE(guarantee_G_refined(double(small.n_min - 1), 0.1, 3, 1.0, M, V).conditions_met);
}

TEST_CASE("covariance_V and sigma2_theorem") {
  // Canonical basis with uniform weights: E[||x||^2 x x^T] = I/2, M^2 = I/4.
  const auto V = covariance_V(ExperimentPool::canonical(2), uniform_design(2));
  CHECK(testutil::max_abs_diff(V, SymMatrix::identity(2) * 0.25) < 1e-15);
  CHECK(sigma2_theorem(DesignWeights::one_hot(3, 1), 2.0) == 0.0);
  // Monte Carlo: E[(X - M)^2] where X = x x^T, x ~ mu.
  Rng rng(5);
  const auto pool = testutil::random_pool(6, 3, rng);
  const auto mu = testutil::random_weights(6, rng);
  const SymMatrix M = info_matrix(pool, mu);
  SymMatrix direct(3);
  for (std::size_t k = 0; k < 6; ++k) direct += (SymMatrix::outer(pool.row(k)) - M).square() * mu[k];
  CHECK(testutil::max_abs_diff(direct, covariance_V(pool, mu)) < 1e-12 * direct.max_abs());
}

TEST_CASE("mc_validate examples") {
  const auto never = mc_validate([](Rng&) { return false; }, 0.0, 1000, 1);
  CHECK(never.empirical == 0.0);
  CHECK(never.dominated);
  const auto always = mc_validate([](Rng&) { return true; }, 1.0, 1000, 1);
  CHECK(always.empirical == 1.0);
  CHECK(always.dominated);
  CHECK_FALSE(mc_validate([](Rng&) { return true; }, 0.5, 1000, 1).dominated);
  CHECK_THROWS_AS(mc_validate([](Rng&) { return true; }, 1.0, 99, 1), InvalidInput);
  CHECK(monte_carlo_slack(0.25, 10000) == Approx(3 * std::sqrt(0.1875 / 1e4) + 1e-4));
}

TEST_CASE("scalar Bernoulli sum against the d = 1 Hoeffding bound") {
  // X_i ~ Bernoulli(1/2): L = 1, E X = 1/2, n = 100; lower tail at eps = 0.3.
  const int n = 100;
  const double eps = 0.3;
  const double bound = hoeffding_bound(Side::Min, eps, n, 1, 1.0, 0.5).bound_value;
  const auto r = mc_validate(
      [&](Rng& rng) {
        std::bernoulli_distribution b(0.5);
        int s = 0;
        for (int i = 0; i < n; ++i) s += b(rng);
        return s <= (1 - eps) * 50;
      },
      bound, 10000, 7);
  CHECK(r.dominated);
  CHECK(r.empirical > 0.0);
  // Same for the upper tail.
  const double ub = hoeffding_bound(Side::Max, eps, n, 1, 1.0, 0.5).bound_value;
  const auto u = mc_validate(
      [&](Rng& rng) {
        std::bernoulli_distribution b(0.5);
        int s = 0;
        for (int i = 0; i < n; ++i) s += b(rng);
        return s >= (1 + eps) * 50;
      },
      ub, 10000, 8);
  CHECK(u.dominated);
}

TEST_CASE("mc_validate is reproducible") {
  auto ev = [](Rng& rng) { return std::uniform_real_distribution<double>(0, 1)(rng) < 0.3; };
  CHECK(mc_validate(ev, 0.3, 5000, 42).empirical == mc_validate(ev, 0.3, 5000, 42).empirical);
}

TEST_CASE("matrix tails are dominated on small random pools") {
  Rng rng(9);
  for (int i = 0; i < 3; ++i) {
    const std::size_t d = 2 + i;
    const auto pool = testutil::random_pool(8 + 4 * i, d, rng);
    const auto mu = solve_G_relaxed(pool).weights;
    const SymMatrix M = info_matrix(pool, mu);
    const double L = pool.L(), lmin = lambda_min(M);
    const std::uint64_t n = std::uint64_t(std::ceil(4 * 2 * L / lmin * std::log(d / 0.05)));
    const double eps = 0.5;
    const SymMatrix ES = M * double(n);
    const double level = (1 - eps) * lambda_min(ES);
    const auto r = mc_validate(
        [&](Rng& g) { return lambda_min(realized_info(pool, draw_counts(mu, n, g))) <= level; },
        hoeffding_bound(Side::Min, eps, double(n), d, L, lmin).bound_value, 2000, 100 + i);
    CHECK(r.dominated);
  }
}
