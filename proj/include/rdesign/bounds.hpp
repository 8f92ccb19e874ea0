#pragma once

// Closed-form tail bounds for sums of i.i.d. random matrices, the finite-sample
// guarantees for randomized E and G designs, and a Monte Carlo checker.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "rdesign/design.hpp"

namespace rdesign {

enum class Side { Min, Max };

struct TailBoundReport {
  /// Probability bound; values above 1 are returned as-is and flagged vacuous.
  double bound_value = 0.0;
  bool conditions_met = true;
  std::string condition_detail;
  /// Secondary evaluation (the n-scaled corollary, or the as-printed variant).
  std::optional<double> alternate_value;
  /// Effective dimension prefactor where the bound has one (intdim, d-tilde).
  std::optional<double> effective_dimension;

  bool vacuous() const noexcept { return bound_value > 1.0; }
};

struct GuaranteeReport {
  std::uint64_t n_min = 0;
  double multiplier = 1.0;
  /// Bound on ||S_n^{-1} - (E S_n)^{-1}|| (G) or lambda_min ratio slack (E).
  double absolute_bound = 0.0;
  double leading_term = 0.0;
  double confidence = 0.0;
  bool conditions_met = true;
  std::string condition_detail;
  std::optional<double> effective_dimension;
};

struct BernsteinTail {
  double threshold = 0.0;
  double probability = 0.0;
};

struct MonteCarloReport {
  double empirical = 0.0;
  double bound = 0.0;
  bool dominated = false;
  std::size_t trials = 0;
  double slack = 0.0;
};

/// e^{-eps}/(1-eps)^{1-eps} for Side::Min, e^{eps}/(1+eps)^{1+eps} for Side::Max.
double chernoff_base(Side side, double eps);

/// d * base^{n anchor / L}; anchor = lambda_min(E X_1) (Min) or ||E X_1|| (Max).
TailBoundReport hoeffding_bound(Side side, double eps, double n, std::size_t d, double L, double anchor);

/// d exp(-eps^2 lambda_min(E X_1) / (2L)) as printed; alternate_value carries the
/// same expression with the exponent multiplied by n, which is what the
/// derivation from hoeffding_bound actually yields.
TailBoundReport hoeffding_simplified(double eps, double n, std::size_t d, double L, double lam_min_EX1);

/// P(||S_n|| >= t) <= d exp(-t^2 / (2Lt/3 + 2 n sigma2)) for centered summands.
TailBoundReport bennett_bound(double t, double n, std::size_t d, double L, double sigma2);

/// Per-sample precision t such that the Bennett deviation n t holds with
/// probability 1 - delta when split as delta/2.
double bennett_precision(double delta, double n, std::size_t d, double L, double sigma2);

/// Threshold sqrt(2 n sigma2 t) + c t and probability d e^{-t}.
BernsteinTail bernstein_tail(double t, double n, std::size_t d, double sigma2, double c);

/// 2 intdim(E S_n) base_max^{||E S_n|| / L}.
TailBoundReport hoeffding_intdim(double eps, const SymMatrix& E_Sn, double L);

/// Upper/lower intrinsic-dimension version of hoeffding_bound; anchor as there.
TailBoundReport hoeffding_refined(Side side, double eps, const SymMatrix& E_Sn, double anchor, double n, double L);

/// Refined Bernstein bound P(||S_n|| >= sqrt(n) t) <= d~ e^{-t^2/(4 sigma^2)} with
/// sigma^2 = ||V|| and d~ = updim(V) + lowdim(V) e^{-n(1-1/kappa)/16}, valid for
/// 3 n sigma^2 / L > t > sqrt(n) sigma^2 + L / (3 sqrt(n)). With as_printed the
/// statement's variant is evaluated instead: sigma^2 replaced by ||V||^2 and the
/// event read as ||S_n|| >= sqrt(t).
TailBoundReport bernstein_refined(double t, double n, const SymMatrix& V, double L, bool as_printed = false);

/// Randomized E design. Throws SampleSizeTooSmall when n <= 2 L ||M^{-1}|| log(d/delta).
GuaranteeReport guarantee_E(double n, double delta, std::size_t d, double L, double norm_Minv);

/// Full finite-sample G guarantee with delta split evenly between the lower
/// Hoeffding tail and Bennett. sigma2_thm = L^2 sum_k mu_k (1 - mu_k).
/// Throws SampleSizeTooSmall when the denominator is not positive.
GuaranteeReport guarantee_G_full(double n, double delta, std::size_t d, double L, const SymMatrix& M_mu,
                                 double sigma2_thm);

/// Refined G guarantee with d~ computed at n and sigma^2 = ||V||. Never throws
/// on unmet conditions; conditions_met = false and n_min gives the smallest n
/// at which they hold.
GuaranteeReport guarantee_G_refined(double n, double delta, std::size_t d, double L, const SymMatrix& M_mu,
                                    const SymMatrix& V);

/// L^2 sum_k mu_k (1 - mu_k)
double sigma2_theorem(const DesignWeights& mu, double L);

/// V = E[X_1^2] - M(mu)^2 for X_1 = x x^T with x ~ mu.
SymMatrix covariance_V(const ExperimentPool& pool, const DesignWeights& mu);

/// 3 sqrt(b (1 - b) / trials) + 1 / trials with b clamped to [0, 1].
double monte_carlo_slack(double bound, std::size_t trials);

using TrialEvent = std::function<bool(Rng&)>;

/// Fraction of trials where the event fires (trial t seeded with
/// split_seed(master_seed, t)) and whether it stays below bound + slack.
MonteCarloReport mc_validate(const TrialEvent& event, double bound, std::size_t trials, std::uint64_t master_seed);

}  // namespace rdesign
