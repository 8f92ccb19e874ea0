#pragma once

// Linear bandit environment and fixed-design best-arm identification.

#include <cstdint>
#include <optional>
#include <vector>

#include "rdesign/design.hpp"

namespace rdesign {

struct BanditInstance {
  ExperimentPool arms;
  Vector theta_star;
  double noise_std = 1.0;
};

struct RoundLog {
  std::uint64_t t = 0;  // 1-based sample index
  std::size_t arm = 0;
  double reward = 0.0;
};

struct BAIOutcome {
  std::optional<std::size_t> identified_arm;  // set iff stopped
  std::uint64_t samples_used = 0;
  bool stopped = false;
  std::vector<RoundLog> history;
};

enum class AllocationStrategy { RandomizedG, GreedyG, Uniform };

/// Canonical basis e_1..e_d plus (cos omega, sin omega, 0, ...), theta* = 2 e_1,
/// unit noise. Throws InvalidInput for d < 2 or a degenerate omega.
BanditInstance soare_instance(std::size_t d, double omega);

/// theta*^T x_arm + noise_std * N(0,1)
double pull(const BanditInstance& inst, std::size_t arm, Rng& rng);

/// Least squares on the rows of X; throws Singular when X^T X is singular.
Vector ols(const std::vector<Vector>& X, std::span<const double> r);
/// (X^T X + lambda I)^{-1} X^T r
Vector ridge(const std::vector<Vector>& X, std::span<const double> r, double lambda);

/// 2 R ||y||_{A^{-1}} sqrt(2 log(6 t^2 directions / (pi^2 delta))); zero when the
/// log argument is below one.
double fixed_width(std::span<const double> y, const SymMatrix& A_inv, std::uint64_t t, double directions,
                   double delta, double R);

/// ||y||_{A(lambda)^{-1}} (R sqrt(d log((1 + t L^2 / lambda) / delta)) + sqrt(lambda) S)
double adaptive_width(std::span<const double> y, const SymMatrix& A_lambda_inv, std::uint64_t t, double L,
                      double lambda, double delta, double R, double theta_norm_bound);

struct StopDecision {
  bool stop = false;
  std::size_t leader = 0;
};

/// Leader = argmax theta_hat^T x (lowest index on exact ties). Stops iff every
/// other arm x has theta_hat^T (leader - x) strictly above
/// fixed_width(leader - x, A_inv, t, K(K-1)/2, delta, R).
StopDecision stopping_check(std::span<const double> theta_hat, const SymMatrix& A_inv, const ExperimentPool& arms,
                            std::uint64_t t, double delta, double R);

/// Fixed-design best-arm identification. Initialization pulls e_1..e_d once on a
/// Soare-type instance (a rank-growing subset otherwise); max_rounds counts every
/// sample, initialization included.
BAIOutcome run_bai(const BanditInstance& inst, AllocationStrategy strategy, double delta,
                   std::uint64_t max_rounds, Rng& rng);

const char* strategy_name(AllocationStrategy s) noexcept;

}  // namespace rdesign
