#pragma once

// Experiment pools, the E and G criteria, relaxed solvers over the simplex and
// greedy integer baselines.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rdesign/random.hpp"
#include "rdesign/spectral.hpp"

namespace rdesign {

/// K experiments x_1..x_K in R^d, with L = max_k ||x_k||^2.
class ExperimentPool {
 public:
  ExperimentPool(std::size_t dim, std::vector<Vector> rows);

  /// e_1..e_d
  static ExperimentPool canonical(std::size_t dim);

  std::size_t size() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  double L() const noexcept { return max_sq_norm_; }
  std::span<const double> row(std::size_t k) const {
    return std::span<const double>(data_).subspan(k * dim_, dim_);
  }
  ExperimentPool scaled(double c) const;
  /// Rank of sum_k x_k x_k^T, eigenvalues counted above 1e-9 * L.
  bool spans() const;

 private:
  std::size_t dim_;
  std::size_t count_;
  std::vector<double> data_;
  double max_sq_norm_ = 0.0;
};

/// A point of the simplex: K weights in [0,1] summing to one.
class DesignWeights {
 public:
  explicit DesignWeights(Vector weights);
  static DesignWeights one_hot(std::size_t size, std::size_t k);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t k) const noexcept { return w_[k]; }
  std::span<const double> values() const noexcept { return w_; }

 private:
  Vector w_;
};

/// Integer allocation n_1..n_K with sum n.
struct SampleCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  SampleCounts() = default;
  explicit SampleCounts(std::vector<std::uint64_t> c);
  friend bool operator==(const SampleCounts&, const SampleCounts&) = default;
};

struct DesignSolution {
  DesignWeights weights;
  double objective = 0.0;
  /// Upper bound on (optimum - objective) for E, objective/d - 1 for G.
  double certificate_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// M(mu) = sum_k mu_k x_k x_k^T
SymMatrix info_matrix(const ExperimentPool& pool, const DesignWeights& mu);

/// ||M^{-1}|| = 1 / lambda_min(M); throws Singular.
double crit_E(const SymMatrix& info);
/// max_k x_k^T M^{-1} x_k; throws Singular.
double crit_G(const ExperimentPool& pool, const SymMatrix& info);

DesignWeights uniform_design(std::size_t count);

/// Maximizes lambda_min(M(mu)) over the simplex with a primal log-barrier
/// Newton method on  max t  s.t.  M(mu) - t I >= 0.
///
/// Every centering step yields a density matrix W = (M - tI)^{-1} / tr(.)
/// and hence the bound  OPT <= max_k x_k^T W x_k ; certificate_gap is that bound
/// minus the achieved objective, so it is a true optimality gap. Iterations
/// count Newton steps; hitting max_iter returns the best iterate with
/// converged = false. Throws NonSpanningPool.
DesignSolution solve_E_relaxed(const ExperimentPool& pool, double tol = 1e-6, std::size_t max_iter = 2000);

/// Relaxed G-optimal (equivalently D-optimal) design. Starts with multiplicative
/// updates and finishes with Wolfe-Atwood/Todd-Yildirim steps with exact line
/// search; every step is monotone in log det M(mu). Stops once
/// crit_G <= d (1 + tol). Throws NonSpanningPool.
DesignSolution solve_G_relaxed(const ExperimentPool& pool, double tol = 1e-6, std::size_t max_iter = 200000);

/// One multiplicative step mu_k <- mu_k * (x_k^T M(mu)^{-1} x_k) / d, with weights
/// below 1e-15 clipped to zero and the result renormalized.
DesignWeights multiplicative_update(const ExperimentPool& pool, const DesignWeights& mu);

/// Greedy selection sequences. While the selected set is rank deficient the
/// score is rank first (eigenvalues above 1e-9 L), then the criterion on the
/// range; ties are broken uniformly with rng.
std::vector<std::size_t> greedy_E_sequence(const ExperimentPool& pool, std::size_t n, Rng& rng);
std::vector<std::size_t> greedy_G_sequence(const ExperimentPool& pool, std::size_t n, Rng& rng);

SampleCounts greedy_E(const ExperimentPool& pool, std::size_t n, Rng& rng);
SampleCounts greedy_G(const ExperimentPool& pool, std::size_t n, Rng& rng);

/// Counts of the first `prefix` entries of a selection sequence.
SampleCounts counts_from_sequence(std::span<const std::size_t> sequence, std::size_t pool_size, std::size_t prefix);

/// lambda_min(A + x x^T) from the spectrum of A, via the secular equation.
double rank_one_lambda_min(const Spectrum& a, std::span<const double> x);

}  // namespace rdesign
