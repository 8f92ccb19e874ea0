#pragma once

// I.i.d. realization of a relaxed design and scoring of the realized matrix.

#include <cstdint>
#include <optional>
#include <vector>

#include "rdesign/design.hpp"

namespace rdesign {

/// n i.i.d. categorical draws from mu, tallied per experiment.
SampleCounts draw_counts(const DesignWeights& mu, std::uint64_t n, Rng& rng);

/// S_n = sum_k n_k x_k x_k^T
SymMatrix realized_info(const ExperimentPool& pool, const SampleCounts& counts);

struct RealizedScore {
  double ratio_E = 0.0;  // lambda_min(M(mu_ref)) n / lambda_min(S_n)
  double ratio_G = 0.0;  // crit_G(pool, S_n) n / d
};

/// Empirical counterparts of f(S_n^{-1}) / f*_n. Throws Singular when S_n is
/// singular.
RealizedScore score_realized(const ExperimentPool& pool, const SampleCounts& counts, const DesignWeights& mu_ref);

struct TrialScore {
  double ratio_E = 0.0;
  double ratio_G = 0.0;
  bool censored = false;  // S_n singular; ratios are NaN
};

/// Trial t draws with seed split_seed(master_seed, t); output is indexed by trial.
std::vector<TrialScore> replicate(const ExperimentPool& pool, const DesignWeights& mu, std::uint64_t n,
                                  std::size_t trials, std::uint64_t master_seed);

}  // namespace rdesign
