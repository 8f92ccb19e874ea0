#include "rdesign/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdesign/error.hpp"

namespace rdesign {

SampleCounts draw_counts(const DesignWeights& mu, std::uint64_t n, Rng& rng) {
  const std::size_t K = mu.size();
  Vector cdf(K);
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    acc += mu[k];
    cdf[k] = acc;
  }
  // Index of the last experiment with positive weight absorbs rounding of the total.
  std::size_t last = K - 1;
  while (last > 0 && mu[last] == 0.0) --last;
  std::uniform_real_distribution<double> unif(0.0, acc);
  std::vector<std::uint64_t> counts(K, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = unif(rng);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min(k, last);
    ++counts[k];
  }
  return SampleCounts(std::move(counts));
}

SymMatrix realized_info(const ExperimentPool& pool, const SampleCounts& counts) {
  if (counts.counts.size() != pool.size()) throw InvalidInput("count length does not match pool size");
  SymMatrix s(pool.dim());
  for (std::size_t k = 0; k < pool.size(); ++k)
    if (counts.counts[k] != 0) s.add_outer(pool.row(k), static_cast<double>(counts.counts[k]));
  return s;
}

RealizedScore score_realized(const ExperimentPool& pool, const SampleCounts& counts, const DesignWeights& mu_ref) {
  const SymMatrix s = realized_info(pool, counts);
  const double n = static_cast<double>(counts.n);
  const double ref = lambda_min(info_matrix(pool, mu_ref));
  const double lmin = lambda_min(s);
  if (counts.n == 0 || !(lmin > 1e-12 * std::max(s.max_abs(), 1e-300))) throw Singular(lmin);
  RealizedScore out;
  out.ratio_E = ref * n / lmin;
  out.ratio_G = crit_G(pool, s) * n / static_cast<double>(pool.dim());
  return out;
}

std::vector<TrialScore> replicate(const ExperimentPool& pool, const DesignWeights& mu, std::uint64_t n,
                                  std::size_t trials, std::uint64_t master_seed) {
  if (trials == 0) throw InvalidInput("replicate needs trials >= 1");
  if (mu.size() != pool.size()) throw InvalidInput("weight length does not match pool size");
  std::vector<TrialScore> out(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = make_rng(split_seed(master_seed, t));
    const SampleCounts counts = draw_counts(mu, n, rng);
    try {
      const RealizedScore s = score_realized(pool, counts, mu);
      out[t] = {s.ratio_E, s.ratio_G, false};
    } catch (const Singular&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out[t] = {nan, nan, true};
    }
  });
  return out;
}

}  // namespace rdesign
