#include "rdesign/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rdesign/error.hpp"

namespace rdesign {

namespace {

constexpr std::uint64_t kRefreshPeriod = 1024;

SymMatrix gram_of(const std::vector<Vector>& X, std::size_t d) {
  SymMatrix a(d);
  for (const auto& x : X) {
    if (x.size() != d) throw InvalidInput("design rows have inconsistent dimension");
    a.add_outer(x);
  }
  return a;
}

Vector xt_r(const std::vector<Vector>& X, std::span<const double> r, std::size_t d) {
  if (X.size() != r.size()) throw InvalidInput("design and reward lengths differ");
  Vector b(d, 0.0);
  for (std::size_t s = 0; s < X.size(); ++s)
    for (std::size_t i = 0; i < d; ++i) b[i] += X[s][i] * r[s];
  return b;
}

/// First d columns of the identity found among the arms, if all are present.
std::optional<std::vector<std::size_t>> canonical_arms(const ExperimentPool& arms) {
  std::vector<std::size_t> out(arms.dim(), arms.size());
  for (std::size_t k = 0; k < arms.size(); ++k) {
    auto x = arms.row(k);
    std::size_t hot = arms.dim();
    bool unit = true;
    for (std::size_t i = 0; i < arms.dim() && unit; ++i) {
      if (x[i] == 1.0 && hot == arms.dim())
        hot = i;
      else if (x[i] != 0.0)
        unit = false;
    }
    if (unit && hot < arms.dim() && out[hot] == arms.size()) out[hot] = k;
  }
  for (std::size_t k : out)
    if (k == arms.size()) return std::nullopt;
  return out;
}

std::vector<std::size_t> rank_growing_arms(const ExperimentPool& arms) {
  std::vector<std::size_t> out;
  SymMatrix acc(arms.dim());
  std::size_t rank = 0;
  for (std::size_t k = 0; k < arms.size() && rank < arms.dim(); ++k) {
    SymMatrix cand = acc;
    cand.add_outer(arms.row(k));
    const std::size_t r = numerical_rank(cand, arms.L());
    if (r > rank) {
      acc = std::move(cand);
      rank = r;
      out.push_back(k);
    }
  }
  if (rank < arms.dim()) throw NonSpanningPool();
  return out;
}

/// A^{-1} <- A^{-1} - (A^{-1} x)(A^{-1} x)^T / (1 + x^T A^{-1} x)
void sherman_morrison(SymMatrix& a_inv, std::span<const double> x) {
  const Vector u = a_inv.apply(x);
  double denom = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) denom += x[i] * u[i];
  a_inv.add_outer(u, -1.0 / denom);
}

}  // namespace

const char* strategy_name(AllocationStrategy s) noexcept {
  switch (s) {
    case AllocationStrategy::RandomizedG: return "randomized_G";
    case AllocationStrategy::GreedyG: return "greedy_G";
    case AllocationStrategy::Uniform: return "uniform";
  }
  return "unknown";
}

BanditInstance soare_instance(std::size_t d, double omega) {
  if (d < 2) throw InvalidInput("Soare instance needs d >= 2");
  if (!std::isfinite(omega)) throw InvalidInput("omega must be finite");
  const double c = std::cos(omega), s = std::sin(omega);
  // The extra arm must differ from e_1 and keep e_1 the unique best arm.
  if (!(c < 1.0)) throw InvalidInput("omega yields a duplicate of e_1 (no unique best arm)");
  std::vector<Vector> rows(d + 1, Vector(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) rows[i][i] = 1.0;
  rows[d][0] = c;
  rows[d][1] = s;
  Vector theta(d, 0.0);
  theta[0] = 2.0;
  return BanditInstance{ExperimentPool(d, std::move(rows)), std::move(theta), 1.0};
}

double pull(const BanditInstance& inst, std::size_t arm, Rng& rng) {
  if (arm >= inst.arms.size()) throw InvalidInput("arm index out of range");
  auto x = inst.arms.row(arm);
  double mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean += inst.theta_star[i] * x[i];
  if (inst.noise_std == 0.0) return mean;
  std::normal_distribution<double> noise(0.0, 1.0);
  return mean + inst.noise_std * noise(rng);
}

Vector ols(const std::vector<Vector>& X, std::span<const double> r) {
  if (X.empty()) throw InvalidInput("empty design");
  const std::size_t d = X.front().size();
  const SymMatrix inv = psd_inverse(gram_of(X, d), 1e-12);
  return inv.apply(xt_r(X, r, d));
}

Vector ridge(const std::vector<Vector>& X, std::span<const double> r, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("ridge penalty must be positive");
  if (X.empty()) throw InvalidInput("empty design");
  const std::size_t d = X.front().size();
  SymMatrix a = gram_of(X, d);
  a += SymMatrix::identity(d) * lambda;
  return psd_inverse(a, 0.0).apply(xt_r(X, r, d));
}

double fixed_width(std::span<const double> y, const SymMatrix& A_inv, std::uint64_t t, double directions,
                   double delta, double R) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  if (t < 1) throw InvalidInput("t must be >= 1");
  const double td = static_cast<double>(t);
  const double arg = 6.0 * td * td * directions / (std::numbers::pi * std::numbers::pi * delta);
  if (!(arg > 1.0)) return 0.0;
  const double norm = std::sqrt(std::max(0.0, A_inv.quad_form(y)));
  return 2.0 * R * norm * std::sqrt(2.0 * std::log(arg));
}

double adaptive_width(std::span<const double> y, const SymMatrix& A_lambda_inv, std::uint64_t t, double L,
                      double lambda, double delta, double R, double theta_norm_bound) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  const double d = static_cast<double>(A_lambda_inv.dim());
  const double norm = std::sqrt(std::max(0.0, A_lambda_inv.quad_form(y)));
  const double td = static_cast<double>(t);
  return norm * (R * std::sqrt(d * std::log((1.0 + td * L * L / lambda) / delta)) + std::sqrt(lambda) * theta_norm_bound);
}

StopDecision stopping_check(std::span<const double> theta_hat, const SymMatrix& A_inv, const ExperimentPool& arms,
                            std::uint64_t t, double delta, double R) {
  const std::size_t K = arms.size(), d = arms.dim();
  Vector score(K);
  for (std::size_t k = 0; k < K; ++k) {
    auto x = arms.row(k);
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += theta_hat[i] * x[i];
    score[k] = s;
  }
  StopDecision out;
  out.leader = static_cast<std::size_t>(std::max_element(score.begin(), score.end()) - score.begin());
  const double directions = 0.5 * static_cast<double>(K) * static_cast<double>(K - 1);
  if (K == 1) {
    out.stop = true;
    return out;
  }
  auto lead = arms.row(out.leader);
  Vector y(d);
  out.stop = true;
  for (std::size_t k = 0; k < K && out.stop; ++k) {
    if (k == out.leader) continue;
    auto x = arms.row(k);
    for (std::size_t i = 0; i < d; ++i) y[i] = lead[i] - x[i];
    out.stop = score[out.leader] - score[k] > fixed_width(y, A_inv, t, directions, delta, R);
  }
  return out;
}

BAIOutcome run_bai(const BanditInstance& inst, AllocationStrategy strategy, double delta, std::uint64_t max_rounds,
                   Rng& rng) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
  const ExperimentPool& arms = inst.arms;
  const std::size_t K = arms.size(), d = arms.dim();
  if (inst.theta_star.size() != d) throw InvalidInput("theta_star dimension does not match arms");

  std::vector<std::size_t> init;
  if (auto c = canonical_arms(arms))
    init = *c;
  else
    init = rank_growing_arms(arms);

  Vector cdf;
  if (strategy == AllocationStrategy::RandomizedG) {
    const DesignSolution sol = solve_G_relaxed(arms, 1e-6);
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k) cdf.push_back(acc += sol.weights[k]);
  }

  BAIOutcome out;
  std::vector<std::uint64_t> counts(K, 0);
  Vector b(d, 0.0);
  SymMatrix a(d);
  SymMatrix a_inv(d);
  bool have_inverse = false;

  auto record = [&](std::size_t arm) {
    const double r = pull(inst, arm, rng);
    ++counts[arm];
    ++out.samples_used;
    out.history.push_back({out.samples_used, arm, r});
    auto x = arms.row(arm);
    for (std::size_t i = 0; i < d; ++i) b[i] += r * x[i];
    a.add_outer(x);
    if (have_inverse) {
      if (out.samples_used % kRefreshPeriod == 0)
        a_inv = psd_inverse(a, 0.0);
      else
        sherman_morrison(a_inv, x);
    }
  };

  auto check = [&] {
    const StopDecision s = stopping_check(a_inv.apply(b), a_inv, arms, out.samples_used, delta, inst.noise_std);
    if (s.stop) {
      out.stopped = true;
      out.identified_arm = s.leader;
    }
    return s.stop;
  };

  for (std::size_t k : init) {
    if (out.samples_used >= max_rounds) return out;
    record(k);
  }
  a_inv = psd_inverse(a, 1e-12);
  have_inverse = true;
  if (check()) return out;

  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  std::vector<double> lev(K * K);
  std::vector<std::size_t> tied;
  while (out.samples_used < max_rounds) {
    std::size_t arm = 0;
    switch (strategy) {
      case AllocationStrategy::RandomizedG: {
        const double u = unif01(rng) * cdf.back();
        arm = std::min<std::size_t>(static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
                                    K - 1);
        break;
      }
      case AllocationStrategy::Uniform: {
        std::uniform_int_distribution<std::size_t> pick(0, K - 1);
        arm = pick(rng);
        break;
      }
      case AllocationStrategy::GreedyG: {
        // Post-pull leverages via Sherman-Morrison on G = X A^{-1} X^T.
        for (std::size_t i = 0; i < K; ++i) {
          const Vector vi = a_inv.apply(arms.row(i));
          for (std::size_t j = i; j < K; ++j) {
            auto rj = arms.row(j);
            double v = 0.0;
            for (std::size_t q = 0; q < d; ++q) v += vi[q] * rj[q];
            lev[i * K + j] = lev[j * K + i] = v;
          }
        }
        double best = std::numeric_limits<double>::infinity();
        tied.clear();
        for (std::size_t k = 0; k < K; ++k) {
          const double denom = 1.0 + lev[k * K + k];
          double worst = 0.0;
          for (std::size_t j = 0; j < K; ++j) {
            const double g = lev[j * K + k];
            worst = std::max(worst, lev[j * K + j] - g * g / denom);
          }
          if (worst < best - 1e-11 * best) {
            best = worst;
            tied.assign(1, k);
          } else if (worst <= best + 1e-11 * best) {
            tied.push_back(k);
          }
        }
        if (tied.size() == 1) {
          arm = tied.front();
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
          arm = tied[pick(rng)];
        }
        break;
      }
    }
    record(arm);
    if (check()) break;
  }
  return out;
}

}  // namespace rdesign
