#include "rdesign/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "rdesign/error.hpp"

namespace rdesign {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
}

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0,1)");
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be positive");
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be non-negative");
}

/// log of the Chernoff base, computed without forming the power.
double log_base(Side side, double eps) {
  return side == Side::Min ? -eps - (1.0 - eps) * std::log1p(-eps) : eps - (1.0 + eps) * std::log1p(eps);
}

std::string describe(const char* what, double lhs, const char* op, double rhs) {
  std::ostringstream os;
  os.precision(10);
  os << what << ": " << lhs << ' ' << op << ' ' << rhs;
  return os.str();
}

}  // namespace

double chernoff_base(Side side, double eps) {
  require_eps(eps);
  return std::exp(log_base(side, eps));
}

TailBoundReport hoeffding_bound(Side side, double eps, double n, std::size_t d, double L, double anchor) {
  require_eps(eps);
  require_positive(L, "L");
  require_nonnegative(anchor, "anchor");
  require_nonnegative(n, "n");
  TailBoundReport r;
  r.bound_value = static_cast<double>(d) * std::exp(log_base(side, eps) * n * anchor / L);
  r.effective_dimension = static_cast<double>(d);
  return r;
}

TailBoundReport hoeffding_simplified(double eps, double n, std::size_t d, double L, double lam_min_EX1) {
  require_eps(eps);
  require_positive(L, "L");
  require_nonnegative(lam_min_EX1, "lambda_min");
  require_nonnegative(n, "n");
  const double expo = eps * eps * lam_min_EX1 / (2.0 * L);
  TailBoundReport r;
  r.bound_value = static_cast<double>(d) * std::exp(-expo);
  r.alternate_value = static_cast<double>(d) * std::exp(-n * expo);
  r.condition_detail = "printed exponent has no factor n; alternate_value applies it";
  return r;
}

TailBoundReport bennett_bound(double t, double n, std::size_t d, double L, double sigma2) {
  require_nonnegative(t, "t");
  require_positive(L, "L");
  require_nonnegative(sigma2, "sigma2");
  require_nonnegative(n, "n");
  TailBoundReport r;
  const double denom = 2.0 * L * t / 3.0 + 2.0 * n * sigma2;
  r.bound_value = t == 0.0 ? static_cast<double>(d) : static_cast<double>(d) * std::exp(-t * t / denom);
  r.effective_dimension = static_cast<double>(d);
  return r;
}

double bennett_precision(double delta, double n, std::size_t d, double L, double sigma2) {
  require_delta(delta);
  require_positive(n, "n");
  require_nonnegative(L, "L");
  require_nonnegative(sigma2, "sigma2");
  const double ell = std::log(2.0 * static_cast<double>(d) / delta);
  const double a = L / (3.0 * n) * ell;
  return a + std::sqrt(a * a + 2.0 * sigma2 / n * ell);
}

BernsteinTail bernstein_tail(double t, double n, std::size_t d, double sigma2, double c) {
  require_nonnegative(t, "t");
  require_nonnegative(n, "n");
  require_nonnegative(sigma2, "sigma2");
  require_nonnegative(c, "c");
  return {std::sqrt(2.0 * n * sigma2 * t) + c * t, static_cast<double>(d) * std::exp(-t)};
}

TailBoundReport hoeffding_intdim(double eps, const SymMatrix& E_Sn, double L) {
  require_eps(eps);
  require_positive(L, "L");
  const DimensionSummary s = dimension_summary(E_Sn);
  TailBoundReport r;
  r.effective_dimension = 2.0 * s.intdim;
  r.bound_value = 2.0 * s.intdim * std::exp(log_base(Side::Max, eps) * s.spectral_norm / L);
  return r;
}

TailBoundReport hoeffding_refined(Side side, double eps, const SymMatrix& E_Sn, double anchor, double n, double L) {
  require_eps(eps);
  require_positive(L, "L");
  require_nonnegative(anchor, "anchor");
  require_nonnegative(n, "n");
  const DimensionSummary s = dimension_summary(E_Sn);
  if (!(s.lambda_min > 0.0)) throw Singular(s.lambda_min);
  const double kappa = s.cond;
  double d_tilde = 0.0;
  if (side == Side::Max)
    d_tilde = s.updim + s.lowdim * std::exp(-n * eps * anchor * (1.0 - 1.0 / kappa) / L);
  else
    d_tilde = s.lowdim + s.updim * std::exp(-n * eps * anchor * (kappa - 1.0) / L);
  TailBoundReport r;
  r.effective_dimension = d_tilde;
  r.bound_value = d_tilde * std::exp(log_base(side, eps) * n * anchor / L);
  return r;
}

TailBoundReport bernstein_refined(double t, double n, const SymMatrix& V, double L, bool as_printed) {
  require_nonnegative(t, "t");
  require_positive(n, "n");
  require_positive(L, "L");
  const DimensionSummary s = dimension_summary(V);
  const double kappa = s.lambda_min > 0.0 ? s.cond : std::numeric_limits<double>::infinity();
  const double d_tilde = s.updim + s.lowdim * std::exp(-n * (1.0 - 1.0 / kappa) / 16.0);
  const double norm = s.spectral_norm;
  const double proof_sigma2 = norm;
  const double printed_sigma2 = norm * norm;

  auto evaluate = [&](double sigma2) { return d_tilde * std::exp(-t * t / (4.0 * sigma2)); };
  const double sigma2 = as_printed ? printed_sigma2 : proof_sigma2;
  const double upper = 3.0 * n * sigma2 / L;
  const double lower = std::sqrt(n) * sigma2 + L / (3.0 * std::sqrt(n));

  TailBoundReport r;
  r.effective_dimension = d_tilde;
  r.bound_value = evaluate(sigma2);
  r.alternate_value = evaluate(as_printed ? proof_sigma2 : printed_sigma2);
  r.conditions_met = upper > t && t > lower;
  std::ostringstream os;
  os.precision(10);
  os << "window " << lower << " < t < " << upper << (as_printed ? " (as printed, event ||S_n|| >= sqrt(t))"
                                                                 : " (event ||S_n|| >= sqrt(n) t)");
  r.condition_detail = os.str();
  return r;
}

GuaranteeReport guarantee_E(double n, double delta, std::size_t d, double L, double norm_Minv) {
  require_delta(delta);
  require_positive(L, "L");
  require_positive(norm_Minv, "norm_Minv");
  const double threshold = 2.0 * L * norm_Minv * std::log(static_cast<double>(d) / delta);
  const auto n_min = static_cast<std::uint64_t>(std::max(0.0, std::ceil(threshold)));
  if (!(n > threshold)) throw SampleSizeTooSmall(n_min);
  GuaranteeReport g;
  g.n_min = n_min;
  const double root = std::sqrt(n / threshold);
  g.multiplier = threshold > 0.0 ? 1.0 + 1.0 / (root - 1.0) : 1.0;
  g.leading_term = threshold > 0.0 ? 1.0 / root : 0.0;
  g.absolute_bound = g.multiplier - 1.0;
  g.confidence = 1.0 - delta;
  g.condition_detail = describe("n > 2 L ||M^-1|| log(d/delta)", n, ">", threshold);
  return g;
}

GuaranteeReport guarantee_G_full(double n, double delta, std::size_t d, double L, const SymMatrix& M_mu,
                                 double sigma2_thm) {
  require_delta(delta);
  require_positive(L, "L");
  require_nonnegative(sigma2_thm, "sigma2");
  const double norm_inv = 1.0 / lambda_min(M_mu);
  if (!(norm_inv > 0.0) || !std::isfinite(norm_inv)) throw Singular(lambda_min(M_mu));
  const double dd = static_cast<double>(d);
  const double ell = std::log(2.0 * dd / delta);
  const double threshold = 2.0 * L * norm_inv * ell;
  const auto n_min = static_cast<std::uint64_t>(std::max(0.0, std::ceil(threshold)));
  if (!(n > threshold)) throw SampleSizeTooSmall(n_min);

  GuaranteeReport g;
  g.n_min = n_min;
  const double denom = 1.0 - std::sqrt(threshold / n);
  const double numer = L / 3.0 * ell + std::sqrt(2.0 * n * sigma2_thm * ell);
  g.absolute_bound = norm_inv * norm_inv * numer / (n * n * denom);
  g.multiplier = 1.0 + L * n / dd * g.absolute_bound;
  g.leading_term = L / dd * norm_inv * norm_inv * std::sqrt(2.0 * sigma2_thm / n * std::log(dd / delta));
  g.confidence = 1.0 - delta;
  g.condition_detail = describe("n > 2 L ||M^-1|| log(2d/delta)", n, ">", threshold);
  return g;
}

GuaranteeReport guarantee_G_refined(double n, double delta, std::size_t d, double L, const SymMatrix& M_mu,
                                    const SymMatrix& V) {
  require_delta(delta);
  require_positive(L, "L");
  require_positive(n, "n");
  const double lmin = lambda_min(M_mu);
  if (!(lmin > 0.0)) throw Singular(lmin);
  const double norm_inv = 1.0 / lmin;
  const DimensionSummary s = dimension_summary(V);
  if (!(s.lambda_min > 0.0)) throw Singular(s.lambda_min);
  const double sigma2 = s.spectral_norm;
  const double dd = static_cast<double>(d);
  auto d_tilde_at = [&](double m) { return s.updim + s.lowdim * std::exp(-m * (1.0 - 1.0 / s.cond) / 16.0); };
  const double hoeff_threshold = 2.0 * L * norm_inv * std::log(dd / delta);
  auto holds = [&](double m) {
    const double bern = 4.0 * L * L / (9.0 * sigma2) * std::log(d_tilde_at(m) / delta);
    return m >= bern && m > hoeff_threshold;
  };

  // Smallest integer n at which both conditions hold; both sides are monotone in n.
  std::uint64_t hi = 1;
  while (!holds(static_cast<double>(hi))) hi *= 2;
  std::uint64_t lo = hi / 2;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (holds(static_cast<double>(mid)) ? hi : lo) = mid;
  }

  GuaranteeReport g;
  g.n_min = holds(static_cast<double>(lo)) && lo > 0 ? lo : hi;
  const double d_tilde = d_tilde_at(n);
  const double ell = std::log(d_tilde / delta);
  g.effective_dimension = d_tilde;
  g.conditions_met = holds(n);
  const double denom = 1.0 - std::sqrt(hoeff_threshold / n);
  g.absolute_bound = denom > 0.0 ? norm_inv * norm_inv * std::sqrt(4.0 * n * sigma2 * std::max(ell, 0.0)) / (n * n * denom)
                                 : std::numeric_limits<double>::infinity();
  g.multiplier = 1.0 + L * n / dd * g.absolute_bound;
  g.leading_term = L / dd * norm_inv * norm_inv * std::sqrt(4.0 * sigma2 / n * std::max(ell, 0.0));
  g.confidence = 1.0 - 2.0 * delta;
  std::ostringstream os;
  os.precision(10);
  os << "n >= (4L^2/(9||V||)) log(d~/delta) and n > 2L||M^-1|| log(d/delta); smallest such n is " << g.n_min
     << "; sigma^2 taken as ||V||";
  if (!g.conditions_met && static_cast<double>(g.n_min) > n) os << "; conditions hold only for larger n";
  g.condition_detail = os.str();
  return g;
}

double sigma2_theorem(const DesignWeights& mu, double L) {
  double acc = 0.0;
  for (double w : mu.values()) acc += w * (1.0 - w);
  return L * L * acc;
}

SymMatrix covariance_V(const ExperimentPool& pool, const DesignWeights& mu) {
  if (mu.size() != pool.size()) throw InvalidInput("weight length does not match pool size");
  SymMatrix second(pool.dim());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (mu[k] == 0.0) continue;
    auto x = pool.row(k);
    double sq = 0.0;
    for (double v : x) sq += v * v;
    second.add_outer(x, mu[k] * sq);
  }
  return second - info_matrix(pool, mu).square();
}

double monte_carlo_slack(double bound, std::size_t trials) {
  const double b = std::clamp(bound, 0.0, 1.0);
  const double t = static_cast<double>(trials);
  return 3.0 * std::sqrt(b * (1.0 - b) / t) + 1.0 / t;
}

MonteCarloReport mc_validate(const TrialEvent& event, double bound, std::size_t trials, std::uint64_t master_seed) {
  if (trials < 100) throw InvalidInput("mc_validate needs at least 100 trials");
  require_nonnegative(bound, "bound");
  std::vector<unsigned char> hit(trials, 0);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng = make_rng(split_seed(master_seed, t));
    hit[t] = event(rng) ? 1 : 0;
  });
  std::size_t count = 0;
  for (unsigned char h : hit) count += h;
  MonteCarloReport r;
  r.trials = trials;
  r.bound = bound;
  r.empirical = static_cast<double>(count) / static_cast<double>(trials);
  r.slack = monte_carlo_slack(bound, trials);
  r.dominated = r.empirical <= bound + r.slack;
  return r;
}

}  // namespace rdesign
