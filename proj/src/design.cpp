#include "rdesign/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>

#include "rdesign/error.hpp"

namespace rdesign {

namespace {

constexpr double kRankRelTol = 1e-9;
constexpr double kWeightFloor = 1e-15;
constexpr double kTieRelTol = 1e-11;
constexpr std::size_t kMultiplicativeWarmup = 50;

void require_matching(const ExperimentPool& pool, std::size_t len) {
  if (pool.size() != len) throw InvalidInput("weight/count length does not match pool size");
}

/// Rows divided by sqrt(L), so that the normalized pool has L = 1.
std::vector<double> normalized_rows(const ExperimentPool& pool) {
  const double s = 1.0 / std::sqrt(pool.L());
  std::vector<double> out(pool.size() * pool.dim());
  for (std::size_t k = 0; k < pool.size(); ++k) {
    auto r = pool.row(k);
    for (std::size_t i = 0; i < pool.dim(); ++i) out[k * pool.dim() + i] = s * r[i];
  }
  return out;
}

SymMatrix weighted_gram(std::span<const double> rows, std::size_t dim, std::span<const double> w) {
  SymMatrix m(dim);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (w[k] != 0.0) m.add_outer(rows.subspan(k * dim, dim), w[k]);
  return m;
}

/// Uniform choice among the indices whose score ties with the best one.
std::size_t pick_tied(const std::vector<std::size_t>& tied, Rng& rng) {
  if (tied.size() == 1) return tied.front();
  std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
  return tied[pick(rng)];
}

bool ties(double a, double b) { return std::abs(a - b) <= kTieRelTol * std::max({std::abs(a), std::abs(b), 1e-300}); }

struct Score {
  std::size_t rank;
  double value;  // larger is better
};

/// Indices attaining the lexicographic maximum of score.
template <class ScoreFn>
std::vector<std::size_t> lexicographic_ties(std::size_t count, ScoreFn score) {
  std::vector<std::size_t> tied;
  Score best{0, -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < count; ++k) {
    const Score s = score(k);
    const bool better = s.rank > best.rank || (s.rank == best.rank && s.value > best.value && !ties(s.value, best.value));
    if (tied.empty() || better) {
      best = s;
      tied.assign(1, k);
    } else if (s.rank == best.rank && ties(s.value, best.value)) {
      tied.push_back(k);
    }
  }
  return tied;
}

/// Narrows a tie set to the candidates whose profile is lexicographically
/// largest, then picks one uniformly. Profiles only get computed on ties, so
/// generic pools never pay for them. Without this step a flat primary score
/// (e.g. repeated eigenvalues) lets a random pick unbalance the counts.
template <class ProfileFn>
std::size_t refine_and_pick(std::vector<std::size_t> tied, ProfileFn profile, Rng& rng) {
  if (tied.size() > 1) {
    std::vector<Vector> prof;
    prof.reserve(tied.size());
    double scale = 1e-300;
    for (std::size_t k : tied) {
      prof.push_back(profile(k));
      for (double v : prof.back()) scale = std::max(scale, std::abs(v));
    }
    const double tol = kTieRelTol * scale;
    auto compare = [&](const Vector& a, const Vector& b) {
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
        if (std::abs(a[i] - b[i]) > tol) return a[i] > b[i] ? 1 : -1;
      return 0;
    };
    std::size_t best = 0;
    std::vector<std::size_t> keep{tied[0]};
    for (std::size_t i = 1; i < tied.size(); ++i) {
      const int c = compare(prof[i], prof[best]);
      if (c > 0) {
        best = i;
        keep.assign(1, tied[i]);
      } else if (c == 0) {
        keep.push_back(tied[i]);
      }
    }
    tied = std::move(keep);
  }
  return pick_tied(tied, rng);
}

/// (rank, smallest eigenvalue above the rank cut) of a PSD matrix.
Score range_score(const SymMatrix& m, double cut) {
  const auto sp = eigh(m);
  std::size_t rank = 0;
  double smallest = 0.0;
  for (double l : sp.values) {
    if (l > cut) {
      if (rank == 0) smallest = l;
      ++rank;
    }
  }
  return {rank, smallest};
}

}  // namespace

// ---------------------------------------------------------------------------
// Pool, weights, counts

ExperimentPool::ExperimentPool(std::size_t dim, std::vector<Vector> rows) : dim_(dim), count_(rows.size()) {
  if (dim == 0) throw InvalidInput("dimension must be >= 1");
  if (rows.empty()) throw InvalidInput("experiment pool is empty");
  data_.reserve(dim * rows.size());
  for (const auto& r : rows) {
    if (r.size() != dim) throw InvalidInput("experiment has wrong dimension");
    double sq = 0.0;
    for (double v : r) {
      if (!std::isfinite(v)) throw InvalidInput("experiment has non-finite coordinate");
      sq += v * v;
    }
    max_sq_norm_ = std::max(max_sq_norm_, sq);
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (max_sq_norm_ <= 0.0) throw InvalidInput("all experiments are zero");
}

ExperimentPool ExperimentPool::canonical(std::size_t dim) {
  std::vector<Vector> rows(dim, Vector(dim, 0.0));
  for (std::size_t i = 0; i < dim; ++i) rows[i][i] = 1.0;
  return ExperimentPool(dim, std::move(rows));
}

ExperimentPool ExperimentPool::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidInput("scale must be positive");
  std::vector<Vector> rows;
  rows.reserve(count_);
  for (std::size_t k = 0; k < count_; ++k) {
    auto r = row(k);
    Vector v(r.begin(), r.end());
    for (double& x : v) x *= c;
    rows.push_back(std::move(v));
  }
  return ExperimentPool(dim_, std::move(rows));
}

bool ExperimentPool::spans() const {
  SymMatrix gram(dim_);
  for (std::size_t k = 0; k < count_; ++k) gram.add_outer(row(k));
  return numerical_rank(gram, max_sq_norm_, kRankRelTol) == dim_;
}

DesignWeights::DesignWeights(Vector weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InvalidInput("design weights are empty");
  double sum = 0.0;
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InvalidInput("design weight outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("design weights do not sum to one");
}

DesignWeights DesignWeights::one_hot(std::size_t size, std::size_t k) {
  if (k >= size) throw InvalidInput("one-hot index out of range");
  Vector w(size, 0.0);
  w[k] = 1.0;
  return DesignWeights(std::move(w));
}

SampleCounts::SampleCounts(std::vector<std::uint64_t> c) : counts(std::move(c)) {
  n = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

DesignWeights uniform_design(std::size_t count) {
  if (count == 0) throw InvalidInput("uniform design needs K >= 1");
  return DesignWeights(Vector(count, 1.0 / static_cast<double>(count)));
}

// ---------------------------------------------------------------------------
// Criteria

SymMatrix info_matrix(const ExperimentPool& pool, const DesignWeights& mu) {
  require_matching(pool, mu.size());
  SymMatrix m(pool.dim());
  for (std::size_t k = 0; k < pool.size(); ++k)
    if (mu[k] != 0.0) m.add_outer(pool.row(k), mu[k]);
  return m;
}

double crit_E(const SymMatrix& info) {
  const double lmin = lambda_min(info);
  if (!(lmin > 1e-14 * std::max(info.max_abs(), 1e-300))) throw Singular(lmin);
  return 1.0 / lmin;
}

double crit_G(const ExperimentPool& pool, const SymMatrix& info) {
  if (info.dim() != pool.dim()) throw InvalidInput("information matrix dimension does not match pool");
  const SymMatrix inv = psd_inverse(info, 1e-14);
  double worst = 0.0;
  for (std::size_t k = 0; k < pool.size(); ++k) worst = std::max(worst, inv.quad_form(pool.row(k)));
  return worst;
}

// ---------------------------------------------------------------------------
// E-optimal relaxation: barrier method

namespace {

/// Reduced barrier for the E relaxation:
///   Phi(mu) = max_{t < lambda_min(M(mu))} [tau t + log det(M(mu) - t I)] + gamma sum_k log mu_k
/// on the simplex. The inner maximizer solves tr (M - tI)^{-1} = tau. With
/// B = (M - tI)^{-1}, u_k = B^{1/2} x_k and f_k the half-vectorization of u_k u_k^T
/// (off-diagonals scaled by sqrt 2), the gradient is x_k^T B x_k + gamma/mu_k and
/// the negated Hessian is diag(gamma/mu^2) + (F Pi)(F Pi)^T, where Pi projects
/// out the half-vectorization of B. Forming F Pi row by row avoids the
/// cancellation an explicit Schur complement on t would suffer near the optimum.
class BarrierNewton {
 public:
  BarrierNewton(std::span<const double> rows, std::size_t count, std::size_t dim, double gamma)
      : rows_(rows), count_(count), dim_(dim), gamma_(gamma) {}

  struct Point {
    Spectrum spectrum;  // of M(mu)
    double gap = 0.0;   // lambda_min(M) - t
    double value = 0.0;
  };

  /// Phi(mu) and the inner maximizer; false when some weight is not positive.
  bool evaluate(std::span<const double> mu, double tau, Point& out) const {
    for (double w : mu)
      if (!(w > 0.0)) return false;
    out.spectrum = eigh(weighted_gram(rows_, dim_, mu));
    const Vector& lam = out.spectrum.values;
    // g(s) = sum_i 1/(lam_i - lam_0 + s) - tau is convex decreasing in s > 0 and
    // positive at s = 1/tau, so Newton from there increases monotonically to the root.
    double s = 1.0 / tau;
    for (int it = 0; it < 100; ++it) {
      double g = -tau, dg = 0.0;
      for (double l : lam) {
        const double r = 1.0 / (l - lam[0] + s);
        g += r;
        dg += r * r;
      }
      const double step = g / dg;
      s += step;
      if (step <= 1e-15 * s) break;
    }
    out.gap = s;
    double logs = 0.0;
    for (double w : mu) logs += std::log(w);
    double logdet = 0.0;
    for (double l : lam) logdet += std::log(l - lam[0] + s);
    out.value = tau * (lam[0] - s) + logdet + gamma_ * logs;
    return true;
  }

  /// Directional derivative of Phi along d (with sum d = 0) at a point.
  double slope(std::span<const double> mu, const Point& pt, std::span<const double> d) const {
    const Vector& lam = pt.spectrum.values;
    Vector inv(dim_);
    for (std::size_t i = 0; i < dim_; ++i) inv[i] = 1.0 / (lam[i] - lam[0] + pt.gap);
    const SymMatrix b = pt.spectrum.compose(inv);
    double acc = 0.0;
    for (std::size_t k = 0; k < count_; ++k)
      acc += d[k] * (b.quad_form(rows_.subspan(k * dim_, dim_)) + gamma_ / mu[k]);
    return acc;
  }

  /// B / tr(B) at a point; a density matrix certifying OPT <= max_k x_k^T W x_k.
  SymMatrix density(const Point& pt) const {
    const Vector& lam = pt.spectrum.values;
    Vector inv(dim_);
    double tr = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) tr += inv[i] = 1.0 / (lam[i] - lam[0] + pt.gap);
    for (double& v : inv) v /= tr;
    return pt.spectrum.compose(inv);
  }

  /// Constrained Newton direction and squared decrement; false if the system
  /// could not be factored.
  bool direction(std::span<const double> mu, const Point& pt, Vector& dmu, double& decrement2) const {
    const std::size_t d = dim_, K = count_, p = d * (d + 1) / 2;
    const Vector& lam = pt.spectrum.values;
    Vector inv(d), inv_half(d);
    for (std::size_t i = 0; i < d; ++i) {
      inv[i] = 1.0 / (lam[i] - lam[0] + pt.gap);
      inv_half[i] = std::sqrt(inv[i]);
    }
    const SymMatrix b = pt.spectrum.compose(inv);
    const SymMatrix b_half = pt.spectrum.compose(inv_half);

    Vector bvec(p);
    {
      std::size_t q = 0;
      double nrm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        bvec[q++] = b(i, i);
        for (std::size_t j = i + 1; j < d; ++j) bvec[q++] = std::numbers::sqrt2 * b(i, j);
      }
      for (double v : bvec) nrm += v * v;
      nrm = std::sqrt(nrm);
      for (double& v : bvec) v /= nrm;
    }

    std::vector<double> f(K * p);
    Vector grad(K);
    for (std::size_t k = 0; k < K; ++k) {
      const Vector u = b_half.apply(rows_.subspan(k * d, d));
      double lev = 0.0;
      double* fk = &f[k * p];
      std::size_t q = 0;
      for (std::size_t i = 0; i < d; ++i) {
        lev += u[i] * u[i];
        fk[q++] = u[i] * u[i];
        for (std::size_t j = i + 1; j < d; ++j) fk[q++] = std::numbers::sqrt2 * u[i] * u[j];
      }
      grad[k] = lev + gamma_ / mu[k];
      double proj = 0.0;
      for (std::size_t a = 0; a < p; ++a) proj += fk[a] * bvec[a];
      for (std::size_t a = 0; a < p; ++a) fk[a] -= proj * bvec[a];
    }

    std::optional<Cholesky> chol;
    std::function<Vector(std::span<const double>)> solve;
    if (K <= p) {
      std::vector<double> a(K * K);
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t l = k; l < K; ++l) {
          double acc = 0.0;
          for (std::size_t q = 0; q < p; ++q) acc += f[k * p + q] * f[l * p + q];
          a[k * K + l] = a[l * K + k] = acc;
        }
      for (std::size_t k = 0; k < K; ++k) a[k * K + k] += gamma_ / (mu[k] * mu[k]);
      if (!factor(K, std::move(a), chol)) return false;
      solve = [&](std::span<const double> v) { return chol->solve(v); };
    } else {
      // Woodbury: P^{-1} v = D^{-1} v - D^{-1} F (I + F^T D^{-1} F)^{-1} F^T D^{-1} v
      std::vector<double> core(p * p, 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        const double w = mu[k] * mu[k] / gamma_;
        const double* fk = &f[k * p];
        for (std::size_t a = 0; a < p; ++a) {
          const double wa = w * fk[a];
          double* row = &core[a * p];
          for (std::size_t c = a; c < p; ++c) row[c] += wa * fk[c];
        }
      }
      for (std::size_t a = 0; a < p; ++a) {
        core[a * p + a] += 1.0;
        for (std::size_t c = 0; c < a; ++c) core[a * p + c] = core[c * p + a];
      }
      if (!factor(p, std::move(core), chol)) return false;
      solve = [&](std::span<const double> v) {
        Vector w(K);
        for (std::size_t k = 0; k < K; ++k) w[k] = mu[k] * mu[k] / gamma_ * v[k];
        Vector y(p, 0.0);
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t q = 0; q < p; ++q) y[q] += f[k * p + q] * w[k];
        const Vector z = chol->solve(y);
        for (std::size_t k = 0; k < K; ++k) {
          double fz = 0.0;
          for (std::size_t q = 0; q < p; ++q) fz += f[k * p + q] * z[q];
          w[k] -= mu[k] * mu[k] / gamma_ * fz;
        }
        return w;
      };
    }

    // The constrained direction ignores constant shifts of the gradient; removing
    // the weighted mean (about t tau near the path) avoids cancellation below.
    double shift = 0.0;
    for (std::size_t k = 0; k < K; ++k) shift += mu[k] * grad[k];
    for (double& g : grad) g -= shift;

    // Project out the multiplier of sum mu = 1.
    const Vector pg = solve(grad);
    const Vector pa = solve(Vector(K, 1.0));
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      num += pg[k];
      den += pa[k];
    }
    if (!(den > 0.0)) return false;
    const double nu = num / den;
    dmu.resize(K);
    for (std::size_t k = 0; k < K; ++k) dmu[k] = pg[k] - nu * pa[k];
    // dmu^T P dmu, nonnegative by construction.
    decrement2 = 0.0;
    Vector fd(p, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      decrement2 += gamma_ * dmu[k] * dmu[k] / (mu[k] * mu[k]);
      for (std::size_t q = 0; q < p; ++q) fd[q] += f[k * p + q] * dmu[k];
    }
    for (double v : fd) decrement2 += v * v;
    return std::isfinite(decrement2);
  }

 private:
  /// Cholesky with one retry under a diagonal jitter scaled to the largest pivot.
  static bool factor(std::size_t n, std::vector<double> a, std::optional<Cholesky>& out) {
    out.emplace(SymMatrix(n, a));
    if (out->ok()) return true;
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) top = std::max(top, a[i * n + i]);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += 1e-13 * top;
    out.emplace(SymMatrix(n, std::move(a)));
    return out->ok();
  }

  std::span<const double> rows_;
  std::size_t count_;
  std::size_t dim_;
  double gamma_;
};

}  // namespace

DesignSolution solve_E_relaxed(const ExperimentPool& pool, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (!pool.spans()) throw NonSpanningPool();
  const std::size_t K = pool.size(), d = pool.dim();
  const double scale = pool.L();
  const std::vector<double> rows = normalized_rows(pool);
  const std::span<const double> row_span(rows);
  const double tol_n = tol / scale;

  // Any density matrix W gives  OPT <= max_k x_k^T W x_k.
  auto dual_bound = [&](const SymMatrix& density) {
    double ub = 0.0;
    for (std::size_t k = 0; k < K; ++k) ub = std::max(ub, density.quad_form(row_span.subspan(k * d, d)));
    return ub;
  };
  // Uniform density on each bottom-m eigenspace of M; exact when the optimum
  // has a flat bottom, as on symmetric pools.
  auto projector_bound = [&](const Spectrum& sp) {
    double ub = std::numeric_limits<double>::infinity();
    Vector vals(d, 0.0);
    for (std::size_t m = 1; m <= d; ++m) {
      std::fill(vals.begin(), vals.end(), 0.0);
      std::fill(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(m), 1.0 / static_cast<double>(m));
      ub = std::min(ub, dual_bound(sp.compose(vals)));
    }
    return ub;
  };

  // Down-weighting the simplex barrier keeps the central-path gap near 2d/tau
  // instead of (K + d)/tau, so large pools need far smaller tau.
  const double gamma = std::min(1.0, static_cast<double>(d) / static_cast<double>(K));
  const BarrierNewton newton(rows, K, d, gamma);

  Vector mu(K, 1.0 / static_cast<double>(K));
  BarrierNewton::Point pt;
  newton.evaluate(mu, 1.0, pt);
  double best_obj = pt.spectrum.values[0];
  Vector best_mu = mu;
  double best_ub = projector_bound(pt.spectrum);
  double tau = 2.0 * static_cast<double>(d) / best_obj;

  std::size_t iterations = 0;
  bool stalled = false;
  Vector dmu, trial(K);
  BarrierNewton::Point next;
  while (best_ub - best_obj > tol_n && iterations < max_iter && !stalled) {
    newton.evaluate(mu, tau, pt);
    double prev_dec2 = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 100 && iterations < max_iter; ++step) {
      double dec2 = 0.0;
      ++iterations;
      if (!newton.direction(mu, pt, dmu, dec2)) {
        stalled = true;
        break;
      }
      // In the quadratic region the decrement must shrink fast; once it does
      // not, the remaining error is rounding.
      if (0.5 * dec2 < 1e-14 || (dec2 < 0.1 && dec2 >= prev_dec2)) break;
      double s = 1.0;
      for (std::size_t k = 0; k < K; ++k)
        if (dmu[k] < 0.0) s = std::min(s, -0.99 * mu[k] / dmu[k]);
      bool moved = false;
      if (dec2 < 0.1) {
        // Full step: value differences here are below the rounding of Phi,
        // which is of order eps * tau * t.
        for (std::size_t k = 0; k < K; ++k) trial[k] = mu[k] + s * dmu[k];
        moved = newton.evaluate(trial, tau, next);
      } else {
        // Phi is concave along the ray, so a nonnegative slope at the trial
        // point means the whole segment ascends. Slopes stay accurate where
        // value differences of order eps * tau * t would not.
        for (int ls = 0; ls < 60 && !moved; ++ls, s *= 0.5) {
          for (std::size_t k = 0; k < K; ++k) trial[k] = mu[k] + s * dmu[k];
          moved = newton.evaluate(trial, tau, next) && newton.slope(trial, next, dmu) >= 0.0;
        }
      }
      if (!moved) break;
      mu = trial;
      pt = next;
      prev_dec2 = dec2;
    }
    const double sum = std::accumulate(mu.begin(), mu.end(), 0.0);
    for (double& w : mu) w /= sum;
    newton.evaluate(mu, tau, pt);

    if (pt.spectrum.values[0] > best_obj) {
      best_obj = pt.spectrum.values[0];
      best_mu = mu;
    }
    best_ub = std::min({best_ub, dual_bound(newton.density(pt)), projector_bound(pt.spectrum)});
    tau *= 8.0;
  }

  // Clip barrier residue and renormalize onto the simplex.
  for (double& w : best_mu)
    if (w < kWeightFloor) w = 0.0;
  const double sum = std::accumulate(best_mu.begin(), best_mu.end(), 0.0);
  for (double& w : best_mu) w /= sum;
  const double obj = lambda_min(weighted_gram(rows, d, best_mu));
  const double gap = std::max(0.0, best_ub - obj);
  return DesignSolution{DesignWeights(std::move(best_mu)), obj * scale, gap * scale, iterations, gap <= tol_n};
}

// ---------------------------------------------------------------------------
// G-optimal relaxation

namespace {

struct Leverages {
  Vector values;
  double log_det = 0.0;
};

Leverages leverages(std::span<const double> rows, std::size_t dim, std::span<const double> w) {
  const SymMatrix m = weighted_gram(rows, dim, w);
  const Cholesky chol(m);
  if (!chol.ok()) throw Singular(lambda_min(m));
  Leverages out;
  out.log_det = chol.log_det();
  const SymMatrix inv = chol.inverse();
  out.values.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) out.values[k] = inv.quad_form(rows.subspan(k * dim, dim));
  return out;
}

void multiplicative_step(Vector& w, std::span<const double> lev, double d) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] *= lev[k] / d;
    if (w[k] < kWeightFloor) w[k] = 0.0;
  }
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= sum;
}

}  // namespace

DesignWeights multiplicative_update(const ExperimentPool& pool, const DesignWeights& mu) {
  require_matching(pool, mu.size());
  const std::vector<double> rows = normalized_rows(pool);
  Vector w(mu.values().begin(), mu.values().end());
  const Leverages lev = leverages(rows, pool.dim(), w);
  multiplicative_step(w, lev.values, static_cast<double>(pool.dim()));
  return DesignWeights(std::move(w));
}

DesignSolution solve_G_relaxed(const ExperimentPool& pool, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (!pool.spans()) throw NonSpanningPool();
  const std::size_t K = pool.size(), dim = pool.dim();
  const double d = static_cast<double>(dim);
  const std::vector<double> rows = normalized_rows(pool);

  Vector w(K, 1.0 / static_cast<double>(K));
  std::size_t it = 0;
  double crit = 0.0;
  for (;; ++it) {
    const Leverages lev = leverages(rows, dim, w);
    const auto top = std::max_element(lev.values.begin(), lev.values.end());
    crit = *top;
    if (crit <= d * (1.0 + tol) || it >= max_iter) break;

    if (it < kMultiplicativeWarmup) {
      multiplicative_step(w, lev.values, d);
      continue;
    }
    // Todd-Yildirim: toward the largest leverage or away from the smallest
    // supported one, whichever violates the equivalence condition more.
    const std::size_t up = static_cast<std::size_t>(top - lev.values.begin());
    std::size_t down = K;
    for (std::size_t k = 0; k < K; ++k)
      if (w[k] > 0.0 && (down == K || lev.values[k] < lev.values[down])) down = k;
    const double eps_up = lev.values[up] / d - 1.0;
    const double eps_down = 1.0 - lev.values[down] / d;
    std::size_t j = up;
    double beta = 0.0;
    if (eps_up >= eps_down) {
      const double a = lev.values[up];
      beta = (a - d) / (d * (a - 1.0));
    } else {
      j = down;
      const double a = lev.values[down];
      const double drop = -w[down] / (1.0 - w[down]);
      beta = a > 1.0 ? std::max((a - d) / (d * (a - 1.0)), drop) : drop;
      if (w[down] >= 1.0) beta = 0.0;
    }
    for (double& v : w) v *= (1.0 - beta);
    w[j] += beta;
    for (double& v : w)
      if (v < kWeightFloor) v = 0.0;
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= sum;
  }
  DesignWeights weights(std::move(w));
  const double objective = crit_G(pool, info_matrix(pool, weights));
  const double gap = std::max(0.0, objective / d - 1.0);
  return DesignSolution{std::move(weights), objective, gap, it, gap <= tol};
}

// ---------------------------------------------------------------------------
// Greedy baselines

double rank_one_lambda_min(const Spectrum& a, std::span<const double> x) {
  const std::size_t d = a.dim();
  if (x.size() != d) throw InvalidInput("vector length does not match spectrum dimension");
  Vector z(d);
  double z2 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    auto q = a.vector(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += q[j] * x[j];
    z[i] = acc;
    z2 += acc * acc;
  }
  const double l1 = a.values[0];
  if (d == 1) return l1 + z2;
  const double l2 = a.values[1];
  const double scale = std::max({std::abs(a.values.back()), z2, 1e-300});
  if (l2 - l1 <= 1e-14 * scale || z[0] * z[0] <= 1e-28 * scale * scale) return l1;

  auto secular = [&](double lam) {
    double f = 1.0;
    for (std::size_t i = 0; i < d; ++i)
      if (z[i] != 0.0) f += z[i] * z[i] / (a.values[i] - lam);
    return f;
  };
  double lo = l1;
  double hi = std::min(l2, l1 + z2);
  if (hi < l2 && secular(hi) <= 0.0) return hi;
  if (hi == l2 && z[1] == 0.0 && secular(hi) <= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (secular(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

SampleCounts counts_from_sequence(std::span<const std::size_t> sequence, std::size_t pool_size, std::size_t prefix) {
  if (prefix > sequence.size()) throw InvalidInput("prefix longer than selection sequence");
  std::vector<std::uint64_t> c(pool_size, 0);
  for (std::size_t i = 0; i < prefix; ++i) {
    if (sequence[i] >= pool_size) throw InvalidInput("selection index out of range");
    ++c[sequence[i]];
  }
  return SampleCounts(std::move(c));
}

std::vector<std::size_t> greedy_E_sequence(const ExperimentPool& pool, std::size_t n, Rng& rng) {
  const std::size_t K = pool.size(), d = pool.dim();
  const double cut = kRankRelTol * pool.L();
  SymMatrix acc(d);
  std::vector<std::size_t> seq;
  seq.reserve(n);
  bool full_rank = false;
  for (std::size_t step = 0; step < n; ++step) {
    std::vector<std::size_t> tied;
    if (!full_rank) {
      tied = lexicographic_ties(K, [&](std::size_t k) {
        SymMatrix cand = acc;
        cand.add_outer(pool.row(k));
        return range_score(cand, cut);
      });
    } else {
      const Spectrum sp = eigh(acc);
      tied = lexicographic_ties(K, [&](std::size_t k) { return Score{d, rank_one_lambda_min(sp, pool.row(k))}; });
    }
    // Leximin on the ascending spectrum: prefer lifting the remaining copies of
    // the smallest eigenvalue.
    const std::size_t choice = refine_and_pick(std::move(tied), [&](std::size_t k) {
      SymMatrix cand = acc;
      cand.add_outer(pool.row(k));
      return eigh(cand).values;
    }, rng);
    acc.add_outer(pool.row(choice));
    seq.push_back(choice);
    if (!full_rank) full_rank = numerical_rank(acc, pool.L(), kRankRelTol) == d;
  }
  return seq;
}

std::vector<std::size_t> greedy_G_sequence(const ExperimentPool& pool, std::size_t n, Rng& rng) {
  const std::size_t K = pool.size(), d = pool.dim();
  SymMatrix acc(d);
  std::vector<std::size_t> seq;
  seq.reserve(n);
  bool full_rank = false;
  std::vector<double> gram(K * K);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t choice = 0;
    if (!full_rank) {
      choice = pick_tied(lexicographic_ties(K, [&](std::size_t k) {
        SymMatrix cand = acc;
        cand.add_outer(pool.row(k));
        const std::size_t rank = numerical_rank(cand, pool.L(), kRankRelTol);
        if (rank < d) return Score{rank, 0.0};
        return Score{rank, -crit_G(pool, cand)};
      }), rng);
    } else {
      // Sherman-Morrison: x_j^T (A + x_k x_k^T)^{-1} x_j = G_jj - G_jk^2 / (1 + G_kk)
      const SymMatrix inv = psd_inverse(acc, 1e-14);
      for (std::size_t i = 0; i < K; ++i) {
        const Vector vi = inv.apply(pool.row(i));
        for (std::size_t j = i; j < K; ++j) {
          auto rj = pool.row(j);
          double v = 0.0;
          for (std::size_t q = 0; q < d; ++q) v += vi[q] * rj[q];
          gram[i * K + j] = gram[j * K + i] = v;
        }
      }
      auto post_leverage = [&](std::size_t k) {
        const double denom = 1.0 + gram[k * K + k];
        Vector lev(K);
        for (std::size_t j = 0; j < K; ++j) {
          const double g = gram[j * K + k];
          lev[j] = gram[j * K + j] - g * g / denom;
        }
        return lev;
      };
      auto tied = lexicographic_ties(K, [&](std::size_t k) {
        const Vector lev = post_leverage(k);
        return Score{d, -*std::max_element(lev.begin(), lev.end())};
      });
      // Among ties, minimize the descending leverage profile lexicographically.
      choice = refine_and_pick(std::move(tied), [&](std::size_t k) {
        Vector lev = post_leverage(k);
        std::sort(lev.begin(), lev.end(), std::greater<>());
        for (double& v : lev) v = -v;
        return lev;
      }, rng);
    }
    acc.add_outer(pool.row(choice));
    seq.push_back(choice);
    if (!full_rank) full_rank = numerical_rank(acc, pool.L(), kRankRelTol) == d;
  }
  return seq;
}

SampleCounts greedy_E(const ExperimentPool& pool, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("greedy selection needs n >= 1");
  const auto seq = greedy_E_sequence(pool, n, rng);
  return counts_from_sequence(seq, pool.size(), n);
}

SampleCounts greedy_G(const ExperimentPool& pool, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("greedy selection needs n >= 1");
  const auto seq = greedy_G_sequence(pool, n, rng);
  return counts_from_sequence(seq, pool.size(), n);
}

}  // namespace rdesign
