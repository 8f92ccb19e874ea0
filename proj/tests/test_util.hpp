#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "rdesign/design.hpp"
#include "rdesign/random.hpp"
#include "rdesign/spectral.hpp"

namespace testutil {

inline rdesign::SymMatrix random_sym(std::size_t d, rdesign::Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<double> a(d * d);
  for (double& v : a) v = g(rng);
  return rdesign::SymMatrix(d, std::move(a));
}

/// G G^T with G Gaussian d x (d + 2): positive definite almost surely.
inline rdesign::SymMatrix random_psd(std::size_t d, rdesign::Rng& rng) {
  std::normal_distribution<double> g;
  rdesign::SymMatrix s(d);
  for (std::size_t c = 0; c < d + 2; ++c) {
    rdesign::Vector col(d);
    for (double& v : col) v = g(rng);
    s.add_outer(col);
  }
  return s;
}

inline rdesign::DesignWeights random_weights(std::size_t K, rdesign::Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  rdesign::Vector w(K);
  double sum = 0.0;
  for (double& v : w) sum += v = e(rng);
  for (double& v : w) v /= sum;
  return rdesign::DesignWeights(std::move(w));
}

inline rdesign::ExperimentPool random_pool(std::size_t K, std::size_t d, rdesign::Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<rdesign::Vector> rows(K, rdesign::Vector(d));
  for (auto& r : rows)
    for (double& v : r) v = g(rng);
  return rdesign::ExperimentPool(d, std::move(rows));
}

/// Unit-norm rows in R^2 at random angles.
inline rdesign::ExperimentPool random_unit_pool2(std::size_t K, rdesign::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, std::numbers::pi);
  std::vector<rdesign::Vector> rows;
  for (std::size_t k = 0; k < K; ++k) {
    const double a = u(rng);
    rows.push_back({std::cos(a), std::sin(a)});
  }
  return rdesign::ExperimentPool(2, std::move(rows));
}

inline double max_abs_diff(const rdesign::SymMatrix& a, const rdesign::SymMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

struct GridOptimum {
  double best_E = 0.0;
  double best_G = 1e300;
};

/// Brute force over the 3-simplex on a 1/steps lattice.
struct GridScore {
  double lmin;
  double worst_leverage;  // +inf when singular
};

/// 2x2 closed forms, independent of the library's eigensolver.
inline GridScore grid_score3(const rdesign::ExperimentPool& pool, const double w[3]) {
  rdesign::SymMatrix m(pool.dim());
  for (std::size_t k = 0; k < 3; ++k) m.add_outer(pool.row(k), w[k]);
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double disc = std::sqrt((a - c) * (a - c) / 4.0 + b * b);
  GridScore out{(a + c) / 2.0 - disc, std::numeric_limits<double>::infinity()};
  const double det = a * c - b * b;
  if (det > 1e-12) {
    double worst = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      auto x = pool.row(k);
      worst = std::max(worst, (c * x[0] * x[0] - 2 * b * x[0] * x[1] + a * x[1] * x[1]) / det);
    }
    out.worst_leverage = worst;
  }
  return out;
}

/// Exhaustive simplex grid over three weights, followed by a few zoomed passes
/// around each incumbent so ill-conditioned optima are still resolved.
inline GridOptimum grid_oracle3(const rdesign::ExperimentPool& pool, int steps, int zooms = 4) {
  GridOptimum out;
  double best_e[2] = {0, 0}, best_g[2] = {0, 0};
  auto visit = [&](double u, double v) {
    if (u < 0 || v < 0 || u + v > 1) return;
    const double w[3] = {u, v, 1.0 - u - v};
    const GridScore s = grid_score3(pool, w);
    if (s.lmin > out.best_E) {
      out.best_E = s.lmin;
      best_e[0] = u;
      best_e[1] = v;
    }
    if (s.worst_leverage < out.best_G) {
      out.best_G = s.worst_leverage;
      best_g[0] = u;
      best_g[1] = v;
    }
  };
  for (int i = 0; i <= steps; ++i)
    for (int j = 0; i + j <= steps; ++j) visit(double(i) / steps, double(j) / steps);
  double h = 1.0 / steps;
  for (int z = 0; z < zooms; ++z) {
    const double ce[2] = {best_e[0], best_e[1]}, cg[2] = {best_g[0], best_g[1]};
    const double fine = h / 20.0;
    for (int i = -20; i <= 20; ++i)
      for (int j = -20; j <= 20; ++j) {
        visit(ce[0] + i * fine, ce[1] + j * fine);
        visit(cg[0] + i * fine, cg[1] + j * fine);
      }
    h = fine;
  }
  return out;
}

}  // namespace testutil
