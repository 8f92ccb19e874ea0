#include "rdesign/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rdesign/error.hpp"

namespace rdesign {

namespace {

constexpr double kJacobiRelTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;
constexpr double kFlatRelTol = 1e-12;

void require_same_dim(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInput("matrix dimensions differ");
}

}  // namespace

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw InvalidInput("matrix dimension must be >= 1");
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> row_major) : dim_(dim), data_(std::move(row_major)) {
  if (dim == 0) throw InvalidInput("matrix dimension must be >= 1");
  if (data_.size() != dim * dim) throw InvalidInput("entry count does not match dimension");
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double avg = 0.5 * (data_[i * dim + j] + data_[j * dim + i]);
      data_[i * dim + j] = avg;
      data_[j * dim + i] = avg;
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.data_[i * dim + i] = 1.0;
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.data_[i * diag.size() + i] = diag[i];
  return s;
}

SymMatrix SymMatrix::outer(std::span<const double> x) {
  SymMatrix s(x.size());
  s.add_outer(x);
  return s;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
  return t;
}

double SymMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool SymMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double SymMatrix::quad_form(std::span<const double> x) const { return bilinear(x, x); }

double SymMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw InvalidInput("vector length does not match matrix dimension");
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = &data_[i * dim_];
    double r = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) r += row[j] * y[j];
    acc += x[i] * r;
  }
  return acc;
}

Vector SymMatrix::apply(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidInput("vector length does not match matrix dimension");
  Vector out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* row = &data_[i * dim_];
    double r = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) r += row[j] * x[j];
    out[i] = r;
  }
  return out;
}

SymMatrix& SymMatrix::add_outer(std::span<const double> x, double w) {
  if (x.size() != dim_) throw InvalidInput("vector length does not match matrix dimension");
  for (std::size_t i = 0; i < dim_; ++i) {
    const double wi = w * x[i];
    for (std::size_t j = i; j < dim_; ++j) {
      const double v = wi * x[j];
      data_[i * dim_ + j] += v;
      if (j != i) data_[j * dim_ + i] += v;
    }
  }
  return *this;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double c) noexcept {
  for (double& v : data_) v *= c;
  return *this;
}

SymMatrix SymMatrix::sandwich(const SymMatrix& middle) const {
  require_same_dim(*this, middle);
  const std::size_t d = dim_;
  std::vector<double> tmp(d * d, 0.0);  // middle * this
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double m = middle.data_[i * d + k];
      for (std::size_t j = 0; j < d; ++j) tmp[i * d + j] += m * data_[k * d + j];
    }
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double a = data_[i * d + k];
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += a * tmp[k * d + j];
    }
  return SymMatrix(d, std::move(out));
}

SymMatrix SymMatrix::square() const { return sandwich(identity(dim_)); }

SymMatrix Spectrum::compose(std::span<const double> new_values) const {
  const std::size_t d = dim();
  if (new_values.size() != d) throw InvalidInput("value count does not match spectrum dimension");
  std::vector<double> out(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double lam = new_values[k];
    if (lam == 0.0) continue;
    auto q = vector(k);
    for (std::size_t i = 0; i < d; ++i) {
      const double qi = lam * q[i];
      for (std::size_t j = 0; j < d; ++j) out[i * d + j] += qi * q[j];
    }
  }
  return SymMatrix(d, std::move(out));
}

Spectrum eigh(const SymMatrix& s) {
  if (!s.all_finite()) throw InvalidInput("matrix has non-finite entries");
  const std::size_t d = s.dim();
  std::vector<double> a(s.data().begin(), s.data().end());
  std::vector<double> v(d * d, 0.0);  // row-major accumulation of rotations; columns are eigenvectors
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  double frob2 = 0.0;
  for (double x : a) frob2 += x * x;
  const double threshold = kJacobiRelTol * std::sqrt(frob2);

  auto off_norm = [&] {
    double off = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) off += 2.0 * a[i * d + j] * a[i * d + j];
    return std::sqrt(off);
  };

  for (int sweep = 0; sweep < kJacobiMaxSweeps && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a[p * d + q];
        if (apq == 0.0) continue;
        const double app = a[p * d + p];
        const double aqq = a[q * d + q];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a[k * d + p];
          const double akq = a[k * d + q];
          a[k * d + p] = c * akp - sn * akq;
          a[k * d + q] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a[p * d + k];
          const double aqk = a[q * d + k];
          a[p * d + k] = c * apk - sn * aqk;
          a[q * d + k] = sn * apk + c * aqk;
        }
        a[p * d + q] = 0.0;
        a[q * d + p] = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - sn * vkq;
          v[k * d + q] = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i * d + i] < a[j * d + j]; });

  Spectrum out;
  out.values.resize(d);
  out.vectors.resize(d * d);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a[src * d + src];
    double* col = &out.vectors[k * d];
    for (std::size_t i = 0; i < d; ++i) col[i] = v[i * d + src];
    for (std::size_t i = 0; i < d; ++i) {
      if (std::abs(col[i]) > 1e-13) {
        if (col[i] < 0.0)
          for (std::size_t j = 0; j < d; ++j) col[j] = -col[j];
        break;
      }
    }
  }
  return out;
}

double lambda_max(const SymMatrix& s) { return eigh(s).values.back(); }

double lambda_min(const SymMatrix& s) { return eigh(s).values.front(); }

double spectral_norm(const SymMatrix& s) {
  const auto sp = eigh(s);
  return std::max(std::abs(sp.values.front()), std::abs(sp.values.back()));
}

SymMatrix psd_inverse(const SymMatrix& s, double tol) {
  const auto sp = eigh(s);
  const double norm = std::max(std::abs(sp.values.front()), std::abs(sp.values.back()));
  if (sp.values.front() <= tol * norm || norm == 0.0) throw Singular(sp.values.front());
  Vector inv(sp.values.size());
  std::transform(sp.values.begin(), sp.values.end(), inv.begin(), [](double l) { return 1.0 / l; });
  return sp.compose(inv);
}

SymMatrix positive_part(const SymMatrix& s) {
  const auto sp = eigh(s);
  Vector clipped(sp.values.size());
  std::transform(sp.values.begin(), sp.values.end(), clipped.begin(), [](double l) { return std::max(l, 0.0); });
  return sp.compose(clipped);
}

SymMatrix matrix_function(const SymMatrix& s, const std::function<double(double)>& f) {
  const auto sp = eigh(s);
  Vector mapped(sp.values.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    mapped[k] = f(sp.values[k]);
    if (!std::isfinite(mapped[k]))
      throw DomainError("function is not finite at eigenvalue " + std::to_string(sp.values[k]));
  }
  return sp.compose(mapped);
}

DimensionSummary dimension_summary(const SymMatrix& s) {
  const auto sp = eigh(s);
  const double d = static_cast<double>(s.dim());
  const double top = sp.values.back();
  const double bottom = sp.values.front();
  if (top <= 0.0) throw InvalidInput("dimension summary needs a nonzero PSD matrix");
  const double tr = std::accumulate(sp.values.begin(), sp.values.end(), 0.0);

  DimensionSummary out;
  out.spectral_norm = top;
  out.lambda_min = bottom;
  out.intdim = std::clamp(tr / top, 1.0, d);
  out.cond = bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
  if (top - bottom <= kFlatRelTol * top) {
    out.flat = true;
    out.updim = d;
    out.lowdim = 0.0;
  } else {
    const double spread = top - bottom;
    out.updim = (tr - d * bottom) / spread;
    out.lowdim = (d * top - tr) / spread;
  }
  return out;
}

std::size_t numerical_rank(const SymMatrix& s, double scale, double rel_tol) {
  const auto sp = eigh(s);
  const double cut = rel_tol * scale;
  return static_cast<std::size_t>(std::count_if(sp.values.begin(), sp.values.end(), [&](double l) { return l > cut; }));
}

Cholesky::Cholesky(const SymMatrix& s) : dim_(s.dim()), lower_(s.dim() * s.dim(), 0.0) {
  const std::size_t d = dim_;
  for (std::size_t j = 0; j < d; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lower_[j * d + k] * lower_[j * d + k];
    if (!(diag > 0.0)) return;
    const double ljj = std::sqrt(diag);
    lower_[j * d + j] = ljj;
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= lower_[i * d + k] * lower_[j * d + k];
      lower_[i * d + j] = v / ljj;
    }
  }
  ok_ = true;
}

Vector Cholesky::solve(std::span<const double> b) const {
  if (!ok_) throw Singular(0.0);
  if (b.size() != dim_) throw InvalidInput("right-hand side length does not match");
  const std::size_t d = dim_;
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < d; ++i) {
    double v = y[i];
    for (std::size_t k = 0; k < i; ++k) v -= lower_[i * d + k] * y[k];
    y[i] = v / lower_[i * d + i];
  }
  for (std::size_t ii = d; ii-- > 0;) {
    double v = y[ii];
    for (std::size_t k = ii + 1; k < d; ++k) v -= lower_[k * d + ii] * y[k];
    y[ii] = v / lower_[ii * d + ii];
  }
  return y;
}

SymMatrix Cholesky::inverse() const {
  const std::size_t d = dim_;
  std::vector<double> out(d * d);
  Vector e(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const auto col = solve(e);
    for (std::size_t i = 0; i < d; ++i) out[i * d + j] = col[i];
  }
  return SymMatrix(d, std::move(out));
}

double Cholesky::log_det() const {
  if (!ok_) throw Singular(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) acc += std::log(lower_[i * dim_ + i]);
  return 2.0 * acc;
}

}  // namespace rdesign
