#pragma once

// Dense symmetric-matrix machinery: eigendecomposition, spectral functionals,
// matrix functions and the intrinsic-dimension family of spectrum summaries.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace rdesign {

using Vector = std::vector<double>;

/// Real symmetric d x d matrix stored densely in row-major order.
///
/// Construction from raw entries symmetrizes by averaging (i,j) and (j,i),
/// so entries(i,j) == entries(j,i) holds bit-for-bit afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);
  SymMatrix(std::size_t dim, std::vector<double> row_major);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix outer(std::span<const double> x);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  double trace() const noexcept;
  double max_abs() const noexcept;
  bool all_finite() const noexcept;

  /// x^T S x
  double quad_form(std::span<const double> x) const;
  /// x^T S y
  double bilinear(std::span<const double> x, std::span<const double> y) const;
  Vector apply(std::span<const double> x) const;

  /// S += w * x x^T
  SymMatrix& add_outer(std::span<const double> x, double w = 1.0);

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double c) noexcept;

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double c) { return a *= c; }
  friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }
  SymMatrix operator-() const { return *this * -1.0; }

  /// A B A for symmetric B.
  SymMatrix sandwich(const SymMatrix& middle) const;
  /// A^2
  SymMatrix square() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

/// Eigenvalues ascending, eigenvectors as orthonormal columns.
struct Spectrum {
  Vector values;
  std::vector<double> vectors;  // column-major: column k holds the k-th eigenvector

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const double> vector(std::size_t k) const {
    return std::span<const double>(vectors).subspan(k * dim(), dim());
  }
  /// Q diag(f(values)) Q^T
  SymMatrix compose(std::span<const double> new_values) const;
};

struct DimensionSummary {
  double intdim = 0.0;
  double updim = 0.0;
  double lowdim = 0.0;
  double cond = 0.0;
  double lambda_min = 0.0;
  double spectral_norm = 0.0;
  bool flat = false;  // spectrum flat to 1e-12 relative; updim = d, lowdim = 0 by convention
};

/// Cyclic Jacobi eigendecomposition. Deterministic; eigenvectors are signed so
/// that their first non-negligible component is positive.
Spectrum eigh(const SymMatrix& s);

double lambda_max(const SymMatrix& s);
double lambda_min(const SymMatrix& s);
/// max |lambda|; equals the largest eigenvalue for PSD input.
double spectral_norm(const SymMatrix& s);

/// Spectral inverse; throws Singular when some eigenvalue is <= tol * ||S||.
SymMatrix psd_inverse(const SymMatrix& s, double tol = 1e-12);

/// Projection onto the PSD cone (eigenvalues clipped at zero).
SymMatrix positive_part(const SymMatrix& s);

/// Q f(D) Q^T; throws DomainError when f is non-finite at an eigenvalue.
SymMatrix matrix_function(const SymMatrix& s, const std::function<double(double)>& f);

/// Intrinsic, upper and lower intrinsic dimensions plus conditioning.
DimensionSummary dimension_summary(const SymMatrix& s);

/// Number of eigenvalues above rel_tol * scale.
std::size_t numerical_rank(const SymMatrix& s, double scale, double rel_tol = 1e-9);

/// Cholesky factorization for the inner loops of the solvers, where the input is
/// known to be positive definite whenever it is valid at all.
class Cholesky {
 public:
  explicit Cholesky(const SymMatrix& s);
  bool ok() const noexcept { return ok_; }
  Vector solve(std::span<const double> b) const;
  SymMatrix inverse() const;
  double log_det() const;

 private:
  std::size_t dim_;
  std::vector<double> lower_;
  bool ok_ = false;
};

}  // namespace rdesign
