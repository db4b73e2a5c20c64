#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "lts/errors.hpp"

namespace lts {

/// Dense row-major matrix of doubles. Sized for small regression problems;
/// no attempt is made at cache blocking or sparsity.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major, rows*cols values

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), entries(r * c, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = init.size();
    cols = rows == 0 ? 0 : init.begin()->size();
    entries.reserve(rows * cols);
    for (const auto& row : init) {
      if (row.size() != cols) {
        throw InvalidInputError("matrix initializer rows have unequal lengths");
      }
      entries.insert(entries.end(), row.begin(), row.end());
    }
  }

  static Matrix column(std::span<const double> values) {
    Matrix m(values.size(), 1);
    std::copy(values.begin(), values.end(), m.entries.begin());
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {entries.data() + r * cols, cols};
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : entries) m = std::max(m, std::abs(v));
    return m;
  }

  bool all_finite() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](double v) { return std::isfinite(v); });
  }
};

enum class SolveStatus { Regular, Singular };

/// Outcome of a square solve; `solution` is present exactly when Regular.
struct SolveOutcome {
  SolveStatus status = SolveStatus::Singular;
  std::optional<std::vector<double>> solution;
};

namespace detail {

inline void require_finite(const Matrix& a, std::span<const double> b,
                           const char* where) {
  if (!a.all_finite() ||
      !std::all_of(b.begin(), b.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInputError(std::string(where) + ": non-finite input entries");
  }
}

}  // namespace detail

/// Solves the square system A x = b by Gaussian elimination with partial
/// pivoting. The system is declared Singular as soon as the pivot magnitude
/// drops to pivot_tol times the largest initial entry of A; a near-singular
/// candidate system means the underlying sign equations are dependent and the
/// caller skips it. Two refinement sweeps against the original matrix keep the
/// residual at round-off level for well-conditioned inputs.
inline SolveOutcome solve_square(const Matrix& a, std::span<const double> b,
                                 double pivot_tol) {
  if (a.rows != a.cols) throw InvalidInputError("solve_square: matrix not square");
  if (b.size() != a.rows) throw InvalidInputError("solve_square: rhs size mismatch");
  if (!(pivot_tol > 0.0)) throw InvalidInputError("solve_square: pivot_tol must be positive");
  detail::require_finite(a, b, "solve_square");

  const std::size_t p = a.rows;
  const double scale = a.max_abs();
  if (scale == 0.0) return {SolveStatus::Singular, std::nullopt};
  const double threshold = pivot_tol * scale;

  Matrix lu = a;
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < p; ++k) {
    std::size_t pivot_row = k;
    double pivot_mag = std::abs(lu(k, k));
    for (std::size_t i = k + 1; i < p; ++i) {
      const double mag = std::abs(lu(i, k));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag <= threshold) return {SolveStatus::Singular, std::nullopt};
    if (pivot_row != k) {
      for (std::size_t j = 0; j < p; ++j) std::swap(lu(k, j), lu(pivot_row, j));
      std::swap(perm[k], perm[pivot_row]);
    }
    for (std::size_t i = k + 1; i < p; ++i) {
      const double factor = lu(i, k) / lu(k, k);
      lu(i, k) = factor;
      for (std::size_t j = k + 1; j < p; ++j) lu(i, j) -= factor * lu(k, j);
    }
  }

  auto lu_solve = [&](std::span<const double> rhs) {
    std::vector<double> x(p);
    for (std::size_t i = 0; i < p; ++i) x[i] = rhs[perm[i]];
    for (std::size_t i = 1; i < p; ++i) {
      for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    }
    for (std::size_t i = p; i-- > 0;) {
      for (std::size_t j = i + 1; j < p; ++j) x[i] -= lu(i, j) * x[j];
      x[i] /= lu(i, i);
    }
    return x;
  };

  std::vector<double> x = lu_solve(b);
  std::vector<double> residual(p);
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t i = 0; i < p; ++i) {
      long double acc = b[i];
      for (std::size_t j = 0; j < p; ++j) {
        acc -= static_cast<long double>(a(i, j)) * x[j];
      }
      residual[i] = static_cast<double>(acc);
    }
    const std::vector<double> correction = lu_solve(residual);
    for (std::size_t i = 0; i < p; ++i) x[i] += correction[i];
  }
  return {SolveStatus::Regular, std::move(x)};
}

/// Least-squares fit of y on the columns of x via Householder QR, with one
/// refinement sweep. Returns nullopt when x is numerically rank deficient
/// (smallest |R_kk| at or below pivot_tol times the largest).
inline std::optional<std::vector<double>> try_least_squares(
    const Matrix& x, std::span<const double> y, double pivot_tol = 1e-12) {
  if (y.size() != x.rows) throw InvalidInputError("least_squares: rhs size mismatch");
  if (x.rows < x.cols) throw InvalidInputError("least_squares: fewer rows than columns");
  if (x.cols == 0) throw InvalidInputError("least_squares: zero columns");
  detail::require_finite(x, y, "least_squares");

  const std::size_t h = x.rows;
  const std::size_t p = x.cols;

  // Factored matrix: R in the upper triangle (diagonal held separately in
  // rdiag), Householder vectors below the diagonal with head coefficient in
  // vhead.
  Matrix qr = x;
  std::vector<double> rdiag(p, 0.0);
  std::vector<double> vhead(p, 0.0);
  std::vector<double> vscale(p, 0.0);  // 2 / v'v per column, 0 for skipped

  for (std::size_t k = 0; k < p; ++k) {
    long double norm_sq = 0.0;
    for (std::size_t i = k; i < h; ++i) {
      norm_sq += static_cast<long double>(qr(i, k)) * qr(i, k);
    }
    const double norm = std::sqrt(static_cast<double>(norm_sq));
    if (norm == 0.0) {
      rdiag[k] = 0.0;
      continue;
    }
    const double alpha = qr(k, k) > 0.0 ? -norm : norm;
    const double head = qr(k, k) - alpha;
    rdiag[k] = alpha;
    vhead[k] = head;
    double vtv = head * head;
    for (std::size_t i = k + 1; i < h; ++i) vtv += qr(i, k) * qr(i, k);
    vscale[k] = vtv > 0.0 ? 2.0 / vtv : 0.0;
    for (std::size_t j = k + 1; j < p; ++j) {
      double dot = head * qr(k, j);
      for (std::size_t i = k + 1; i < h; ++i) dot += qr(i, k) * qr(i, j);
      const double s = dot * vscale[k];
      qr(k, j) -= s * head;
      for (std::size_t i = k + 1; i < h; ++i) qr(i, j) -= s * qr(i, k);
    }
  }

  double max_diag = 0.0;
  for (double d : rdiag) max_diag = std::max(max_diag, std::abs(d));
  if (max_diag == 0.0) return std::nullopt;
  for (double d : rdiag) {
    if (std::abs(d) <= pivot_tol * max_diag) return std::nullopt;
  }

  // Applies the stored reflections, solves R z = (Q'rhs)[0..p).
  auto qr_solve = [&](std::vector<double> rhs) {
    for (std::size_t k = 0; k < p; ++k) {
      if (vscale[k] == 0.0) continue;
      double dot = vhead[k] * rhs[k];
      for (std::size_t i = k + 1; i < h; ++i) dot += qr(i, k) * rhs[i];
      const double s = dot * vscale[k];
      rhs[k] -= s * vhead[k];
      for (std::size_t i = k + 1; i < h; ++i) rhs[i] -= s * qr(i, k);
    }
    std::vector<double> z(p);
    for (std::size_t i = p; i-- > 0;) {
      double v = rhs[i];
      for (std::size_t j = i + 1; j < p; ++j) v -= qr(i, j) * z[j];
      z[i] = v / rdiag[i];
    }
    return z;
  };

  std::vector<double> beta = qr_solve(std::vector<double>(y.begin(), y.end()));

  std::vector<double> residual(h);
  for (std::size_t i = 0; i < h; ++i) {
    long double acc = y[i];
    for (std::size_t j = 0; j < p; ++j) {
      acc -= static_cast<long double>(x(i, j)) * beta[j];
    }
    residual[i] = static_cast<double>(acc);
  }
  const std::vector<double> correction = qr_solve(std::move(residual));
  for (std::size_t j = 0; j < p; ++j) beta[j] += correction[j];
  return beta;
}

/// Throwing wrapper around try_least_squares.
inline std::vector<double> least_squares(const Matrix& x, std::span<const double> y,
                                         double pivot_tol = 1e-12) {
  auto beta = try_least_squares(x, y, pivot_tol);
  if (!beta) {
    throw SingularFitError("least_squares: design matrix is rank deficient");
  }
  return *std::move(beta);
}

/// Numerical rank by row echelon reduction with partial pivoting; a pivot
/// counts while it exceeds rel_tol times the largest initial entry.
inline std::size_t matrix_rank(Matrix m, double rel_tol = 1e-12) {
  const double scale = m.max_abs();
  if (scale == 0.0) return 0;
  const double threshold = rel_tol * scale;
  std::size_t rank = 0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t pivot_row = row;
    double pivot_mag = std::abs(m(row, col));
    for (std::size_t i = row + 1; i < m.rows; ++i) {
      const double mag = std::abs(m(i, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = i;
      }
    }
    if (pivot_mag <= threshold) continue;
    if (pivot_row != row) {
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(row, j), m(pivot_row, j));
    }
    for (std::size_t i = row + 1; i < m.rows; ++i) {
      const double factor = m(i, col) / m(row, col);
      for (std::size_t j = col; j < m.cols; ++j) m(i, j) -= factor * m(row, j);
    }
    ++rank;
    ++row;
  }
  return rank;
}

}  // namespace lts
