#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lts/errors.hpp"
#include "lts/numerics.hpp"

namespace lts {

/// Relative tolerances used whenever the algorithm needs an equality test on
/// floating-point quantities. The underlying theory works with exact
/// arithmetic; these make the equalities decidable in doubles.
struct TolerancePolicy {
  double residual_eq_tol = 1e-8;
  double pivot_tol = 1e-12;

  /// Two squared residuals count as equal when
  /// |a - b| <= residual_eq_tol * (1 + max(a, b)).
  bool residuals_equal(double a, double b) const {
    return std::abs(a - b) <= residual_eq_tol * (1.0 + std::max(a, b));
  }

  void validate() const {
    if (!(residual_eq_tol > 0.0) || !(pivot_tol > 0.0)) {
      throw InvalidInputError("tolerances must be strictly positive");
    }
  }
};

/// Regression data: n observations, p regressors. When has_intercept is set
/// the first column of X is identically one; the flag only changes which
/// assumption variant the diagnostics check, not the solver path.
struct Dataset {
  Matrix X;
  std::vector<double> Y;
  bool has_intercept = false;

  std::size_t n() const { return X.rows; }
  std::size_t p() const { return X.cols; }

  void validate() const {
    if (p() < 1) throw InvalidInputError("dataset needs at least one regressor");
    if (n() <= p()) throw InvalidInputError("dataset needs n > p observations");
    if (Y.size() != n()) throw InvalidInputError("X and Y row counts differ");
    if (!X.all_finite() ||
        !std::all_of(Y.begin(), Y.end(), [](double v) { return std::isfinite(v); })) {
      throw InvalidInputError("dataset contains non-finite entries");
    }
    if (has_intercept) {
      for (std::size_t i = 0; i < n(); ++i) {
        if (X(i, 0) != 1.0) {
          throw InvalidInputError("intercept flag set but column 1 is not all ones");
        }
      }
    }
  }
};

/// A dataset together with the trim count h (how many observations the fit
/// must explain) and the tolerance policy.
struct Problem {
  Dataset data;
  std::size_t h = 0;
  TolerancePolicy tol;

  std::size_t n() const { return data.n(); }
  std::size_t p() const { return data.p(); }

  void validate() const {
    data.validate();
    tol.validate();
    if (h < p() || h > n()) throw InvalidInputError("h must satisfy p <= h <= n");
  }
};

/// Selection of exactly h of the n observations. Stored as the sorted list of
/// selected 0-based indices; comparisons are lexicographic on that list, which
/// is the enumeration and tie-break order used throughout.
class SubsetMask {
 public:
  SubsetMask() = default;
  SubsetMask(std::size_t n, std::vector<std::size_t> indices)
      : n_(n), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
      throw InvalidInputError("subset mask has repeated indices");
    }
    if (!indices_.empty() && indices_.back() >= n_) {
      throw InvalidInputError("subset mask index out of range");
    }
  }

  std::size_t n() const { return n_; }
  std::size_t count() const { return indices_.size(); }
  const std::vector<std::size_t>& indices() const { return indices_; }

  bool contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }

  std::vector<bool> bits() const {
    std::vector<bool> b(n_, false);
    for (std::size_t i : indices_) b[i] = true;
    return b;
  }

  std::vector<std::size_t> one_based() const {
    std::vector<std::size_t> out(indices_);
    for (auto& v : out) ++v;
    return out;
  }

  friend bool operator==(const SubsetMask& a, const SubsetMask& b) {
    return a.n_ == b.n_ && a.indices_ == b.indices_;
  }
  friend bool operator!=(const SubsetMask& a, const SubsetMask& b) { return !(a == b); }
  friend bool operator<(const SubsetMask& a, const SubsetMask& b) {
    return a.indices_ < b.indices_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> indices_;
};

/// Work counters populated by the solvers.
struct Counters {
  std::uint64_t index_tuples_visited = 0;
  std::uint64_t systems_solved = 0;
  std::uint64_t regular_systems = 0;
  std::uint64_t candidates_in_Hp = 0;
  std::uint64_t J_evaluations = 0;

  Counters& operator+=(const Counters& o) {
    index_tuples_visited += o.index_tuples_visited;
    systems_solved += o.systems_solved;
    regular_systems += o.regular_systems;
    candidates_in_Hp += o.candidates_in_Hp;
    J_evaluations += o.J_evaluations;
    return *this;
  }
};

/// Solver output: coefficient estimate, objective value, winning subset, and
/// the work counters accumulated along the way.
struct FitResult {
  std::vector<double> beta;
  double objective = 0.0;
  SubsetMask mask;
  Counters counters;
};

/// OLS fit restricted to one subset, with its residual sum of squares there.
struct SubsetFit {
  std::vector<double> beta;
  double value = 0.0;
};

inline std::vector<double> squared_residuals(const Dataset& data,
                                             std::span<const double> beta) {
  if (beta.size() != data.p()) {
    throw InvalidInputError("squared_residuals: beta size mismatch");
  }
  if (!std::all_of(beta.begin(), beta.end(), [](double v) { return std::isfinite(v); })) {
    throw InvalidInputError("squared_residuals: non-finite beta");
  }
  std::vector<double> out(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    double r = data.Y[i];
    for (std::size_t j = 0; j < data.p(); ++j) r -= data.X(i, j) * beta[j];
    out[i] = r * r;
  }
  return out;
}

inline std::vector<double> squared_residuals(const Problem& problem,
                                             std::span<const double> beta) {
  return squared_residuals(problem.data, beta);
}

namespace detail {

/// Indices 0..n-1 ordered by ascending value, exact value ties broken by
/// ascending index.
inline std::vector<std::size_t> ascending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return a < b;
  });
  return order;
}

}  // namespace detail

/// Sum of the h smallest squared residuals at beta.
inline double lts_objective(const Problem& problem, std::span<const double> beta) {
  std::vector<double> sq = squared_residuals(problem, beta);
  std::sort(sq.begin(), sq.end());
  long double acc = 0.0;
  for (std::size_t i = 0; i < problem.h; ++i) acc += sq[i];
  return static_cast<double>(acc);
}

/// OLS on the rows selected by the mask; returns nullopt when those rows are
/// rank deficient (the subset is not h-full rank).
inline std::optional<SubsetFit> try_subset_objective(const Problem& problem,
                                                     const SubsetMask& mask) {
  const std::size_t h = mask.count();
  const std::size_t p = problem.p();
  if (mask.n() != problem.n()) {
    throw InvalidInputError("subset mask size does not match the dataset");
  }
  if (h < p) throw InvalidInputError("subset smaller than the coefficient count");

  Matrix xs(h, p);
  std::vector<double> ys(h);
  std::size_t r = 0;
  for (std::size_t i : mask.indices()) {
    for (std::size_t j = 0; j < p; ++j) xs(r, j) = problem.data.X(i, j);
    ys[r] = problem.data.Y[i];
    ++r;
  }
  auto beta = try_least_squares(xs, ys, problem.tol.pivot_tol);
  if (!beta) return std::nullopt;

  long double acc = 0.0;
  for (std::size_t k = 0; k < h; ++k) {
    long double res = ys[k];
    for (std::size_t j = 0; j < p; ++j) {
      res -= static_cast<long double>(xs(k, j)) * (*beta)[j];
    }
    acc += res * res;
  }
  return SubsetFit{*std::move(beta), static_cast<double>(acc)};
}

/// Throwing variant of try_subset_objective; the error names the subset.
inline SubsetFit subset_objective_J(const Problem& problem, const SubsetMask& mask) {
  auto fit = try_subset_objective(problem, mask);
  if (!fit) {
    std::string msg = "subset is rank deficient: {";
    const auto one_based = mask.one_based();
    for (std::size_t k = 0; k < one_based.size(); ++k) {
      if (k) msg += ",";
      msg += std::to_string(one_based[k]);
    }
    msg += "}";
    throw SingularFitError(msg, mask.indices());
  }
  return *std::move(fit);
}

namespace detail {

/// Relative tolerance under which two objective values count as tied, in
/// which case the lexicographically smaller mask wins.
inline constexpr double kObjectiveTieRelTol = 1e-12;

/// Best candidate seen so far during a solver scan.
struct BestFit {
  double value = 0.0;
  SubsetMask mask;
  std::vector<double> beta;
};

/// Decides whether a challenger (value, mask) displaces the incumbent under
/// the deterministic tie-break: smaller objective wins; near-equal objectives
/// fall back to lexicographic mask order.
inline bool fit_improves(double value, const SubsetMask& mask, const BestFit& best) {
  if (std::abs(value - best.value) <=
      kObjectiveTieRelTol * std::max(value, best.value)) {
    return mask < best.mask;
  }
  return value < best.value;
}

/// Folds a challenger into the running best.
inline void fold_best(std::optional<BestFit>& best, double value,
                      const SubsetMask& mask, std::span<const double> beta) {
  if (!best || fit_improves(value, mask, *best)) {
    best = BestFit{value, mask, std::vector<double>(beta.begin(), beta.end())};
  }
}

/// Per-chunk accumulator for the solver scans.
struct ScanState {
  Counters counters;
  std::optional<BestFit> best;
};

inline void combine_scan_states(ScanState& acc, ScanState&& part) {
  acc.counters += part.counters;
  if (part.best) {
    fold_best(acc.best, part.best->value, part.best->mask, part.best->beta);
  }
}

/// A pair of rows (or one row, when i == j) violating the pairwise
/// independence requirement: row i equals row j (negated = false), row i
/// equals -row j (negated = true), or row i is zero (i == j).
struct PairwiseCollision {
  std::size_t i = 0;
  std::size_t j = 0;
  bool negated = false;
};

inline std::optional<PairwiseCollision> find_pairwise_collision(const Matrix& x,
                                                                double tol) {
  const std::size_t n = x.rows;
  const std::size_t p = x.cols;
  std::vector<double> row_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      row_scale[i] = std::max(row_scale[i], std::abs(x(i, j)));
    }
    if (row_scale[i] <= tol) return PairwiseCollision{i, i, false};
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = 1.0 + std::max(row_scale[i], row_scale[j]);
      bool same = true;
      bool mirrored = true;
      for (std::size_t k = 0; k < p && (same || mirrored); ++k) {
        if (std::abs(x(i, k) - x(j, k)) > tol * scale) same = false;
        if (std::abs(x(i, k) + x(j, k)) > tol * scale) mirrored = false;
      }
      if (same) return PairwiseCollision{i, j, false};
      if (mirrored) return PairwiseCollision{i, j, true};
    }
  }
  return std::nullopt;
}

}  // namespace detail

}  // namespace lts
