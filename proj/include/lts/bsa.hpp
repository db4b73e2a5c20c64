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

#include "lts/combinatorics.hpp"
#include "lts/errors.hpp"
#include "lts/model.hpp"
#include "lts/numerics.hpp"
#include "lts/parallel.hpp"
#include "lts/relation.hpp"

namespace lts {

/// Sign pattern attached to a candidate system; one symbol per equation.
struct SignVector {
  std::vector<bool> is_minus;  // false = "+", true = "-"

  std::size_t size() const { return is_minus.size(); }

  /// Sign vector number `code` in binary-counter order: "+" is the 0 bit and
  /// the last position flips fastest, so for p = 2 the order is
  /// (+,+), (+,-), (-,+), (-,-).
  static SignVector from_code(std::uint64_t code, std::size_t p) {
    SignVector sv;
    sv.is_minus.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
      sv.is_minus[k] = ((code >> (p - 1 - k)) & 1u) != 0;
    }
    return sv;
  }

  std::string str() const {
    std::string s;
    s.reserve(size());
    for (bool m : is_minus) s.push_back(m ? '-' : '+');
    return s;
  }
};

/// One root of a candidate system, remembered with its provenance.
struct CandidatePoint {
  std::vector<double> beta;
  std::vector<std::size_t> tuple;  // p+1 distinct 0-based observation indices
  SignVector signs;
  bool in_Hp = false;
};

/// The two possible intersection points of the residual-equality curves of
/// observations i and j in the one-regressor case: (y_i - y_j)/(x_i - x_j)
/// from the minus-type equality and (y_i + y_j)/(x_i + x_j) from the
/// plus-type one, in that order. A root whose denominator is negligible
/// relative to the data is skipped; coinciding roots collapse to one entry.
inline std::vector<double> candidate_roots_1d(const Problem& problem, std::size_t i,
                                              std::size_t j) {
  if (problem.p() != 1) throw InvalidInputError("candidate_roots_1d requires p = 1");
  if (i == j) throw InvalidInputError("candidate_roots_1d requires distinct indices");
  const double xi = problem.data.X(i, 0);
  const double xj = problem.data.X(j, 0);
  const double yi = problem.data.Y[i];
  const double yj = problem.data.Y[j];
  const double scale = std::max(std::abs(xi), std::abs(xj));
  const double floor = problem.tol.pivot_tol * scale;

  std::vector<double> roots;
  if (std::abs(xi - xj) > floor) roots.push_back((yi - yj) / (xi - xj));
  if (std::abs(xi + xj) > floor) {
    const double plus_root = (yi + yj) / (xi + xj);
    if (roots.empty() || roots.front() != plus_root) roots.push_back(plus_root);
  }
  return roots;
}

/// Builds the p x p candidate system for an index tuple (i_1, ..., i_{p+1})
/// and a sign vector: equation k combines observation i_1 with observation
/// i_{k+1} under sign k, so row k of A is x_{i_1} o_k x_{i_{k+1}} and entry k
/// of b is y_{i_1} o_k y_{i_{k+1}}. Every equation is anchored at i_1.
inline std::pair<Matrix, std::vector<double>> build_candidate_system(
    const Problem& problem, std::span<const std::size_t> tuple,
    const SignVector& signs) {
  const std::size_t p = problem.p();
  if (tuple.size() != p + 1) {
    throw InvalidInputError("candidate system needs p+1 indices");
  }
  if (signs.size() != p) throw InvalidInputError("sign vector length must be p");

  const std::size_t anchor = tuple[0];
  Matrix a(p, p);
  std::vector<double> b(p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t other = tuple[k + 1];
    const double s = signs.is_minus[k] ? -1.0 : 1.0;
    for (std::size_t col = 0; col < p; ++col) {
      a(k, col) = problem.data.X(anchor, col) + s * problem.data.X(other, col);
    }
    b[k] = problem.data.Y[anchor] + s * problem.data.Y[other];
  }
  return {std::move(a), std::move(b)};
}

/// Membership test for the candidate set: beta qualifies when the anchor
/// observation's squared residual equals both the h-th and the (h+1)-th
/// ordered squared residual. With h = n there is no (h+1)-th value and no
/// trimming boundary, so the test is false by convention.
inline bool test_candidate(const Problem& problem, std::span<const double> beta,
                           std::size_t anchor) {
  const std::size_t n = problem.n();
  const std::size_t h = problem.h;
  if (h == n) return false;

  std::vector<double> sq = squared_residuals(problem, beta);
  const double anchor_sq = sq[anchor];
  std::sort(sq.begin(), sq.end());
  const double at_h = sq[h - 1];
  const double above_h = sq[h];
  return problem.tol.residuals_equal(at_h, above_h) &&
         problem.tol.residuals_equal(anchor_sq, at_h) &&
         problem.tol.residuals_equal(anchor_sq, above_h);
}

namespace detail {

/// Evaluates one accepted candidate point: every mask in relation with beta
/// gets an OLS fit, and each successful fit challenges the running best.
inline void evaluate_candidate(const Problem& problem, std::span<const double> beta,
                               std::uint64_t tie_cap, ScanState& state) {
  state.counters.candidates_in_Hp += 1;
  for (const SubsetMask& mask : subsets_in_relation(problem, beta, tie_cap)) {
    auto fit = try_subset_objective(problem, mask);
    if (!fit) continue;
    state.counters.J_evaluations += 1;
    fold_best(state.best, fit->value, mask, fit->beta);
  }
}

/// Scans pair ranks [begin, end) of the C(n,2) pair space, p = 1 path. Each
/// pair contributes its minus-type and plus-type roots; the anchor for the
/// membership test is the first index of the pair.
inline ScanState scan_pairs_1d(const Problem& problem, std::uint64_t tie_cap,
                               std::uint64_t begin, std::uint64_t end) {
  ScanState state;
  if (begin >= end) return state;
  const std::size_t n = problem.n();
  std::vector<std::size_t> pair = unrank_combination(n, 2, begin);
  for (std::uint64_t r = begin; r < end; ++r) {
    state.counters.index_tuples_visited += 1;
    state.counters.systems_solved += 2;
    const std::vector<double> roots = candidate_roots_1d(problem, pair[0], pair[1]);
    state.counters.regular_systems += roots.size();
    for (double root : roots) {
      const double beta[1] = {root};
      if (test_candidate(problem, beta, pair[0])) {
        evaluate_candidate(problem, beta, tie_cap, state);
      }
    }
    next_combination(pair, n);
  }
  return state;
}

/// Scans flat candidate ranks [begin, end) of the C(n,p+1) x 2^p space for
/// p > 1. The sign code occupies the low p bits, so signs vary fastest and
/// tuples advance lexicographically.
inline ScanState scan_tuples(const Problem& problem, std::uint64_t tie_cap,
                             std::uint64_t begin, std::uint64_t end) {
  ScanState state;
  if (begin >= end) return state;
  const std::size_t n = problem.n();
  const std::size_t p = problem.p();
  const std::uint64_t sign_count = std::uint64_t{1} << p;

  std::vector<std::size_t> tuple = unrank_combination(n, p + 1, begin >> p);
  for (std::uint64_t f = begin; f < end; ++f) {
    const std::uint64_t code = f & (sign_count - 1);
    if (code == 0) state.counters.index_tuples_visited += 1;

    const SignVector signs = SignVector::from_code(code, p);
    auto [a, b] = build_candidate_system(problem, tuple, signs);
    state.counters.systems_solved += 1;
    const SolveOutcome outcome = solve_square(a, b, problem.tol.pivot_tol);
    if (outcome.status == SolveStatus::Regular) {
      state.counters.regular_systems += 1;
      if (test_candidate(problem, *outcome.solution, tuple[0])) {
        evaluate_candidate(problem, *outcome.solution, tie_cap, state);
      }
    }
    if (code == sign_count - 1) next_combination(tuple, n);
  }
  return state;
}

inline std::string one_based_list(std::span<const std::size_t> indices) {
  std::string s = "{";
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(indices[k] + 1);
  }
  s += "}";
  return s;
}

inline NoCandidateError no_candidate_diagnosis(const Problem& problem) {
  std::string msg =
      "no candidate point passed the trimming-boundary test; ";
  auto collision =
      find_pairwise_collision(problem.data.X, problem.tol.residual_eq_tol);
  if (collision) {
    if (collision->i == collision->j) {
      msg += "row " + std::to_string(collision->i + 1) +
             " of X is zero, violating the pairwise-independence assumption";
    } else {
      msg += "rows " + std::to_string(collision->i + 1) + " and " +
             std::to_string(collision->j + 1) + " of X are " +
             (collision->negated ? "negations of each other" : "identical") +
             ", violating the pairwise-independence assumption";
    }
  } else {
    msg += problem.data.has_intercept
               ? "the sign-system rank assumption (intercept variant) likely fails"
               : "the sign-system rank assumption likely fails";
  }
  return NoCandidateError(msg);
}

}  // namespace detail

/// Exact LTS fit. Enumerates every candidate intersection point (all
/// (p+1)-index tuples crossed with all 2^p sign vectors; for p = 1 the two
/// closed-form roots per pair), keeps those whose tie sits at the trimming
/// boundary, evaluates the subset fits each one induces, and returns the
/// global minimum under the deterministic tie-break. h = n needs no trimming
/// and short-circuits to the plain OLS fit.
inline FitResult bsa_solve(const Problem& problem, unsigned threads = 1,
                           std::uint64_t tie_cap = 100000) {
  problem.validate();
  const std::size_t n = problem.n();
  const std::size_t p = problem.p();
  const std::size_t h = problem.h;

  if (h == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    SubsetMask mask(n, std::move(all));
    SubsetFit fit = subset_objective_J(problem, mask);
    FitResult result;
    result.beta = std::move(fit.beta);
    result.objective = fit.value;
    result.mask = std::move(mask);
    result.counters.J_evaluations = 1;
    return result;
  }

  detail::ScanState state;
  if (p == 1) {
    const std::uint64_t total = binomial(n, 2);
    state = chunked_parallel_fold(
        total, threads, detail::ScanState{},
        [&](std::uint64_t b, std::uint64_t e) {
          return detail::scan_pairs_1d(problem, tie_cap, b, e);
        },
        detail::combine_scan_states);
  } else {
    const std::uint64_t tuples = binomial(n, p + 1);
    const std::uint64_t total = tuples << p;
    if (binomial(n, p + 1) == UINT64_MAX || total >> p != tuples) {
      throw CapExceededError("candidate space overflows a 64-bit counter");
    }
    state = chunked_parallel_fold(
        total, threads, detail::ScanState{},
        [&](std::uint64_t b, std::uint64_t e) {
          return detail::scan_tuples(problem, tie_cap, b, e);
        },
        detail::combine_scan_states);
  }

  if (!state.best) throw detail::no_candidate_diagnosis(problem);

  FitResult result;
  result.beta = std::move(state.best->beta);
  result.objective = state.best->value;
  result.mask = std::move(state.best->mask);
  result.counters = state.counters;
  return result;
}

}  // namespace lts
