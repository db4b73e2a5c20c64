#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lts/combinatorics.hpp"
#include "lts/errors.hpp"
#include "lts/model.hpp"
#include "lts/parallel.hpp"

namespace lts {

namespace detail {

/// Evaluates mask ranks [begin, end) of the C(n,h) subset space in
/// lexicographic order; rank-deficient subsets are counted and skipped.
inline ScanState scan_masks(const Problem& problem, std::uint64_t begin,
                            std::uint64_t end) {
  ScanState state;
  if (begin >= end) return state;
  const std::size_t n = problem.n();
  std::vector<std::size_t> combo = unrank_combination(n, problem.h, begin);
  for (std::uint64_t r = begin; r < end; ++r) {
    state.counters.systems_solved += 1;
    SubsetMask mask(n, combo);
    if (auto fit = try_subset_objective(problem, mask)) {
      state.counters.regular_systems += 1;
      state.counters.J_evaluations += 1;
      fold_best(state.best, fit->value, mask, fit->beta);
    }
    next_combination(combo, n);
  }
  return state;
}

}  // namespace detail

/// Brute-force reference solver: fits OLS on every one of the C(n,h) subsets
/// of size h and keeps the minimum, under the same deterministic tie-break as
/// the candidate-scan solver. Refuses to start when C(n,h) exceeds `cap`.
inline FitResult exact_enumerate(const Problem& problem,
                                 std::uint64_t cap = 2000000,
                                 unsigned threads = 1) {
  problem.validate();
  const std::size_t n = problem.n();
  const std::size_t h = problem.h;

  bool saturated = false;
  const auto exact_count = detail::binomial_u128(n, h, saturated);
  if (saturated || exact_count > cap) {
    throw CapExceededError("exhaustive enumeration needs " + binomial_string(n, h) +
                           " subset fits, above the cap of " + std::to_string(cap));
  }
  const auto total = static_cast<std::uint64_t>(exact_count);

  detail::ScanState state = chunked_parallel_fold(
      total, threads, detail::ScanState{},
      [&](std::uint64_t b, std::uint64_t e) {
        return detail::scan_masks(problem, b, e);
      },
      detail::combine_scan_states);

  if (!state.best) {
    throw SingularFitError("every subset of size " + std::to_string(h) +
                           " is rank deficient; no trimmed fit exists");
  }

  FitResult result;
  result.beta = std::move(state.best->beta);
  result.objective = state.best->value;
  result.mask = std::move(state.best->mask);
  result.counters = state.counters;
  return result;
}

}  // namespace lts
