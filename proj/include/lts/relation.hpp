#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "lts/combinatorics.hpp"
#include "lts/errors.hpp"
#include "lts/model.hpp"

namespace lts {

/// Shape of the ordered squared residuals around position h: l values sit
/// strictly below a block of t mutually equal values that contains position h.
struct TieStructure {
  std::size_t l = 0;
  std::size_t t = 0;
  std::vector<std::size_t> below_indices;
  std::vector<std::size_t> tie_indices;
};

/// Orders the squared residuals at beta and locates the maximal run of equal
/// values (chained tolerance comparisons) containing ordered position h.
/// When the h-th and (h+1)-th values differ and no tie reaches down past h,
/// the run is the single position h itself (t = 1, l = h-1).
inline TieStructure tie_structure_at(const Problem& problem,
                                     std::span<const double> beta) {
  const std::vector<double> sq = squared_residuals(problem, beta);
  const std::vector<std::size_t> order = detail::ascending_order(sq);
  const std::size_t n = problem.n();
  const std::size_t pos = problem.h - 1;  // 0-based ordered position of r_(h)

  std::size_t start = pos;
  while (start > 0 &&
         problem.tol.residuals_equal(sq[order[start - 1]], sq[order[start]])) {
    --start;
  }
  std::size_t end = pos;
  while (end + 1 < n &&
         problem.tol.residuals_equal(sq[order[end]], sq[order[end + 1]])) {
    ++end;
  }

  TieStructure ts;
  ts.l = start;
  ts.t = end - start + 1;
  ts.below_indices.assign(order.begin(), order.begin() + start);
  ts.tie_indices.assign(order.begin() + start, order.begin() + end + 1);
  return ts;
}

/// All masks selecting h observations whose squared residuals at beta are the
/// h smallest: the l below-block observations are forced, and every choice of
/// h-l observations from the tie block completes a mask. Returned in ascending
/// lexicographic order of the selected index sets. A single mask comes back
/// when the tie block does not extend past position h.
inline std::vector<SubsetMask> subsets_in_relation(const Problem& problem,
                                                   std::span<const double> beta,
                                                   std::uint64_t tie_cap = 100000) {
  const std::size_t n = problem.n();
  const std::size_t h = problem.h;
  if (h == n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return {SubsetMask(n, std::move(all))};
  }

  const TieStructure ts = tie_structure_at(problem, beta);
  const std::size_t k = h - ts.l;  // how many tie-block members to keep
  const std::uint64_t total = binomial(ts.t, k);
  if (total > tie_cap) {
    throw DegenerateTieError(
        "tie block of size " + std::to_string(ts.t) + " needs " +
        binomial_string(ts.t, k) + " subsets, above the cap of " +
        std::to_string(tie_cap) +
        "; the data likely violates the pairwise-independence assumption");
  }

  std::vector<std::size_t> tie_sorted = ts.tie_indices;
  std::sort(tie_sorted.begin(), tie_sorted.end());

  std::vector<SubsetMask> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> combo = first_combination(k);
  do {
    std::vector<std::size_t> indices = ts.below_indices;
    indices.reserve(h);
    for (std::size_t c : combo) indices.push_back(tie_sorted[c]);
    out.emplace_back(n, std::move(indices));
  } while (next_combination(combo, ts.t));
  return out;
}

}  // namespace lts
