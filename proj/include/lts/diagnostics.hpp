#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lts/bsa.hpp"
#include "lts/combinatorics.hpp"
#include "lts/errors.hpp"
#include "lts/model.hpp"
#include "lts/numerics.hpp"
#include "lts/relation.hpp"

namespace lts {

enum class AssumptionStatus { Pass, Fail, SampledPass, Skipped };

inline const char* to_string(AssumptionStatus s) {
  switch (s) {
    case AssumptionStatus::Pass: return "Pass";
    case AssumptionStatus::Fail: return "Fail";
    case AssumptionStatus::SampledPass: return "Sampled-Pass";
    case AssumptionStatus::Skipped: return "Skipped";
  }
  return "?";
}

/// One violating configuration: the observation indices involved (0-based)
/// and, for sign-system checks, the sign vector as a "+-..." string. For
/// pairwise checks the signs field is "+" (identical rows), "-" (negated
/// rows), or empty (zero row).
struct Witness {
  std::vector<std::size_t> indices;
  std::string signs;
};

struct AssumptionReport {
  std::string id;  // A1, A2, A3, A4, HFullRank
  AssumptionStatus status = AssumptionStatus::Skipped;
  std::vector<Witness> witnesses;
  std::string note;
};

namespace detail {

inline constexpr std::size_t kMaxWitnesses = 16;

inline std::uint64_t bounded_random(std::mt19937_64& eng, std::uint64_t n) {
  return eng() % n;  // slight modulo bias is irrelevant for sampling checks
}

}  // namespace detail

/// Pairwise independence of the regressor rows: no row may be zero and no two
/// rows may coincide up to sign. Every solver guarantee builds on this.
inline AssumptionReport check_pairwise(const Dataset& dataset, double tol = 1e-8) {
  AssumptionReport report;
  report.id = "A1";
  report.status = AssumptionStatus::Pass;
  const Matrix& x = dataset.X;
  const std::size_t n = x.rows;
  const std::size_t p = x.cols;

  std::vector<double> row_scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      row_scale[i] = std::max(row_scale[i], std::abs(x(i, k)));
    }
    if (row_scale[i] <= tol) {
      report.status = AssumptionStatus::Fail;
      report.witnesses.push_back({{i}, ""});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (report.witnesses.size() >= detail::kMaxWitnesses) break;
      const double scale = 1.0 + std::max(row_scale[i], row_scale[j]);
      bool same = true;
      bool mirrored = true;
      for (std::size_t k = 0; k < p && (same || mirrored); ++k) {
        if (std::abs(x(i, k) - x(j, k)) > tol * scale) same = false;
        if (std::abs(x(i, k) + x(j, k)) > tol * scale) mirrored = false;
      }
      if (same) {
        report.status = AssumptionStatus::Fail;
        report.witnesses.push_back({{i, j}, "+"});
      } else if (mirrored) {
        report.status = AssumptionStatus::Fail;
        report.witnesses.push_back({{i, j}, "-"});
      }
    }
  }
  if (report.status == AssumptionStatus::Fail) {
    report.note = "rows listed coincide up to sign or are zero";
  }
  return report;
}

/// h-full rank: every h-row submatrix of X must have rank p. Exhaustive when
/// C(n,h) fits in the budget, otherwise a fixed-seed random sample of masks.
inline AssumptionReport check_h_full_rank(const Dataset& dataset, std::size_t h,
                                          std::size_t budget = 4096) {
  AssumptionReport report;
  report.id = "HFullRank";
  const std::size_t n = dataset.n();
  const std::size_t p = dataset.p();

  if (h < p || h > n) {
    report.status = AssumptionStatus::Fail;
    std::vector<std::size_t> head(std::min(h, n));
    std::iota(head.begin(), head.end(), std::size_t{0});
    report.witnesses.push_back({std::move(head), ""});
    report.note = "h outside [p, n]; no h-subset can reach rank p";
    return report;
  }

  auto rank_of = [&](const std::vector<std::size_t>& rows) {
    Matrix sub(rows.size(), p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < p; ++c) sub(r, c) = dataset.X(rows[r], c);
    }
    return matrix_rank(std::move(sub));
  };

  const std::uint64_t total = binomial(n, h);
  if (total <= budget) {
    report.status = AssumptionStatus::Pass;
    std::vector<std::size_t> combo = first_combination(h);
    do {
      if (rank_of(combo) < p) {
        report.status = AssumptionStatus::Fail;
        report.witnesses.push_back({combo, ""});
        if (report.witnesses.size() >= detail::kMaxWitnesses) break;
      }
    } while (next_combination(combo, n));
  } else {
    report.status = AssumptionStatus::SampledPass;
    std::mt19937_64 eng(0x4c545348u);
    std::vector<std::size_t> pool(n);
    for (std::size_t s = 0; s < budget; ++s) {
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t k = 0; k < h; ++k) {
        const std::size_t pick =
            k + static_cast<std::size_t>(detail::bounded_random(eng, n - k));
        std::swap(pool[k], pool[pick]);
      }
      std::vector<std::size_t> rows(pool.begin(), pool.begin() + h);
      std::sort(rows.begin(), rows.end());
      if (rank_of(rows) < p) {
        report.status = AssumptionStatus::Fail;
        report.witnesses.push_back({std::move(rows), ""});
        if (report.witnesses.size() >= detail::kMaxWitnesses) break;
      }
    }
    if (report.status == AssumptionStatus::SampledPass) {
      report.note = "sampled " + std::to_string(budget) + " of " +
                    binomial_string(n, h) + " subsets";
    }
  }
  if (report.status == AssumptionStatus::Fail && report.note.empty()) {
    report.note = "listed subsets select rank-deficient rows";
  }
  return report;
}

namespace detail {

/// Rank test of one (n-1) x p sign-system matrix with rows x_1 o_k x_{k+1}.
inline bool sign_system_full_rank(const Dataset& dataset,
                                  const std::vector<bool>& is_minus) {
  const std::size_t n = dataset.n();
  const std::size_t p = dataset.p();
  Matrix m(n - 1, p);
  for (std::size_t k = 0; k < n - 1; ++k) {
    const double s = is_minus[k] ? -1.0 : 1.0;
    for (std::size_t c = 0; c < p; ++c) {
      m(k, c) = dataset.X(0, c) + s * dataset.X(k + 1, c);
    }
  }
  return matrix_rank(std::move(m)) == p;
}

inline std::string sign_string(const std::vector<bool>& is_minus) {
  std::string s;
  s.reserve(is_minus.size());
  for (bool m : is_minus) s.push_back(m ? '-' : '+');
  return s;
}

}  // namespace detail

/// Sign-system rank: for each sign vector over the n-1 non-anchor
/// observations, the matrix pairing observation 1 with every other one must
/// have rank p. With an intercept the all-minus vector is structurally
/// singular (the ones column cancels) and is exempted. All 2^(n-1) vectors
/// are checked when that fits in the budget; otherwise `budget` fixed-seed
/// random vectors plus the all-plus and all-minus ones.
inline AssumptionReport check_sign_rank(const Dataset& dataset,
                                        std::size_t budget = 4096) {
  AssumptionReport report;
  report.id = dataset.has_intercept ? "A4" : "A3";
  const std::size_t n = dataset.n();
  const std::size_t p = dataset.p();

  if (n - 1 < p) {
    report.status = AssumptionStatus::Fail;
    report.witnesses.push_back({{}, std::string(n - 1, '+')});
    report.note = "only n-1 equations available, rank cannot reach p";
    return report;
  }

  const bool exempt_all_minus = dataset.has_intercept;
  auto consider = [&](const std::vector<bool>& is_minus) {
    if (exempt_all_minus &&
        std::all_of(is_minus.begin(), is_minus.end(), [](bool b) { return b; })) {
      return;
    }
    if (!detail::sign_system_full_rank(dataset, is_minus)) {
      report.status = AssumptionStatus::Fail;
      if (report.witnesses.size() < detail::kMaxWitnesses) {
        report.witnesses.push_back({{}, detail::sign_string(is_minus)});
      }
    }
  };

  const std::size_t q = n - 1;
  if (q < 63 && (std::uint64_t{1} << q) <= budget) {
    report.status = AssumptionStatus::Pass;
    std::vector<bool> is_minus(q);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << q); ++code) {
      for (std::size_t k = 0; k < q; ++k) {
        is_minus[k] = ((code >> (q - 1 - k)) & 1u) != 0;
      }
      consider(is_minus);
      if (report.witnesses.size() >= detail::kMaxWitnesses) break;
    }
  } else {
    report.status = AssumptionStatus::SampledPass;
    consider(std::vector<bool>(q, false));
    consider(std::vector<bool>(q, true));
    std::mt19937_64 eng(0x4c545347u);
    std::vector<bool> is_minus(q);
    for (std::size_t s = 0; s < budget; ++s) {
      for (std::size_t k = 0; k < q; ++k) is_minus[k] = (eng() & 1u) != 0;
      consider(is_minus);
      if (report.witnesses.size() >= detail::kMaxWitnesses) break;
    }
    if (report.status == AssumptionStatus::SampledPass) {
      report.note = "sampled " + std::to_string(budget + 2) + " of 2^" +
                    std::to_string(q) + " sign vectors";
    }
  }
  if (report.status == AssumptionStatus::Fail && report.note.empty()) {
    report.note = "listed sign vectors give rank-deficient systems";
  }
  return report;
}

/// Positive minimum: the optimal trimmed objective should be strictly
/// positive. A zero objective means h observations admit an exact fit; that
/// fit is then the estimate itself, so Fail is informational.
inline AssumptionReport check_positive_minimum(const Problem& problem,
                                               const FitResult& result) {
  AssumptionReport report;
  report.id = "A2";
  double y_scale = 0.0;
  for (double y : problem.data.Y) y_scale = std::max(y_scale, std::abs(y));
  const double threshold = problem.tol.residual_eq_tol * (1.0 + y_scale * y_scale);
  if (result.objective > threshold) {
    report.status = AssumptionStatus::Pass;
  } else {
    report.status = AssumptionStatus::Fail;
    report.witnesses.push_back({result.mask.indices(), ""});
    report.note = "the selected observations admit an exact fit; "
                  "that fit is the trimmed estimate itself";
  }
  return report;
}

/// One cell of the 1-D objective landscape: an open interval between
/// consecutive boundary points (infinite at the ends) and the subset active
/// throughout it.
struct LandscapeCell {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  SubsetMask mask;
};

struct LocalMinimum {
  double beta = 0.0;
  double value = 0.0;
  SubsetMask mask;
};

/// The full shape of the one-regressor trimmed objective: every boundary
/// point where the trimming subset switches, the cells between them with
/// their subsets, and the local minima (cells whose own OLS fit lies inside
/// the cell's closure).
struct Landscape1D {
  std::vector<double> boundary_points;
  std::vector<LandscapeCell> cells;
  std::vector<LocalMinimum> local_minima;
};

inline Landscape1D landscape_1d(const Problem& problem,
                                std::uint64_t tie_cap = 100000) {
  problem.validate();
  if (problem.p() != 1) {
    throw InvalidInputError("landscape analysis requires exactly one regressor");
  }
  const std::size_t n = problem.n();

  // Roots of all pairwise residual-equality conditions that sit on the
  // trimming boundary.
  std::vector<double> points;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (double root : candidate_roots_1d(problem, i, j)) {
        const double beta[1] = {root};
        if (test_candidate(problem, beta, i)) points.push_back(root);
      }
    }
  }
  std::sort(points.begin(), points.end());

  // The same geometric boundary surfaces from several pairs; collapse runs of
  // nearly identical roots to their mean.
  const double merge_tol = 10.0 * problem.tol.residual_eq_tol;
  std::vector<double> boundaries;
  std::size_t start = 0;
  while (start < points.size()) {
    std::size_t end = start;
    while (end + 1 < points.size() &&
           points[end + 1] - points[end] <=
               merge_tol * (1.0 + std::max(std::abs(points[end]),
                                           std::abs(points[end + 1])))) {
      ++end;
    }
    long double mean = 0.0;
    for (std::size_t k = start; k <= end; ++k) mean += points[k];
    boundaries.push_back(static_cast<double>(mean / (end - start + 1)));
    start = end + 1;
  }

  auto mask_at = [&](double beta_value) {
    const double beta[1] = {beta_value};
    return subsets_in_relation(problem, beta, tie_cap).front();
  };

  // Label each open interval by probing its midpoint (one step beyond the
  // outermost boundaries); drop boundaries that do not actually switch the
  // subset.
  Landscape1D out;
  if (boundaries.empty()) {
    out.cells.push_back({-std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity(), mask_at(0.0)});
  } else {
    std::vector<SubsetMask> cell_masks;
    cell_masks.push_back(mask_at(boundaries.front() - 1.0));
    for (std::size_t c = 1; c < boundaries.size(); ++c) {
      cell_masks.push_back(mask_at((boundaries[c - 1] + boundaries[c]) / 2.0));
    }
    cell_masks.push_back(mask_at(boundaries.back() + 1.0));

    std::vector<double> kept;
    std::vector<SubsetMask> kept_masks;
    kept_masks.push_back(cell_masks.front());
    for (std::size_t b = 0; b < boundaries.size(); ++b) {
      if (cell_masks[b + 1] == kept_masks.back()) continue;
      kept.push_back(boundaries[b]);
      kept_masks.push_back(cell_masks[b + 1]);
    }

    out.boundary_points = std::move(kept);
    for (std::size_t c = 0; c < kept_masks.size(); ++c) {
      LandscapeCell cell;
      cell.lower = c == 0 ? -std::numeric_limits<double>::infinity()
                          : out.boundary_points[c - 1];
      cell.upper = c == out.boundary_points.size()
                       ? std::numeric_limits<double>::infinity()
                       : out.boundary_points[c];
      cell.mask = kept_masks[c];
      out.cells.push_back(std::move(cell));
    }
  }

  // A cell contributes a local minimum when its own subset's OLS fit lands
  // inside the cell's closure.
  for (const LandscapeCell& cell : out.cells) {
    auto fit = try_subset_objective(problem, cell.mask);
    if (!fit) continue;
    const double b = fit->beta[0];
    if (b >= cell.lower && b <= cell.upper) {
      out.local_minima.push_back({b, fit->value, cell.mask});
    }
  }
  return out;
}

}  // namespace lts
