#pragma once

// Shared fixtures for the test suite: the nine-point one-regressor example
// worked through in detail in the source material, plus helpers for building
// problems from generated data.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "lts/generate.hpp"
#include "lts/model.hpp"

namespace testsupport {

inline const std::vector<double>& example1_x() {
  static const std::vector<double> x = {1.39, -2.25, 6.10, -8.50, 8.26,
                                        -8.67, 10.87, 13.70, 13.05};
  return x;
}

inline const std::vector<double>& example1_y() {
  static const std::vector<double> y = {-0.90, -0.80, 33.32, -27.23, 12.63,
                                        -14.18, -3.79, -8.66, -16.45};
  return y;
}

inline lts::Dataset example1_dataset() {
  lts::Dataset d;
  d.X = lts::Matrix::column(example1_x());
  d.Y = example1_y();
  return d;
}

inline lts::Problem example1_problem(std::size_t h = 5) {
  lts::Problem problem;
  problem.data = example1_dataset();
  problem.h = h;
  return problem;
}

/// The eleven trimming subsets active across the one-regressor example's
/// cells, left to right, as 1-based observation indices.  Verified against an
/// exact rational-arithmetic sweep of the objective: the leftmost cell ends at
/// beta = -1305/17 (where observations 4 and 6 swap) and reuses the rightmost
/// cell's subset.
inline const std::vector<std::vector<std::size_t>>& example1_cell_masks() {
  static const std::vector<std::vector<std::size_t>> masks = {
      {1, 2, 3, 4, 5}, {1, 2, 3, 5, 6}, {1, 2, 3, 5, 7}, {1, 2, 5, 6, 7},
      {1, 2, 5, 7, 9}, {1, 2, 7, 8, 9}, {1, 2, 5, 7, 8}, {1, 2, 5, 6, 7},
      {1, 2, 4, 5, 6}, {1, 2, 3, 4, 6}, {1, 2, 3, 4, 5}};
  return masks;
}

/// Boundary points between the cells above, left to right, as exact fractions
/// of the data values (independently recomputed; quotes of these constants in
/// reference texts round the 2nd one to -7.44 or -7.45 and misprint the last
/// as 3.84).
inline const std::vector<double>& example1_boundaries() {
  static const std::vector<double> b = {
      -1305.0 / 17.0,   // r4 = r6           ~ -76.7647
      -1797.0 / 220.0,  // r6 = -r7          ~  -8.1682
      -1914.0 / 257.0,  // r3 = -r6          ~  -7.4475
      -1021.0 / 146.0,  // r6 = -r9          ~  -6.9932
      -2129.0 / 544.0,  // r5 = r8           ~  -3.9136
      -382.0 / 2131.0,  // r5 = -r9          ~  -0.1793
      552.0 / 2237.0,   // r6 = r8           ~   0.2468
      2344.0 / 1937.0,  // r4 = r7           ~   1.2101
      4595.0 / 1436.0,  // r3 = -r5          ~   3.1999
      155.0 / 41.0,     // r5 = -r6          ~   3.7805
  };
  return b;
}

/// The four local minima of the trimmed objective, left to right, as
/// (beta, value) pairs.  Recomputed exactly from the data; the 2nd beta is
/// often quoted without its sign and the 3rd value rounded up to 246.87.
inline const std::vector<std::pair<double, double>>& example1_local_minima() {
  static const std::vector<std::pair<double, double>> m = {
      {-0.7740193400, 71.9577603633},
      {-0.1442428683, 242.3980743802},
      {0.6949078005, 246.7224164171},
      {2.0628194884, 156.1243940713},
  };
  return m;
}

inline lts::Problem make_problem(lts::Dataset data, std::size_t h) {
  lts::Problem problem;
  problem.data = std::move(data);
  problem.h = h;
  return problem;
}

inline lts::Problem random_problem(std::uint64_t seed, std::size_t n, std::size_t p,
                                   std::size_t h, double frac = 0.0) {
  return make_problem(lts::gen_instance(seed, n, p, frac).dataset, h);
}

}  // namespace testsupport
