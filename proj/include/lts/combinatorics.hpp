#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lts/errors.hpp"

namespace lts {

/// Binomial coefficient C(n,k), saturating at UINT64_MAX on overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(result);
}

namespace detail {

/// C(n,k) in 128-bit arithmetic; sets `saturated` instead of wrapping.
inline unsigned __int128 binomial_u128(std::uint64_t n, std::uint64_t k,
                                       bool& saturated) {
  saturated = false;
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  constexpr unsigned __int128 kMax = ~static_cast<unsigned __int128>(0);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const unsigned __int128 factor = n - k + i;
    if (result > kMax / factor) {
      saturated = true;
      return kMax;
    }
    result = result * factor / i;
  }
  return result;
}

inline std::string u128_to_string(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string digits;
  while (v > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

}  // namespace detail

/// Exact decimal rendering of C(n,k) for error messages; values beyond 128
/// bits are reported as a lower bound.
inline std::string binomial_string(std::uint64_t n, std::uint64_t k) {
  bool saturated = false;
  const auto value = detail::binomial_u128(n, k, saturated);
  if (saturated) return "more than 3.4e38";
  return detail::u128_to_string(value);
}

/// First k-combination of {0,...,n-1} in lexicographic order: {0,1,...,k-1}.
inline std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), std::size_t{0});
  return c;
}

/// Advances `c` to the next k-combination of {0,...,n-1} in lexicographic
/// order. Returns false when `c` was already the last combination.
inline bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  if (k == 0) return false;
  std::size_t i = k;
  while (i > 0) {
    --i;
    if (c[i] != n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

/// The rank-th k-combination of {0,...,n-1} in lexicographic order.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                                   std::uint64_t rank) {
  std::vector<std::size_t> c(k);
  std::size_t next = 0;
  for (std::size_t pos = 0; pos < k; ++pos) {
    for (std::size_t v = next; v < n; ++v) {
      const std::uint64_t below = binomial(n - 1 - v, k - 1 - pos);
      if (rank < below) {
        c[pos] = v;
        next = v + 1;
        break;
      }
      rank -= below;
    }
  }
  return c;
}

}  // namespace lts
