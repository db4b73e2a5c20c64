#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "lts/errors.hpp"
#include "lts/model.hpp"

namespace lts {

struct GeneratedInstance {
  Dataset dataset;
  std::vector<double> true_beta;
};

namespace detail {

/// Deterministic uniform and gaussian draws on top of mt19937_64. The
/// standard <random> distributions are implementation-defined, so identical
/// seeds would not reproduce identical bytes across library versions; these
/// transformations are pinned here instead.
class SeededDraws {
 public:
  explicit SeededDraws(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;  // [0, 1)
    return lo + (hi - lo) * u;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform(0.0, 1.0);  // (0, 1], keeps log finite
    const double u2 = uniform(0.0, 1.0);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace detail

/// Seeded random regression instance: X uniform in [-10, 10], true
/// coefficients uniform in [-5, 5], Y = X beta + unit gaussian noise, and the
/// first floor(outlier_fraction * n) responses shifted by +50. The same seed
/// reproduces the same instance bit for bit.
inline GeneratedInstance gen_instance(std::uint64_t seed, std::size_t n,
                                      std::size_t p, double outlier_fraction) {
  if (p < 1 || n <= p) throw InvalidInputError("gen_instance requires n > p >= 1");
  if (!(outlier_fraction >= 0.0) || outlier_fraction >= 0.5) {
    throw InvalidInputError("outlier fraction must lie in [0, 0.5)");
  }

  detail::SeededDraws draws(seed);
  GeneratedInstance out;
  out.true_beta.resize(p);
  for (std::size_t j = 0; j < p; ++j) out.true_beta[j] = draws.uniform(-5.0, 5.0);

  out.dataset.X = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      out.dataset.X(i, j) = draws.uniform(-10.0, 10.0);
    }
  }

  out.dataset.Y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double y = draws.gaussian();
    for (std::size_t j = 0; j < p; ++j) {
      y += out.dataset.X(i, j) * out.true_beta[j];
    }
    out.dataset.Y[i] = y;
  }

  const std::size_t outliers = static_cast<std::size_t>(outlier_fraction * n);
  for (std::size_t i = 0; i < outliers; ++i) out.dataset.Y[i] += 50.0;

  return out;
}

}  // namespace lts
