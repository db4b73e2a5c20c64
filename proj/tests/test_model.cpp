#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lts/combinatorics.hpp"
#include "lts/model.hpp"
#include "support.hpp"

using testsupport::example1_problem;

TEST_CASE("tolerance policy compares squared residuals relatively") {
  lts::TolerancePolicy tol;
  CHECK(tol.residuals_equal(100.0, 100.0 + 5e-7));
  CHECK(!tol.residuals_equal(100.0, 100.0 + 5e-5));
  CHECK(tol.residuals_equal(0.0, 5e-9));
  CHECK(!tol.residuals_equal(0.0, 5e-8));
}

TEST_CASE("subset mask validates and compares lexicographically") {
  const lts::SubsetMask a(5, {0, 2, 4});
  CHECK(a.count() == 3);
  CHECK(a.contains(2));
  CHECK(!a.contains(1));
  CHECK(a.one_based() == std::vector<std::size_t>{1, 3, 5});
  CHECK(a.bits() == std::vector<bool>{true, false, true, false, true});

  const lts::SubsetMask b(5, {0, 3, 4});
  CHECK(a < b);
  CHECK(a != b);
  CHECK(a == lts::SubsetMask(5, {4, 2, 0}));  // order of construction is free

  CHECK_THROWS_AS(lts::SubsetMask(5, {1, 1, 2}), lts::InvalidInputError);
  CHECK_THROWS_AS(lts::SubsetMask(5, {3, 5}), lts::InvalidInputError);
}

TEST_CASE("squared residuals at beta = 0 are the squared responses") {
  const auto problem = example1_problem();
  const std::vector<double> beta = {0.0};
  const auto sq = lts::squared_residuals(problem, beta);
  REQUIRE(sq.size() == 9);
  CHECK(sq[0] == Catch::Approx(0.81).margin(1e-12));
  for (std::size_t i = 0; i < sq.size(); ++i) {
    CHECK(sq[i] == Catch::Approx(problem.data.Y[i] * problem.data.Y[i]));
  }
}

TEST_CASE("observations 6 and 7 tie at their plus-type intersection") {
  const auto problem = example1_problem();
  const auto& x = testsupport::example1_x();
  const auto& y = testsupport::example1_y();
  // Slope where r_6 = -r_7, computed straight from the data.
  const std::vector<double> beta = {(y[5] + y[6]) / (x[5] + x[6])};
  const auto sq = lts::squared_residuals(problem, beta);
  CHECK(sq[5] == Catch::Approx(sq[6]).epsilon(1e-9));
  CHECK(beta[0] == Catch::Approx(-8.168).margin(5e-3));
}

TEST_CASE("an exact interpolant zeroes its own residual") {
  const auto problem = example1_problem();
  const std::vector<double> beta = {problem.data.Y[3] / problem.data.X(3, 0)};
  const auto sq = lts::squared_residuals(problem, beta);
  CHECK(sq[3] == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("trimmed objective reproduces the worked example's local minima") {
  const auto problem = example1_problem();
  const std::vector<double> at_077 = {-0.77};
  CHECK(lts::lts_objective(problem, at_077) == Catch::Approx(71.96).margin(0.05));
  const std::vector<double> at_206 = {2.06};
  CHECK(lts::lts_objective(problem, at_206) == Catch::Approx(156.15).margin(0.05));
}

TEST_CASE("with h = n the trimmed objective is the full residual sum") {
  auto problem = example1_problem(9);
  const std::vector<double> beta = {1.25};
  const auto sq = lts::squared_residuals(problem, beta);
  double total = 0.0;
  for (double v : sq) total += v;
  CHECK(lts::lts_objective(problem, beta) == Catch::Approx(total).epsilon(1e-15));
}

TEST_CASE("subset fit on the winning subset matches the known minimum") {
  const auto problem = example1_problem();
  const lts::SubsetMask mask(9, {0, 1, 6, 7, 8});  // observations 1,2,7,8,9
  const auto fit = lts::subset_objective_J(problem, mask);
  CHECK(fit.beta[0] == Catch::Approx(-0.774).margin(1e-3));
  CHECK(fit.value == Catch::Approx(71.96).margin(0.05));
}

TEST_CASE("subset fit value is consistent with the trimmed objective when its "
          "fit stays in the rightmost cell") {
  const auto problem = example1_problem();
  const lts::SubsetMask mask(9, {0, 1, 2, 3, 4});  // observations 1..5
  const auto fit = lts::subset_objective_J(problem, mask);
  // Direct normal-equation cross-check on the five rows.
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i : mask.indices()) {
    sxy += problem.data.X(i, 0) * problem.data.Y[i];
    sxx += problem.data.X(i, 0) * problem.data.X(i, 0);
  }
  CHECK(fit.beta[0] == Catch::Approx(sxy / sxx).epsilon(1e-10));
  // This subset labels both unbounded cells.  Only when its own fit lands
  // beyond the last subset switch at 155/41 (or before the first at -1305/17)
  // does it select these five observations as the h smallest residuals.
  if (fit.beta[0] > 155.0 / 41.0 || fit.beta[0] < -1305.0 / 17.0) {
    CHECK(fit.value == Catch::Approx(lts::lts_objective(problem, fit.beta)).epsilon(1e-9));
  }
  // Here it does not: the fit (~2.92) falls in an interior cell with a
  // different active subset, so the trimmed objective there is smaller.
  CHECK(fit.beta[0] == Catch::Approx(2.92).margin(0.01));
  CHECK(lts::lts_objective(problem, fit.beta) < fit.value);
}

TEST_CASE("a p-point subset with h = p fits exactly") {
  lts::Problem problem;
  problem.data.X = lts::Matrix::column(std::vector<double>{1.0, 2.0, 5.0});
  problem.data.Y = {3.0, 7.0, 11.0};
  problem.h = 1;
  const auto fit = lts::subset_objective_J(problem, lts::SubsetMask(3, {1}));
  CHECK(fit.beta[0] == Catch::Approx(3.5));
  CHECK(fit.value == Catch::Approx(0.0).margin(1e-18));
}

TEST_CASE("rank-deficient subsets are reported with their indices") {
  lts::Problem problem;
  problem.data.X = lts::Matrix{{1, 1}, {2, 2}, {3, 3}, {1, 2}, {3, 5}};
  problem.data.Y = {1, 2, 3, 4, 5};
  problem.h = 3;
  const lts::SubsetMask bad(5, {0, 1, 2});  // proportional rows
  CHECK(!lts::try_subset_objective(problem, bad).has_value());
  try {
    lts::subset_objective_J(problem, bad);
    FAIL("expected a singular-fit error");
  } catch (const lts::SingularFitError& e) {
    CHECK(e.subset() == std::vector<std::size_t>{0, 1, 2});
  }
}

TEST_CASE("trimmed objective equals the best masked residual sum") {
  std::mt19937 eng(31337);
  std::uniform_real_distribution<double> unit(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + eng() % 5;  // n <= 10: exhaustive masks
    const auto problem =
        testsupport::make_problem(lts::gen_instance(trial + 1, n, 1, 0.0).dataset,
                                  1 + n / 2);
    const std::vector<double> beta = {unit(eng)};
    const auto sq = lts::squared_residuals(problem, beta);

    double best = std::numeric_limits<double>::infinity();
    auto combo = lts::first_combination(problem.h);
    do {
      double sum = 0.0;
      for (std::size_t i : combo) sum += sq[i];
      best = std::min(best, sum);
    } while (lts::next_combination(combo, n));

    CHECK(lts::lts_objective(problem, beta) ==
          Catch::Approx(best).epsilon(1e-12).margin(1e-12));
  }
}

TEST_CASE("subset OLS dominates every other coefficient on its subset") {
  std::mt19937 eng(2025);
  std::uniform_real_distribution<double> unit(-4.0, 4.0);
  const auto problem = testsupport::random_problem(55, 10, 2, 6);
  const lts::SubsetMask mask(10, {0, 2, 3, 5, 7, 9});
  const auto fit = lts::subset_objective_J(problem, mask);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> beta = {unit(eng), unit(eng)};
    const auto sq = lts::squared_residuals(problem, beta);
    double masked = 0.0;
    for (std::size_t i : mask.indices()) masked += sq[i];
    CHECK(fit.value <= masked * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("trimmed objective is a pointwise lower bound over masked sums") {
  std::mt19937 eng(808);
  std::uniform_real_distribution<double> unit(-4.0, 4.0);
  const auto problem = testsupport::random_problem(77, 9, 1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> beta = {unit(eng)};
    const auto sq = lts::squared_residuals(problem, beta);
    const double objective = lts::lts_objective(problem, beta);

    // Any mask of h observations can only do as well or worse.
    auto combo = lts::first_combination(problem.h);
    for (int k = 0; k < 5; ++k) {
      double sum = 0.0;
      for (std::size_t i : combo) sum += sq[i];
      CHECK(objective <= sum * (1.0 + 1e-12) + 1e-15);
      if (!lts::next_combination(combo, problem.n())) break;
    }
  }
}

TEST_CASE("scaling the responses scales the objective quadratically") {
  const auto problem = example1_problem();
  auto scaled = problem;
  for (double& y : scaled.data.Y) y *= 2.0;
  const std::vector<double> beta = {-0.6};
  const std::vector<double> beta2 = {-1.2};
  CHECK(lts::lts_objective(scaled, beta2) ==
        Catch::Approx(4.0 * lts::lts_objective(problem, beta)).epsilon(1e-12));
}

TEST_CASE("counters accumulate") {
  lts::Counters a;
  a.systems_solved = 3;
  a.regular_systems = 2;
  lts::Counters b;
  b.systems_solved = 5;
  b.J_evaluations = 7;
  a += b;
  CHECK(a.systems_solved == 8);
  CHECK(a.regular_systems == 2);
  CHECK(a.J_evaluations == 7);
}

TEST_CASE("problem validation enforces the h range and intercept column") {
  auto problem = example1_problem(3);
  CHECK_NOTHROW(problem.validate());
  problem.h = 0;
  CHECK_THROWS_AS(problem.validate(), lts::InvalidInputError);
  problem.h = 10;
  CHECK_THROWS_AS(problem.validate(), lts::InvalidInputError);

  lts::Problem with_flag;
  with_flag.data.X = lts::Matrix{{1, 2}, {1, 3}, {0.5, 4}};
  with_flag.data.Y = {1, 2, 3};
  with_flag.data.has_intercept = true;
  with_flag.h = 2;
  CHECK_THROWS_AS(with_flag.validate(), lts::InvalidInputError);
  with_flag.data.X(2, 0) = 1.0;
  CHECK_NOTHROW(with_flag.validate());
}
