// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpp/lp.hpp"

using mpp::LinearProgram;
using mpp::LpStatus;

TEST_CASE("simplex-constrained maximum picks the best vertex") {
  LinearProgram lp(3);
  lp.objective = {1.0, 3.0, 2.0};
  lp.add_eq({1.0, 1.0, 1.0}, 1.0);
  auto sol = mpp::solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sol.primal[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inequality rows are honored as lower bounds") {
  // maximize -x subject to x >= 2  ->  value -2.
  LinearProgram lp(1);
  lp.objective = {-1.0};
  lp.add_ineq({1.0}, 2.0);
  auto sol = mpp::solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("mixed equalities and inequalities") {
  // maximize 2x + y  s.t.  x + y = 1,  y >= 0.25.
  LinearProgram lp(2);
  lp.objective = {2.0, 1.0};
  lp.add_eq({1.0, 1.0}, 1.0);
  lp.add_ineq({0.0, 1.0}, 0.25);
  auto sol = mpp::solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(sol.primal[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("contradictory equalities are infeasible") {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add_eq({1.0}, 1.0);
  lp.add_eq({1.0}, 2.0);
  CHECK(mpp::solve(lp).status == LpStatus::Infeasible);
}

TEST_CASE("unconstrained growth is reported as unbounded") {
  LinearProgram lp(2);
  lp.objective = {1.0, 0.0};
  lp.add_ineq({1.0, -1.0}, 0.0);  // x >= y, no upper bound
  CHECK(mpp::solve(lp).status == LpStatus::Unbounded);
}

TEST_CASE("degenerate vertices do not cycle") {
  // Classic degeneracy: several constraints meet at the optimum.
  LinearProgram lp(3);
  lp.objective = {1.0, 1.0, 1.0};
  lp.add_eq({1.0, 1.0, 0.0}, 1.0);
  lp.add_eq({1.0, 0.0, 1.0}, 1.0);
  lp.add_eq({0.0, 1.0, 1.0}, 1.0);
  auto sol = mpp::solve(lp);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.value == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("random transportation problems match the greedy optimum") {
  // maximize sum c_ij z_ij with fixed row sums over a 2x2 table: the
  // optimum puts each row's mass on its best column.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    LinearProgram lp(4);
    double expect = 0.0;
    for (int i = 0; i < 2; ++i) {
      double c0 = unif(rng), c1 = unif(rng);
      lp.objective[2 * i] = c0;
      lp.objective[2 * i + 1] = c1;
      std::vector<double> row(4, 0.0);
      row[2 * i] = row[2 * i + 1] = 1.0;
      lp.add_eq(row, 0.5);
      expect += 0.5 * std::max(c0, c1);
    }
    auto sol = mpp::solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(expect).epsilon(1e-9));
  }
}
