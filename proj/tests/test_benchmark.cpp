// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "support.hpp"

using namespace mpp;

TEST_CASE("two-state instance: exact benchmark optima") {
  MppInstance inst = example1_instance();

  BenchmarkResult no = solve_benchmark(inst, InfoModel::no_history());
  CHECK(no.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(no.mechanism.memory == 0);
  CHECK(check_persuasive(inst, no.mechanism, InfoModel::no_history())
            .persuasive);
  CHECK(long_run_reward(inst, no.mechanism) ==
        doctest::Approx(no.value).epsilon(1e-9));

  BenchmarkResult full = solve_benchmark(inst, InfoModel::full_history());
  CHECK(full.value == doctest::Approx(0.52).epsilon(1e-9));
  CHECK(full.mechanism.memory == 1);
  CHECK(check_persuasive(inst, full.mechanism, InfoModel::full_history())
            .persuasive);
  CHECK(long_run_reward(inst, full.mechanism) ==
        doctest::Approx(full.value).epsilon(1e-9));
}

TEST_CASE("lag models are rejected by the exact benchmark") {
  MppInstance inst = example1_instance();
  CHECK_THROWS_AS(solve_benchmark(inst, InfoModel::with_lag(1)), MppError);
}

TEST_CASE("occupancy measures are distributions achieving the value") {
  MppInstance inst = example1_instance();
  for (auto model : {InfoModel::no_history(), InfoModel::full_history()}) {
    BenchmarkResult res = solve_benchmark(inst, model);
    double total = 0.0, reward = 0.0;
    const size_t nx = static_cast<size_t>(inst.n_pairs());
    for (size_t i = 0; i < res.occupancy.size(); ++i) {
      const int x = static_cast<int>(i % nx);
      total += res.occupancy[i];
      reward += res.occupancy[i] *
                inst.v(inst.pair_state(x), inst.pair_action(x));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(reward == doctest::Approx(res.value).epsilon(1e-9));
  }
}

TEST_CASE("full history never helps the sender") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    MppInstance inst =
        mpp_tests::random_instance(rng, 2 + static_cast<int>(rng() % 3),
                                   2 + static_cast<int>(rng() % 2));
    double no = solve_benchmark(inst, InfoModel::no_history()).value;
    double full = solve_benchmark(inst, InfoModel::full_history()).value;
    CHECK(full <= no + 1e-7);
    CHECK(full >= 0.0);
    CHECK(no <= 1.0 + 1e-9);
  }
}

TEST_CASE("equality condition fails on the two-state instance") {
  MppInstance inst = example1_instance();
  EqualityCheck chk = check_equality_condition(inst);
  CHECK(!chk.holds);
  CHECK(chk.failing_clause ==
        "one-step belief after pair (0,0) lies outside the belief hull");
}

TEST_CASE("when the equality condition holds, the witness closes the gap") {
  std::mt19937_64 rng(5);
  int holds_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    MppInstance inst = mpp_tests::random_instance(rng, 2, 2);
    EqualityCheck chk = check_equality_condition(inst);
    if (!chk.holds) continue;
    ++holds_seen;
    double full = solve_benchmark(inst, InfoModel::full_history()).value;
    CHECK(std::abs(chk.value_no - full) <= 1e-7);
    CHECK(std::abs(chk.witness_value - chk.value_no) <= 1e-7);
    CHECK(check_persuasive(inst, chk.witness, InfoModel::full_history())
              .persuasive);
  }
  CHECK(holds_seen > 0);  // the condition is not vacuous on random draws
}
