// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/partial.hpp"
#include "support.hpp"

using namespace mpp;

TEST_CASE("memoryless solver under one-step lag: two-state instance") {
  MppInstance inst = example1_instance();
  PartialOptions opts;
  opts.lag = 1;
  opts.memory = 0;
  opts.starts = 6;
  opts.seed = 0;
  PartialResult res = solve_partial(inst, opts);
  CHECK(res.value == doctest::Approx(0.5756).epsilon(2e-3));
  CHECK(res.best_start >= 0);
  // The reported value is the exact reward of a verified mechanism.
  CHECK(long_run_reward(inst, res.mechanism) ==
        doctest::Approx(res.value).epsilon(1e-9));
  CHECK(check_persuasive(inst, res.mechanism, InfoModel::with_lag(1))
            .persuasive);
}

TEST_CASE("one pair of memory lifts the value; warm starts chain upward") {
  MppInstance inst = example1_instance();
  PartialOptions opts;
  opts.lag = 1;
  opts.starts = 6;
  opts.seed = 0;

  opts.memory = 0;
  PartialResult k0 = solve_partial(inst, opts);

  opts.memory = 1;
  opts.warm_starts = {k0.mechanism};
  PartialResult k1 = solve_partial(inst, opts);

  CHECK(k1.value >= k0.value - 1e-9);  // lifting k0 is always available
  CHECK(k1.value > 0.76);
  CHECK(check_persuasive(inst, k1.mechanism, InfoModel::with_lag(1))
            .persuasive);
}

TEST_CASE("results are deterministic for a fixed seed") {
  MppInstance inst = example1_instance();
  PartialOptions opts;
  opts.lag = 1;
  opts.memory = 0;
  opts.starts = 4;
  opts.seed = 42;
  PartialResult a = solve_partial(inst, opts);
  PartialResult b = solve_partial(inst, opts);
  CHECK(a.value == b.value);
  CHECK(a.best_start == b.best_start);
  for (size_t i = 0; i < a.mechanism.table.size(); ++i)
    CHECK(a.mechanism.table[i] == b.mechanism.table[i]);
}

TEST_CASE("partial value sits between the exact benchmarks") {
  std::mt19937_64 rng(99);
  PartialOptions opts;
  opts.lag = 1;
  opts.memory = 1;
  opts.starts = 4;
  opts.seed = 1;
  for (int trial = 0; trial < 5; ++trial) {
    MppInstance inst =
        mpp_tests::random_instance(rng, 2 + static_cast<int>(rng() % 2), 2);
    double full = solve_benchmark(inst, InfoModel::full_history()).value;
    double no = solve_benchmark(inst, InfoModel::no_history()).value;
    PartialResult res = solve_partial(inst, opts);
    CHECK(full <= res.value + 1e-7);
    CHECK(res.value <= no + 1e-7);
    CHECK(check_persuasive(inst, res.mechanism, InfoModel::with_lag(1))
              .persuasive);
  }
}
