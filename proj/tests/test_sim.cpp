// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/sim.hpp"
#include "support.hpp"

using namespace mpp;

TEST_CASE("following the memoryless optimum earns its exact value") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  SimResult res = simulate(inst, sigma, ReceiverBehavior::follow(), 100000, 1);
  CHECK(res.steps == 100000);
  CHECK(res.disobediences == 0);
  CHECK(res.average_reward == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(res.pair_freq[inst.pair_index(0, 1)] ==
        doctest::Approx(0.5).epsilon(0.05));
  CHECK(res.pair_freq[inst.pair_index(0, 0)] == doctest::Approx(0.0));
}

TEST_CASE("a best-responding receiver obeys a persuasive mechanism") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  SimResult res = simulate(
      inst, sigma, ReceiverBehavior::best_respond(InfoModel::no_history()),
      20000, 3);
  CHECK(res.disobediences == 0);
  CHECK(res.average_reward == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("identical seeds reproduce runs exactly; distinct seeds differ") {
  std::mt19937_64 rng(8);
  MppInstance inst = mpp_tests::random_instance(rng, 3, 2);
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  SimResult a = simulate(inst, sigma, ReceiverBehavior::follow(), 5000, 4);
  SimResult b = simulate(inst, sigma, ReceiverBehavior::follow(), 5000, 4);
  CHECK(a.average_reward == b.average_reward);
  for (size_t i = 0; i < a.pair_freq.size(); ++i)
    CHECK(a.pair_freq[i] == b.pair_freq[i]);
  SimResult c = simulate(inst, sigma, ReceiverBehavior::follow(), 5000, 5);
  CHECK(a.average_reward != c.average_reward);
}

TEST_CASE("empirical pair frequencies track the design invariant") {
  std::mt19937_64 rng(12);
  const std::int64_t T = 100000;
  const double tol = 5.0 * std::sqrt(4.0 / double(T));  // |X| = 4
  MppInstance inst = example1_instance();
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  auto target = sender_preferred_invariant(inst, sigma, 1).pair_marginal();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SimResult res = simulate(inst, sigma, ReceiverBehavior::follow(), T, seed);
    double l1 = 0.0;
    for (size_t i = 0; i < target.size(); ++i)
      l1 += std::abs(res.pair_freq[i] - target[i]);
    CHECK(l1 <= tol);
  }
}

TEST_CASE("average reward matches the chain value on random instances") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    MppInstance inst = mpp_tests::random_instance(rng, 3, 3);
    SignalingMechanism sigma =
        solve_benchmark(inst, InfoModel::no_history()).mechanism;
    const double exact = long_run_reward(inst, sigma);
    SimResult res =
        simulate(inst, sigma, ReceiverBehavior::follow(), 200000, trial);
    CHECK(res.average_reward == doctest::Approx(exact).epsilon(0.02));
  }
}
