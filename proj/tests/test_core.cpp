// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/instance.hpp"
#include "mpp/io.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/persuasion.hpp"
#include "support.hpp"

using namespace mpp;

TEST_CASE("the bundled two-state instance is valid") {
  MppInstance inst = example1_instance();
  CHECK(validate_instance(inst).empty());
  CHECK(receiver_best_action(inst, 0) == 0);
  CHECK(receiver_best_action(inst, 1) == 1);
  CHECK(inst.p(0, 0, 0) == doctest::Approx(0.8));
  CHECK(inst.p(0, 1, 1) == doctest::Approx(0.8));
}

TEST_CASE("broken kernels are rejected with messages") {
  MppInstance inst = example1_instance();
  inst.kernel[0] = 1.5;  // row no longer stochastic
  CHECK(!validate_instance(inst).empty());
  inst = example1_instance();
  inst.sender_reward[0] = -0.2;  // outside [0, 1]
  CHECK(!validate_instance(inst).empty());
}

TEST_CASE("slice index arithmetic") {
  SliceSpace sp(4, 3);  // slices are base-4 numbers, oldest digit first
  CHECK(sp.size == 64);
  const std::int64_t h = 2 * 16 + 3 * 4 + 1;  // pairs (2, 3, 1)
  CHECK(sp.last(h) == 1);
  CHECK(sp.suffix(h, 2) == 3 * 4 + 1);
  CHECK(sp.prefix(h, 2) == 2 * 4 + 3);
  CHECK(sp.append(h, 0) == 3 * 16 + 1 * 4 + 0);  // drop oldest, push 0
  CHECK(sp.suffix(h, 0) == 0);
}

TEST_CASE("incremental utility table matches direct differences") {
  std::mt19937_64 rng(11);
  MppInstance inst = mpp_tests::random_instance(rng, 3, 3);
  IncrementalUtility du(inst);
  for (int w = 0; w < 3; ++w)
    for (int a = 0; a < 3; ++a)
      for (int a2 = 0; a2 < 3; ++a2)
        CHECK(du.at(w, a, a2) == doctest::Approx(inst.du(w, a, a2)));
}

TEST_CASE("full revelation is persuasive in every information model") {
  MppInstance inst = example1_instance();
  SignalingMechanism fr = full_revelation(inst);
  CHECK(check_persuasive(inst, fr, InfoModel::no_history()).persuasive);
  CHECK(check_persuasive(inst, fr, InfoModel::full_history()).persuasive);
  CHECK(check_persuasive(inst, fr, InfoModel::with_lag(1)).persuasive);
  CHECK(long_run_reward(inst, fr) == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("memory lifting preserves the induced process") {
  MppInstance inst = example1_instance();
  SignalingMechanism base = constant_mechanism(inst, 1);
  SignalingMechanism lifted = lift_memory(base, 2);
  CHECK(lifted.memory == 2);
  CHECK(long_run_reward(inst, lifted) ==
        doctest::Approx(long_run_reward(inst, base)).epsilon(1e-12));
}

TEST_CASE("constant recommend-switch mechanism: chain facts") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma = constant_mechanism(inst, 1);

  DenseChain chain = induced_chain(inst, sigma);
  CHECK(check_unichain(chain));
  auto pi = stationary_distribution(chain);
  CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-12));

  auto sq = spectral_quantities(inst, sigma);
  CHECK(sq.gap == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(sq.pi_min == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(lag_bound(sq, 0.1) == 10);

  CHECK(lag_distance(inst, sigma, 0) == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(lag_distance(inst, sigma, 1) == doctest::Approx(0.36).epsilon(1e-9));

  CHECK(long_run_reward(inst, sigma) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("reducible chains are reported, not silently averaged") {
  MppInstance inst = example1_instance();
  // Identity kernel: each state is absorbing under both actions.
  for (int w = 0; w < 2; ++w)
    for (int a = 0; a < 2; ++a)
      for (int w2 = 0; w2 < 2; ++w2)
        inst.kernel[(static_cast<size_t>(w) * 2 + a) * 2 + w2] =
            (w == w2) ? 1.0 : 0.0;
  DenseChain chain = induced_chain(inst, constant_mechanism(inst, 0));
  CHECK(!check_unichain(chain));
  CHECK_THROWS_AS(stationary_distribution(chain), NonUnichainError);
}

TEST_CASE("invariant distribution marginals are consistent") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma = constant_mechanism(inst, 1);
  InvariantDistribution inv = sender_preferred_invariant(inst, sigma, 2);
  double total = 0.0;
  for (double p : inv.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  auto pairm = inv.pair_marginal();
  CHECK(pairm[inst.pair_index(0, 1)] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pairm[inst.pair_index(0, 0)] == doctest::Approx(0.0).epsilon(1e-9));
  auto statem = inv.state_marginal();
  CHECK(statem[0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("instance JSON round trip") {
  std::mt19937_64 rng(3);
  MppInstance inst = mpp_tests::random_instance(rng, 3, 2);
  MppInstance back = parse_instance(instance_to_json(inst));
  CHECK(back.n_states == inst.n_states);
  CHECK(back.n_actions == inst.n_actions);
  for (size_t i = 0; i < inst.kernel.size(); ++i)
    CHECK(back.kernel[i] == doctest::Approx(inst.kernel[i]).epsilon(1e-15));
  for (size_t i = 0; i < inst.sender_reward.size(); ++i) {
    CHECK(back.sender_reward[i] ==
          doctest::Approx(inst.sender_reward[i]).epsilon(1e-15));
    CHECK(back.receiver_utility[i] ==
          doctest::Approx(inst.receiver_utility[i]).epsilon(1e-15));
  }
}

TEST_CASE("mechanism JSON round trip, including positive memory") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma = lift_memory(constant_mechanism(inst, 1), 2);
  sigma.prob(3, 0, 0) = 0.25;
  sigma.prob(3, 0, 1) = 0.75;
  SignalingMechanism back = parse_mechanism(inst, mechanism_to_json(inst, sigma));
  CHECK(back.memory == 2);
  for (size_t i = 0; i < sigma.table.size(); ++i)
    CHECK(back.table[i] == doctest::Approx(sigma.table[i]).epsilon(1e-15));
}

TEST_CASE("malformed JSON raises an input error") {
  CHECK_THROWS_AS(parse_instance("{ not json"), MppError);
  MppInstance inst = example1_instance();
  CHECK_THROWS_AS(parse_mechanism(inst, "{\"memory\": 0}"), MppError);
}

TEST_CASE("history-slice cap guards the lag check") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma = constant_mechanism(inst, 1);
  CHECK_THROWS_AS(
      check_persuasive(inst, sigma, InfoModel::with_lag(slice_cap() + 2)),
      CapExceededError);
}
