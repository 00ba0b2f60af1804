// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/robust.hpp"
#include "support.hpp"

using namespace mpp;

TEST_CASE("split of the memoryless optimum: weights and posteriors") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  SplitMechanism sp = split_mechanism(inst, sigma);
  CHECK(sp.weights[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sp.weights[1] == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(sp.support.size() == 1);
  CHECK(sp.support[0] == 1);
  CHECK(sp.posteriors[1][0] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("split then merge reproduces the mechanism") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    MppInstance inst = mpp_tests::random_instance(rng, 3, 2);
    SignalingMechanism sigma = mpp_tests::random_persuasive(inst, rng);
    SplitMechanism sp = split_mechanism(inst, sigma);
    SignalingMechanism back = merge_beliefs(inst, sp.weights, sp.posteriors);
    for (size_t i = 0; i < sigma.table.size(); ++i)
      CHECK(back.table[i] == doctest::Approx(sigma.table[i]).epsilon(1e-9));
  }
}

TEST_CASE("regularity margin and perturbation potential: frozen values") {
  MppInstance inst = example1_instance();
  SignalingMechanism sigma =
      solve_benchmark(inst, InfoModel::no_history()).mechanism;
  SplitMechanism sp = split_mechanism(inst, sigma);
  RegularityParams reg = regularity_params(inst, sp);
  CHECK(reg.d_min == doctest::Approx(1.0).epsilon(1e-9));
  PerturbationPotential pot = perturbation_lp(inst, sp, reg);
  CHECK(pot.tau == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(pot.s_f == doctest::Approx(1.16619).epsilon(1e-4));
  CHECK(pot.y_norm1 == doctest::Approx(4.0).epsilon(1e-6));
  for (double yi : pot.y) CHECK(yi >= -1e-12);
}

TEST_CASE("robust construction: frozen certificate numbers") {
  MppInstance inst = example1_instance();
  RobustMechanism rm = build_robust_mechanism(inst, 0.01);
  CHECK(rm.epsilon == doctest::Approx(0.01));
  CHECK(rm.delta == doctest::Approx(0.021739130).epsilon(1e-7));
  CHECK(rm.payoff == doctest::Approx(0.92).epsilon(1e-7));
  CHECK(rm.value_bound == doctest::Approx(0.90).epsilon(1e-7));
  CHECK(rm.value_bound_coarse == doctest::Approx(0.688957250).epsilon(1e-6));
  CHECK(rm.payoff >= rm.value_bound - 1e-12);
  CHECK(rm.value_bound >= rm.value_bound_coarse - 1e-12);
  // One signal per supported action plus one reset signal per state.
  CHECK(rm.signal_weights.size() == 3);
  double wsum = 0.0;
  for (double w : rm.signal_weights) wsum += w;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("robust certificate passes both verifications") {
  MppInstance inst = example1_instance();
  RobustMechanism rm = build_robust_mechanism(inst, 0.01);
  RobustVerification ver = verify_robust(inst, rm, 2000, 7);
  CHECK(ver.analytic_ok);
  CHECK(ver.sampled_ok);
  CHECK(ver.samples == 2000);
  CHECK(ver.worst_margin >= -1e-12);
  CHECK(check_persuasive(inst, rm.collapsed, InfoModel::no_history())
            .persuasive);
}

TEST_CASE("time until lagged observers become obedient") {
  MppInstance inst = example1_instance();
  RobustMechanism rm = build_robust_mechanism(inst, 0.01);
  PersuasiveLag lags = persuasive_lag(inst, rm, 0.01);
  CHECK(lags.exact == 7);
  CHECK(lags.spectral == 13);
  CHECK(lags.exact <= lags.spectral);
  CHECK(lag_distance(inst, rm.collapsed, lags.exact) <= 0.01 + 1e-12);
  CHECK(lag_distance(inst, rm.collapsed, lags.exact - 1) > 0.01);
}

TEST_CASE("an over-ambitious radius reports its admissible threshold") {
  MppInstance inst = example1_instance();
  bool threw = false;
  try {
    build_robust_mechanism(inst, 0.5);
  } catch (const EpsilonTooLargeError& e) {
    threw = true;
    CHECK(e.threshold == doctest::Approx(0.0321499).epsilon(1e-4));
    CHECK(e.threshold < 0.5);
  }
  CHECK(threw);
  // Just inside the threshold must still work.
  RobustMechanism ok = build_robust_mechanism(inst, 0.03);
  CHECK(ok.payoff >= ok.value_bound - 1e-12);
}

TEST_CASE("potential norm bound holds on random instances") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    MppInstance inst =
        mpp_tests::random_instance(rng, 2 + static_cast<int>(rng() % 3), 2);
    SignalingMechanism sigma =
        solve_benchmark(inst, InfoModel::no_history()).mechanism;
    SplitMechanism sp = split_mechanism(inst, sigma);
    RegularityParams reg;
    try {
      reg = regularity_params(inst, sp);
    } catch (const RegularityError&) {
      continue;  // utility ties: construction legitimately unavailable
    }
    PerturbationPotential pot = perturbation_lp(inst, sp, reg);
    const double bound =
        2.0 * (1.0 + pot.tau) * std::sqrt(double(inst.n_states)) / pot.s_f;
    CHECK(pot.y_norm1 <= bound + 1e-6);
  }
}
