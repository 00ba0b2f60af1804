// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_TESTS_SUPPORT_HPP
#define MPP_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/persuasion.hpp"

namespace mpp_tests {

/// Random instance with a strictly positive kernel (0.9 Dirichlet +
/// 0.1 uniform per row), so every induced chain is unichain. Utilities
/// and rewards are uniform in [0, 1].
inline mpp::MppInstance random_instance(std::mt19937_64& rng, int n_states,
                                        int n_actions) {
  mpp::MppInstance inst;
  inst.n_states = n_states;
  inst.n_actions = n_actions;
  inst.name = "random";
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  inst.kernel.resize(static_cast<size_t>(n_states) * n_actions * n_states);
  for (int w = 0; w < n_states; ++w) {
    for (int a = 0; a < n_actions; ++a) {
      std::vector<double> g(n_states);
      double sum = 0.0;
      for (int w2 = 0; w2 < n_states; ++w2) sum += g[w2] = exp1(rng);
      for (int w2 = 0; w2 < n_states; ++w2)
        inst.kernel[(static_cast<size_t>(w) * n_actions + a) * n_states + w2] =
            0.9 * g[w2] / sum + 0.1 / n_states;
    }
  }
  inst.receiver_utility.resize(static_cast<size_t>(n_states) * n_actions);
  inst.sender_reward.resize(static_cast<size_t>(n_states) * n_actions);
  for (auto& x : inst.receiver_utility) x = unif(rng);
  for (auto& x : inst.sender_reward) x = unif(rng);
  return inst;
}

/// Random memory-0 mechanism that passes the exact obedience check in
/// the no-history model: a random stochastic table blended toward full
/// revelation until persuasive. Full revelation itself always qualifies,
/// so the blend loop terminates.
inline mpp::SignalingMechanism random_persuasive(const mpp::MppInstance& inst,
                                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  mpp::SignalingMechanism noise(0, inst.n_states, inst.n_actions);
  for (int w = 0; w < inst.n_states; ++w) {
    double sum = 0.0;
    for (int a = 0; a < inst.n_actions; ++a)
      sum += noise.prob(0, w, a) = 0.02 + unif(rng);
    for (int a = 0; a < inst.n_actions; ++a) noise.prob(0, w, a) /= sum;
  }
  const mpp::SignalingMechanism anchor = mpp::full_revelation(inst);
  for (double t : {1.0, 0.5, 0.25, 0.1, 0.04, 0.01, 0.0}) {
    mpp::SignalingMechanism mix = noise;
    for (size_t i = 0; i < mix.table.size(); ++i)
      mix.table[i] = t * noise.table[i] + (1.0 - t) * anchor.table[i];
    if (mpp::check_persuasive(inst, mix, mpp::InfoModel::no_history())
            .persuasive)
      return mix;
  }
  return anchor;
}

}  // namespace mpp_tests

#endif  // MPP_TESTS_SUPPORT_HPP
