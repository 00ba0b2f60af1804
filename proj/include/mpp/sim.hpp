// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_SIM_HPP
#define MPP_SIM_HPP

#include <cstdint>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/persuasion.hpp"

namespace mpp {

/// How the simulated receiver reacts to recommendations.
///   Follow:      always obeys.
///   BestRespond: plays the best response to the exact posterior implied
///                by the given information model (ties go to the
///                recommendation).
struct ReceiverBehavior {
  enum Kind { Follow, BestRespond } kind = Follow;
  InfoModel model = InfoModel::no_history();

  static ReceiverBehavior follow() { return {Follow, InfoModel::no_history()}; }
  static ReceiverBehavior best_respond(const InfoModel& m) {
    return {BestRespond, m};
  }
};

struct SimResult {
  double average_reward = 0.0;       // sender, time-averaged
  std::vector<double> pair_freq;     // empirical (state, action) frequencies
  std::int64_t disobediences = 0;    // rounds where play != recommendation
  std::int64_t steps = 0;
};

/// Run sigma for `steps` rounds from a slice drawn from its invariant.
/// Transition and signal draws use separate seeded streams so results
/// are reproducible per seed.
SimResult simulate(const MppInstance& inst, const SignalingMechanism& sigma,
                   const ReceiverBehavior& behavior, std::int64_t steps,
                   std::uint64_t seed);

}  // namespace mpp

#endif  // MPP_SIM_HPP
