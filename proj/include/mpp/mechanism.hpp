// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_MECHANISM_HPP
#define MPP_MECHANISM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mpp/instance.hpp"

namespace mpp {

/// A direct signaling mechanism in Sigma_k: a stochastic table
/// sigma(a | h^k, w) indexed by a history slice of length k (memory)
/// and the current state.
struct SignalingMechanism {
  int memory = 0;  // k
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> table;  // [slice][w][a]

  SignalingMechanism() = default;
  SignalingMechanism(int k, int states, int actions);

  SliceSpace window() const {
    return SliceSpace(n_states * n_actions, memory);
  }
  std::int64_t n_windows() const { return window().size; }

  double prob(std::int64_t slice, int w, int a) const {
    return table[(slice * n_states + w) * n_actions + a];
  }
  double& prob(std::int64_t slice, int w, int a) {
    return table[(slice * n_states + w) * n_actions + a];
  }

  // Row-sum / nonnegativity violations, one message per offending row.
  std::vector<std::string> validate() const;
};

/// sigma(a_w | w) = 1 at every state: full revelation via the
/// receiver-optimal recommendation. Persuasive in every information model.
SignalingMechanism full_revelation(const MppInstance& inst, int memory = 0);

/// Constant mechanism recommending one fixed action everywhere.
SignalingMechanism constant_mechanism(const MppInstance& inst, int action,
                                      int memory = 0);

/// Lift a mechanism to a longer memory k2 >= k by ignoring the older
/// coordinates of the window.
SignalingMechanism lift_memory(const SignalingMechanism& sigma, int k2);

/// An invariant distribution over history slices of a fixed length,
/// with marginal accessors.
struct InvariantDistribution {
  int slice_length = 1;  // m
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> probs;  // over X^m

  SliceSpace space() const {
    return SliceSpace(n_states * n_actions, slice_length);
  }
  // Marginal over the most recent j pairs (j <= slice_length).
  std::vector<double> suffix_marginal(int j) const;
  // Marginal over the most recent (state, action) pair.
  std::vector<double> pair_marginal() const { return suffix_marginal(1); }
  // Marginal over the most recent state.
  std::vector<double> state_marginal() const;
};

}  // namespace mpp

#endif  // MPP_MECHANISM_HPP
