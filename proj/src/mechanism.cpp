// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/mechanism.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

namespace mpp {

SignalingMechanism::SignalingMechanism(int k, int states, int actions)
    : memory(k), n_states(states), n_actions(actions) {
  table.resize(static_cast<size_t>(n_windows()) * states * actions, 0.0);
}

std::vector<std::string> SignalingMechanism::validate() const {
  std::vector<std::string> issues;
  const std::int64_t slices = n_windows();
  for (std::int64_t h = 0; h < slices; ++h) {
    for (int w = 0; w < n_states; ++w) {
      double sum = 0.0;
      for (int a = 0; a < n_actions; ++a) {
        const double pr = prob(h, w, a);
        if (pr < -1e-12) {
          std::ostringstream os;
          os << "negative probability at slice " << h << ", state " << w
             << ", action " << a;
          issues.push_back(os.str());
        }
        sum += pr;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "row (slice " << h << ", state " << w << ") sums to " << sum;
        issues.push_back(os.str());
      }
    }
  }
  return issues;
}

SignalingMechanism full_revelation(const MppInstance& inst, int memory) {
  SignalingMechanism sigma(memory, inst.n_states, inst.n_actions);
  for (std::int64_t h = 0; h < sigma.n_windows(); ++h)
    for (int w = 0; w < inst.n_states; ++w)
      sigma.prob(h, w, receiver_best_action(inst, w)) = 1.0;
  return sigma;
}

SignalingMechanism constant_mechanism(const MppInstance& inst, int action,
                                      int memory) {
  SignalingMechanism sigma(memory, inst.n_states, inst.n_actions);
  for (std::int64_t h = 0; h < sigma.n_windows(); ++h)
    for (int w = 0; w < inst.n_states; ++w) sigma.prob(h, w, action) = 1.0;
  return sigma;
}

SignalingMechanism lift_memory(const SignalingMechanism& sigma, int k2) {
  SignalingMechanism out(k2, sigma.n_states, sigma.n_actions);
  const SliceSpace big = out.window();
  for (std::int64_t h = 0; h < big.size; ++h) {
    const std::int64_t sub = big.suffix(h, sigma.memory);
    for (int w = 0; w < sigma.n_states; ++w)
      for (int a = 0; a < sigma.n_actions; ++a)
        out.prob(h, w, a) = sigma.prob(sub, w, a);
  }
  return out;
}

std::vector<double> InvariantDistribution::suffix_marginal(int j) const {
  const SliceSpace sp = space();
  const SliceSpace sub(sp.n_pairs, j);
  std::vector<double> out(static_cast<size_t>(sub.size), 0.0);
  for (std::int64_t h = 0; h < sp.size; ++h)
    out[static_cast<size_t>(sp.suffix(h, j))] += probs[h];
  return out;
}

std::vector<double> InvariantDistribution::state_marginal() const {
  const std::vector<double> pairs = pair_marginal();
  std::vector<double> out(n_states, 0.0);
  for (int x = 0; x < n_states * n_actions; ++x)
    out[x / n_actions] += pairs[x];
  return out;
}

}  // namespace mpp
