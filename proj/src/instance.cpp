// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/instance.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>

namespace mpp {

IncrementalUtility::IncrementalUtility(const MppInstance& inst)
    : n_states(inst.n_states), n_actions(inst.n_actions) {
  table.resize(static_cast<size_t>(n_states) * n_actions * n_actions);
  for (int w = 0; w < n_states; ++w)
    for (int a = 0; a < n_actions; ++a)
      for (int a2 = 0; a2 < n_actions; ++a2)
        table[(static_cast<size_t>(w) * n_actions + a) * n_actions + a2] =
            inst.du(w, a, a2);
}

SliceSpace::SliceSpace(int pairs, int len) : n_pairs(pairs), length(len) {
  pow_[0] = 1;
  for (int i = 1; i <= len; ++i) pow_[i] = pow_[i - 1] * n_pairs;
  size = pow_[len];
}

std::int64_t SliceSpace::suffix(std::int64_t h, int j) const {
  return h % pow_[j];
}

std::int64_t SliceSpace::prefix(std::int64_t h, int j) const {
  return h / pow_[length - j];
}

std::int64_t SliceSpace::append(std::int64_t h, int x) const {
  if (length == 0) return 0;
  return (h % pow_[length - 1]) * n_pairs + x;
}

std::vector<std::string> validate_instance(const MppInstance& inst) {
  std::vector<std::string> issues;
  auto fail = [&](const std::string& msg) { issues.push_back(msg); };

  if (inst.n_states < 1) fail("n_states must be positive");
  if (inst.n_actions < 1) fail("n_actions must be positive");
  if (!issues.empty()) return issues;

  const size_t nk = static_cast<size_t>(inst.n_states) * inst.n_actions *
                    inst.n_states;
  const size_t nu = static_cast<size_t>(inst.n_states) * inst.n_actions;
  if (inst.kernel.size() != nk) fail("kernel has wrong size");
  if (inst.receiver_utility.size() != nu)
    fail("receiver_utility has wrong size");
  if (inst.sender_reward.size() != nu) fail("sender_reward has wrong size");
  if (!issues.empty()) return issues;

  for (int w = 0; w < inst.n_states; ++w) {
    for (int a = 0; a < inst.n_actions; ++a) {
      double sum = 0.0;
      for (int w2 = 0; w2 < inst.n_states; ++w2) {
        const double pr = inst.p(w, a, w2);
        if (pr < 0.0) {
          std::ostringstream os;
          os << "kernel[" << w << "][" << a << "][" << w2 << "] negative";
          fail(os.str());
        }
        sum += pr;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "kernel row (" << w << "," << a << ") sums to " << sum;
        fail(os.str());
      }
      const double rv = inst.v(w, a);
      if (rv < -1e-12 || rv > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "sender_reward[" << w << "][" << a << "] = " << rv
           << " outside [0,1]";
        fail(os.str());
      }
    }
  }
  return issues;
}

int receiver_best_action(const MppInstance& inst, int w) {
  int best = 0;
  for (int a = 1; a < inst.n_actions; ++a)
    if (inst.u(w, a) > inst.u(w, best)) best = a;
  return best;
}

MppInstance example1_instance() {
  MppInstance inst;
  inst.name = "example1";
  inst.n_states = 2;
  inst.n_actions = 2;
  // u(w, a) = 1{w == a}, v(w, a) = 1{a == 1}.
  inst.receiver_utility = {1.0, 0.0, 0.0, 1.0};
  inst.sender_reward = {0.0, 1.0, 0.0, 1.0};
  // Action 0 keeps the state with probability 0.8; action 1 switches it
  // with probability 0.8.
  inst.kernel = {
      // w = 0
      0.8, 0.2,  // a = 0
      0.2, 0.8,  // a = 1
      // w = 1
      0.2, 0.8,  // a = 0
      0.8, 0.2,  // a = 1
  };
  return inst;
}

}  // namespace mpp
