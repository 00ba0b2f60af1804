// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_INSTANCE_HPP
#define MPP_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mpp {

/// A Markov persuasion process: finite states and actions, an
/// action-controlled transition kernel, receiver utilities (arbitrary
/// units) and sender rewards in [0,1].
struct MppInstance {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> kernel;            // [w][a][w'], row-stochastic in w'
  std::vector<double> receiver_utility;  // [w][a]
  std::vector<double> sender_reward;     // [w][a], values in [0,1]
  std::string name;

  int n_pairs() const { return n_states * n_actions; }

  double p(int w, int a, int w2) const {
    return kernel[(static_cast<size_t>(w) * n_actions + a) * n_states + w2];
  }
  // p(.|x) for a state-action pair index x = w*|A|+a.
  double p_from_pair(int x, int w2) const {
    return kernel[static_cast<size_t>(x) * n_states + w2];
  }
  double u(int w, int a) const {
    return receiver_utility[static_cast<size_t>(w) * n_actions + a];
  }
  double v(int w, int a) const {
    return sender_reward[static_cast<size_t>(w) * n_actions + a];
  }
  // Incremental receiver payoff of a over a2 at state w.
  double du(int w, int a, int a2) const { return u(w, a) - u(w, a2); }

  int pair_index(int w, int a) const { return w * n_actions + a; }
  int pair_state(int x) const { return x / n_actions; }
  int pair_action(int x) const { return x % n_actions; }
};

/// Precomputed table of incremental payoffs du[w][a][a'] = u(w,a) - u(w,a').
struct IncrementalUtility {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> table;  // [w][a][a']

  explicit IncrementalUtility(const MppInstance& inst);
  double at(int w, int a, int a2) const {
    return table[(static_cast<size_t>(w) * n_actions + a) * n_actions + a2];
  }
};

/// Index arithmetic for history slices h in X^length, X = states x actions.
/// Digits are base |X|; the most significant digit is the oldest pair.
struct SliceSpace {
  int n_pairs = 1;
  int length = 0;
  std::int64_t size = 1;  // n_pairs^length

  SliceSpace() = default;
  SliceSpace(int pairs, int len);

  // Last (most recent) pair of a slice.
  int last(std::int64_t h) const { return static_cast<int>(h % n_pairs); }
  // Suffix of length j (the j most recent pairs).
  std::int64_t suffix(std::int64_t h, int j) const;
  // Prefix of length j (the j oldest pairs).
  std::int64_t prefix(std::int64_t h, int j) const;
  // Slice one step later: drop the oldest pair, append x.
  std::int64_t append(std::int64_t h, int x) const;

 private:
  std::int64_t pow_[64] = {1};
};

/// Returns a description of each violated MppInstance invariant;
/// empty means the instance is valid.
std::vector<std::string> validate_instance(const MppInstance& inst);

/// argmax_a u(w, a), ties broken toward the lowest action index.
int receiver_best_action(const MppInstance& inst, int w);

/// The Example-1 instance: two states, two actions, u = 1{w==a},
/// v = 1{a==1}; action 0 keeps the state with probability 0.8, action 1
/// switches it with probability 0.8.
MppInstance example1_instance();

}  // namespace mpp

#endif  // MPP_INSTANCE_HPP
