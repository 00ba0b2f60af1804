// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_CHAIN_HPP
#define MPP_CHAIN_HPP

#include <cstdint>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"

namespace mpp {

/// Row-stochastic matrix stored dense, row-major.
struct DenseChain {
  std::int64_t n = 0;
  std::vector<double> probs;  // [from][to]

  double at(std::int64_t i, std::int64_t j) const { return probs[i * n + j]; }
  double& at(std::int64_t i, std::int64_t j) { return probs[i * n + j]; }
};

/// Markov chain over history slices X^L induced by running sigma.
/// Requires L >= max(k, 1); sigma reads the most recent k pairs.
DenseChain induced_slice_chain(const MppInstance& inst,
                               const SignalingMechanism& sigma, int L);

/// State-to-state chain T(w, w') = sum_a sigma(a | w) p(w' | w, a).
/// Only valid for memory-0 mechanisms.
DenseChain induced_chain(const MppInstance& inst,
                         const SignalingMechanism& sigma);

/// Unique invariant distribution of a unichain transition matrix,
/// computed by a direct linear solve and cross-checked with power
/// iteration. Throws NonUnichainError when the invariant is not unique.
std::vector<double> stationary_distribution(const DenseChain& chain);

bool check_unichain(const DenseChain& chain);

/// Invariant over X^L maximizing long-run sender reward among invariant
/// distributions of the slice chain (ties broken by the LP solver).
InvariantDistribution sender_preferred_invariant(
    const MppInstance& inst, const SignalingMechanism& sigma, int L);

/// Long-run average sender reward under sigma's sender-preferred invariant.
double long_run_reward(const MppInstance& inst,
                       const SignalingMechanism& sigma);

/// d_l = max_x || p(.|x) T^l - pi ||_1 where T is the state chain of a
/// memory-0 mechanism and pi its invariant.
double lag_distance(const MppInstance& inst, const SignalingMechanism& sigma,
                    int lag);

struct SpectralQuantities {
  double gap = 0.0;     // 1 - max |lambda != 1|
  double pi_min = 0.0;  // min_w pi(w)
};

/// Spectral gap and invariant floor of the state chain of a memory-0
/// mechanism. Throws DegenerateGapError when the gap is numerically zero.
SpectralQuantities spectral_quantities(const MppInstance& inst,
                                       const SignalingMechanism& sigma);

/// Smallest l with 2 (1 - gap)^l / pi_min <= eps, i.e.
/// ceil((1/gap) log(2 / (eps pi_min))).
int lag_bound(const SpectralQuantities& sq, double eps);

}  // namespace mpp

#endif  // MPP_CHAIN_HPP
