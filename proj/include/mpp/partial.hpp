// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_PARTIAL_HPP
#define MPP_PARTIAL_HPP

#include <cstdint>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/persuasion.hpp"

namespace mpp {

struct PartialOptions {
  int lag = 1;          // receiver observes everything up to `lag` steps back
  int memory = 0;       // mechanism memory k
  int starts = 50;      // random restarts (plus deterministic warm starts)
  std::uint64_t seed = 0;
  int max_iters = 200;
  double value_tol = 1e-9;    // stop when alternation improves less than this
  double obedience_tol = 1e-9;
  // Extra deterministic starting points, e.g. the lifted solution of a
  // smaller memory level when sweeping k upward.
  std::vector<SignalingMechanism> warm_starts;
  // Verified coordinate ascent applied to the best candidate: every
  // accepted move passes the exact obedience check, so the certified
  // lower-bound contract is unaffected.
  bool polish = true;
  int polish_passes = 40;
  // Random restarts around the incumbent: perturb, repair feasibility,
  // re-ascend. Escapes local optima of the alternation and the ascent.
  int hops = 12;
};

struct PartialResult {
  double value = 0.0;           // exact long-run reward of `mechanism`
  SignalingMechanism mechanism; // best persuasive candidate found
  // Index into the start list (two warm starts first, then the random
  // restarts) that produced the best verified mechanism.
  int best_start = -1;
  int iterations = 0;  // alternation rounds of the winning start
  // Best verified value per start; -1 when no iterate verified.
  std::vector<double> start_values;
};

/// Alternating lower-bound heuristic for the partial-history model
/// Phi_lag with mechanisms in Sigma_k. Every candidate is re-verified
/// with the exact obedience check before it can be reported; the result
/// is always a certified lower bound on the optimum.
PartialResult solve_partial(const MppInstance& inst,
                            const PartialOptions& opts);

}  // namespace mpp

#endif  // MPP_PARTIAL_HPP
