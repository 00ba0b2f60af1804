// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_BENCHMARK_HPP
#define MPP_BENCHMARK_HPP

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"
#include "mpp/persuasion.hpp"

namespace mpp {

struct BenchmarkResult {
  double value = 0.0;             // optimal long-run sender reward
  SignalingMechanism mechanism;   // extracted optimal mechanism (memory 0
                                  // for NoHistory, memory 1 for FullHistory)
  std::vector<double> occupancy;  // optimal z over the LP's window space
};

/// Exact LP benchmark for the no-history or full-history information
/// model. Throws on Lag models (those are handled by the alternating
/// solver in partial.hpp).
BenchmarkResult solve_benchmark(const MppInstance& inst,
                                const InfoModel& model);

struct EqualityCheck {
  bool holds = false;
  std::string failing_clause;    // which test failed (empty when holds)
  SignalingMechanism witness;    // memory-1 mechanism; valid when holds
  double value_no = 0.0;         // no-history optimum
  double witness_value = 0.0;    // long-run reward of the witness
};

/// Decides whether full history costs the sender nothing: the optimal
/// no-history beliefs must be linearly independent and every one-step
/// belief p(.|x) must lie in their convex hull. When both hold, a
/// memory-1 witness matching the no-history optimum is built and
/// verified (verification failure signals a bug, not a model outcome).
EqualityCheck check_equality_condition(const MppInstance& inst);

}  // namespace mpp

#endif  // MPP_BENCHMARK_HPP
