// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_PERSUASION_HPP
#define MPP_PERSUASION_HPP

#include <string>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"

namespace mpp {

/// What the receiver knows about the process history before acting.
///   NoHistory:   only the recommendation.
///   FullHistory: the entire past trajectory.
///   Lag(l):      everything up to l steps ago, plus the recommendation.
struct InfoModel {
  enum Kind { NoHistory, FullHistory, Lag } kind = NoHistory;
  int lag = 0;

  static InfoModel no_history() { return {NoHistory, 0}; }
  static InfoModel full_history() { return {FullHistory, 0}; }
  static InfoModel with_lag(int l) { return {Lag, l}; }
};

struct ObedienceReport {
  bool persuasive = true;
  double worst_margin = 0.0;  // most negative obedience slack seen
  std::string worst_context;  // human-readable description of the violation
};

/// Exact obedience check of sigma in the given information model, using
/// the slice chain over X^m with m = max(k, 1). For the Lag model the
/// receiver's belief is the point mass at the observed slice propagated
/// l steps forward. Throws CapExceededError when l + max(k,1) exceeds
/// the slice cap (default 4, override via MPP_SLICE_CAP).
ObedienceReport check_persuasive(const MppInstance& inst,
                                 const SignalingMechanism& sigma,
                                 const InfoModel& model, double tol = 1e-9);

int slice_cap();

}  // namespace mpp

#endif  // MPP_PERSUASION_HPP
