// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_ERRORS_HPP
#define MPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mpp {

struct MppError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The induced chain has two or more recurrent classes.
struct NonUnichainError : MppError {
  using MppError::MppError;
};

// Absolute spectral gap numerically zero.
struct DegenerateGapError : MppError {
  using MppError::MppError;
};

// Slice-length cap would be exceeded (state-space explosion guard).
struct CapExceededError : MppError {
  using MppError::MppError;
};

// LP numerics: phase-1 claims feasible but residual too large, etc.
struct NumericalFailureError : MppError {
  using MppError::MppError;
};

// Input mechanism is not persuasive where a persuasive one is required.
struct NotPersuasiveError : MppError {
  using MppError::MppError;
};

// Splitting weights do not satisfy the stationarity condition.
struct StationarityViolatedError : MppError {
  using MppError::MppError;
};

// Regularity margin non-positive for a supported action.
struct RegularityError : MppError {
  using MppError::MppError;
};

// Requested robustness radius violates the admissibility threshold.
struct EpsilonTooLargeError : MppError {
  double threshold;
  EpsilonTooLargeError(const std::string& msg, double thr)
      : MppError(msg), threshold(thr) {}
};

// A constructed witness failed its own verification (internal bug signal).
struct WitnessVerificationError : MppError {
  using MppError::MppError;
};

}  // namespace mpp

#endif  // MPP_ERRORS_HPP
