// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_ROBUST_HPP
#define MPP_ROBUST_HPP

#include <cstdint>
#include <vector>

#include "mpp/instance.hpp"
#include "mpp/mechanism.hpp"

namespace mpp {

/// Weight/posterior decomposition of a memory-0 mechanism at its
/// invariant: w_a = Pr[recommend a], mu_a = posterior over states given a.
struct SplitMechanism {
  std::vector<double> weights;           // [a]
  std::vector<std::vector<double>> posteriors;  // [a][w]
  std::vector<int> support;              // actions with w_a > 0
};

SplitMechanism split_mechanism(const MppInstance& inst,
                               const SignalingMechanism& sigma);

/// Inverse of split_mechanism: rebuild sigma(a | w) from weights and
/// posteriors. Requires the implied state marginal to be stationary for
/// the implied chain (within 1e-8); throws StationarityViolatedError.
SignalingMechanism merge_beliefs(const MppInstance& inst,
                                 const std::vector<double>& weights,
                                 const std::vector<std::vector<double>>& posteriors);

/// Per-action strict-persuasiveness radius: the largest D_a such that
/// some belief eta_a obeys a-recommendations with margin D_a times the
/// utility scale. D = min over recommended actions. Throws
/// RegularityError when some recommended action admits no positive
/// margin (e.g. another action is utility-identical to it).
struct RegularityParams {
  double d_min = 0.0;                    // D
  std::vector<double> d_a;               // [a], 0 for unrecommended actions
  std::vector<std::vector<double>> eta;  // [a][w], strict-obedience beliefs
};

RegularityParams regularity_params(const MppInstance& inst,
                                   const SplitMechanism& split);

/// Nonnegative potential y solving y'(I - P_f) = sum_a w_a eta_a'(P_a - I)
/// with minimal l1 norm, where P_a(w, .) = p(. | w, a) and f is the
/// receiver-optimal action map. Also reports tau = max_w 1 / nu_f(w) for
/// the invariant nu_f of P_f, and the smallest positive singular value
/// s_f of I - P_f.
struct PerturbationPotential {
  std::vector<double> y;
  double tau = 0.0;
  double s_f = 0.0;
  double y_norm1 = 0.0;
};

PerturbationPotential perturbation_lp(const MppInstance& inst,
                                      const SplitMechanism& split,
                                      const RegularityParams& reg);

/// Memory-0 mechanism over an extended signal set: one signal per
/// recommended action plus one "reset" signal per state (collapsed to the
/// receiver-optimal action when acted on).
struct RobustMechanism {
  double epsilon = 0.0;  // robustness radius actually certified
  double delta = 0.0;    // mixing weight used in the construction
  double d_min = 0.0;    // regularity margin of the input mechanism
  double payoff = 0.0;   // long-run sender reward of the construction
  double value_bound = 0.0;  // certified lower bound on long-run reward
  double value_bound_coarse = 0.0;  // closed-form bound (never larger)
  std::vector<double> signal_weights;       // [signal]
  std::vector<std::vector<double>> signal_posteriors;  // [signal][w]
  std::vector<int> signal_action;           // action taken on each signal
  SignalingMechanism collapsed;             // action-level memory-0 mechanism
};

/// The history-independent construction that stays persuasive for every
/// receiver prior within l1 distance epsilon of the design invariant.
/// Throws EpsilonTooLargeError (carrying the admissible threshold) when
/// epsilon exceeds what the instance's regularity supports.
RobustMechanism build_robust_mechanism(const MppInstance& inst,
                                       const SignalingMechanism& sigma,
                                       double epsilon);

/// Same pipeline started from the exact no-history optimum.
RobustMechanism build_robust_mechanism(const MppInstance& inst,
                                       double epsilon);

struct RobustVerification {
  bool analytic_ok = false;   // closed-form robustness inequality
  bool sampled_ok = false;    // Monte-Carlo prior perturbations
  double worst_margin = 0.0;  // most negative sampled obedience slack
  int samples = 0;
};

/// Check the robustness certificate: an analytic inequality plus `samples`
/// random priors in the l1 ball of radius epsilon (half drawn on the
/// boundary). Diagnostic: failures are reported in the flags, not thrown.
RobustVerification verify_robust(const MppInstance& inst,
                                 const RobustMechanism& rm,
                                 int samples, std::uint64_t seed);

struct PersuasiveLag {
  int exact = -1;      // smallest l with d_l <= eps (searched directly)
  int spectral = -1;   // a-priori bound from the spectral gap
};

/// How long the robust mechanism needs to run before lagged observers are
/// obedient: exact search over lag distances plus the spectral bound.
PersuasiveLag persuasive_lag(const MppInstance& inst,
                             const RobustMechanism& rm, double eps);

}  // namespace mpp

#endif  // MPP_ROBUST_HPP
