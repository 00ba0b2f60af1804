// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/robust.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/lp.hpp"
#include "mpp/persuasion.hpp"

namespace mpp {
namespace {

constexpr double kMassTol = 1e-12;

std::vector<double> stationary_design(const RobustMechanism& rm, int nw) {
  std::vector<double> pi(nw, 0.0);
  for (size_t s = 0; s < rm.signal_weights.size(); ++s)
    for (int w = 0; w < nw; ++w)
      pi[w] += rm.signal_weights[s] * rm.signal_posteriors[s][w];
  return pi;
}

}  // namespace

SplitMechanism split_mechanism(const MppInstance& inst,
                               const SignalingMechanism& sigma) {
  if (sigma.memory != 0)
    throw MppError("split requires a memory-0 mechanism");
  const ObedienceReport rep =
      check_persuasive(inst, sigma, InfoModel::no_history());
  if (!rep.persuasive)
    throw NotPersuasiveError("split requires a persuasive mechanism: " +
                             rep.worst_context);
  const InvariantDistribution inv = sender_preferred_invariant(inst, sigma, 1);
  const std::vector<double> pairs = inv.pair_marginal();

  SplitMechanism split;
  split.weights.assign(inst.n_actions, 0.0);
  split.posteriors.assign(inst.n_actions,
                          std::vector<double>(inst.n_states, 0.0));
  for (int a = 0; a < inst.n_actions; ++a) {
    for (int w = 0; w < inst.n_states; ++w)
      split.weights[a] += pairs[inst.pair_index(w, a)];
    if (split.weights[a] > kMassTol) {
      split.support.push_back(a);
      for (int w = 0; w < inst.n_states; ++w)
        split.posteriors[a][w] =
            pairs[inst.pair_index(w, a)] / split.weights[a];
    } else {
      // Unused signal: any obedient belief will do. Prefer a state where
      // the action is receiver-optimal; fall back to uniform.
      int pick = -1;
      for (int w = 0; w < inst.n_states && pick < 0; ++w)
        if (receiver_best_action(inst, w) == a) pick = w;
      if (pick >= 0)
        split.posteriors[a][pick] = 1.0;
      else
        for (int w = 0; w < inst.n_states; ++w)
          split.posteriors[a][w] = 1.0 / inst.n_states;
    }
  }
  return split;
}

SignalingMechanism merge_beliefs(
    const MppInstance& inst, const std::vector<double>& weights,
    const std::vector<std::vector<double>>& posteriors) {
  const int nw = inst.n_states, na = inst.n_actions;
  if (static_cast<int>(weights.size()) != na ||
      static_cast<int>(posteriors.size()) != na)
    throw MppError("merge: one weight and one posterior per action");

  std::vector<double> pi(nw, 0.0);
  double wsum = 0.0;
  for (int a = 0; a < na; ++a) {
    wsum += weights[a];
    for (int w = 0; w < nw; ++w) pi[w] += weights[a] * posteriors[a][w];
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw MppError("merge: weights must sum to one");

  // Stationarity of the implied state marginal under the implied play.
  for (int w2 = 0; w2 < nw; ++w2) {
    double flow = 0.0;
    for (int a = 0; a < na; ++a)
      for (int w = 0; w < nw; ++w)
        flow += weights[a] * posteriors[a][w] * inst.p(w, a, w2);
    if (std::abs(flow - pi[w2]) > 1e-8) {
      std::ostringstream os;
      os << "implied marginal not stationary at state " << w2 << " (flow "
         << flow << " vs mass " << pi[w2] << ")";
      throw StationarityViolatedError(os.str());
    }
  }

  SignalingMechanism sigma(0, nw, na);
  for (int w = 0; w < nw; ++w) {
    if (pi[w] > kMassTol) {
      for (int a = 0; a < na; ++a)
        sigma.prob(0, w, a) = weights[a] * posteriors[a][w] / pi[w];
    } else {
      sigma.prob(0, w, receiver_best_action(inst, w)) = 1.0;
    }
  }

  // The realized posterior after each recommendation must rebuild the
  // stated beliefs (guards against a non-unichain implied chain whose
  // realized invariant is not the stated marginal).
  const InvariantDistribution inv = sender_preferred_invariant(inst, sigma, 1);
  const std::vector<double> pairs = inv.pair_marginal();
  for (int a = 0; a < na; ++a) {
    if (weights[a] <= kMassTol) continue;
    double mass = 0.0;
    for (int w = 0; w < nw; ++w) mass += pairs[inst.pair_index(w, a)];
    for (int w = 0; w < nw; ++w) {
      const double realized = mass > kMassTol
                                  ? pairs[inst.pair_index(w, a)] / mass
                                  : posteriors[a][w];
      if (std::abs(realized - posteriors[a][w]) > 1e-8)
        throw StationarityViolatedError(
            "realized posterior deviates from the stated belief");
    }
  }
  return sigma;
}

RegularityParams regularity_params(const MppInstance& inst,
                                   const SplitMechanism& split) {
  const int nw = inst.n_states, na = inst.n_actions;
  RegularityParams reg;
  reg.d_a.assign(na, 0.0);
  reg.eta.assign(na, std::vector<double>(nw, 0.0));
  reg.d_min = 1.0;

  for (int a : split.support) {
    // A recommended action that is utility-identical to another action
    // admits no strictly obedient belief at all.
    for (int a2 = 0; a2 < na; ++a2) {
      if (a2 == a) continue;
      double scale = 0.0;
      for (int w = 0; w < nw; ++w)
        scale = std::max(scale, std::abs(inst.du(w, a, a2)));
      if (scale <= kMassTol) {
        std::ostringstream os;
        os << "recommended action " << a << " is utility-identical to "
           << a2;
        throw RegularityError(os.str());
      }
    }

    // Variables: eta(0..nw-1), then the margin d.
    LinearProgram lp(static_cast<size_t>(nw) + 1);
    lp.objective[nw] = 1.0;
    lp.add_eq([&] {
      std::vector<double> row(lp.n_vars, 0.0);
      for (int w = 0; w < nw; ++w) row[w] = 1.0;
      return row;
    }(), 1.0);
    for (int a2 = 0; a2 < na; ++a2) {
      if (a2 == a) continue;
      double scale = 0.0;
      for (int w = 0; w < nw; ++w)
        scale = std::max(scale, std::abs(inst.du(w, a, a2)));
      std::vector<double> row(lp.n_vars, 0.0);
      for (int w = 0; w < nw; ++w) row[w] = inst.du(w, a, a2);
      row[nw] = -scale;
      lp.add_ineq(std::move(row), 0.0);
    }

    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal || sol.value <= kMassTol) {
      std::ostringstream os;
      os << "no strictly obedient belief for recommended action " << a;
      throw RegularityError(os.str());
    }
    reg.d_a[a] = sol.value;
    for (int w = 0; w < nw; ++w) reg.eta[a][w] = sol.primal[w];
    reg.d_min = std::min(reg.d_min, reg.d_a[a]);
  }
  return reg;
}

PerturbationPotential perturbation_lp(const MppInstance& inst,
                                      const SplitMechanism& split,
                                      const RegularityParams& reg) {
  const int nw = inst.n_states;

  // Receiver-optimal default play f and its chain P_f.
  DenseChain pf;
  pf.n = nw;
  pf.probs.assign(static_cast<size_t>(nw) * nw, 0.0);
  for (int w = 0; w < nw; ++w) {
    const int a = receiver_best_action(inst, w);
    for (int w2 = 0; w2 < nw; ++w2) pf.at(w, w2) = inst.p(w, a, w2);
  }
  const std::vector<double> nu = stationary_distribution(pf);

  PerturbationPotential pot;
  pot.tau = 0.0;
  for (int w = 0; w < nw; ++w)
    pot.tau = std::max(pot.tau, 1.0 / std::max(nu[w], kMassTol));

  Eigen::MatrixXd M(nw, nw);
  for (int i = 0; i < nw; ++i)
    for (int j = 0; j < nw; ++j)
      M(i, j) = (i == j ? 1.0 : 0.0) - pf.at(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  pot.s_f = 0.0;
  for (int i = nw - 1; i >= 0; --i) {
    if (svd.singularValues()(i) > 1e-10) {
      pot.s_f = svd.singularValues()(i);
      break;
    }
  }
  if (pot.s_f <= 0.0)
    throw NumericalFailureError("I - P_f has no positive singular value");

  // Right-hand side r' = sum_a w_a eta_a' (P_a - I).
  std::vector<double> r(nw, 0.0);
  for (int a : split.support)
    for (int w = 0; w < nw; ++w) {
      const double c = split.weights[a] * reg.eta[a][w];
      for (int w2 = 0; w2 < nw; ++w2) r[w2] += c * inst.p(w, a, w2);
      r[w] -= c;
    }

  // Minimize ||y||_1 over y >= 0 with y'(I - P_f) = r'.
  LinearProgram lp(static_cast<size_t>(nw));
  for (int w = 0; w < nw; ++w) lp.objective[w] = -1.0;
  for (int w2 = 0; w2 < nw; ++w2) {
    std::vector<double> row(lp.n_vars, 0.0);
    for (int w = 0; w < nw; ++w)
      row[w] = (w == w2 ? 1.0 : 0.0) - pf.at(w, w2);
    lp.add_eq(std::move(row), r[w2]);
  }
  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailureError("perturbation potential LP not optimal");
  pot.y = sol.primal;
  pot.y_norm1 = 0.0;
  for (double v : pot.y) pot.y_norm1 += v;

  const double bound =
      2.0 * (1.0 + pot.tau) * std::sqrt(static_cast<double>(nw)) / pot.s_f;
  if (pot.y_norm1 > bound + 1e-6) {
    std::ostringstream os;
    os << "potential norm " << pot.y_norm1 << " exceeds its bound " << bound;
    throw WitnessVerificationError(os.str());
  }
  return pot;
}

RobustMechanism build_robust_mechanism(const MppInstance& inst,
                                       const SignalingMechanism& sigma,
                                       double epsilon) {
  const int nw = inst.n_states;
  const ObedienceReport rep =
      check_persuasive(inst, sigma, InfoModel::no_history());
  if (!rep.persuasive)
    throw NotPersuasiveError("input mechanism fails the obedience check: " +
                             rep.worst_context);

  const SplitMechanism split = split_mechanism(inst, sigma);
  const RegularityParams reg = regularity_params(inst, split);
  const PerturbationPotential pot = perturbation_lp(inst, split, reg);

  double w_min = 1.0;
  for (int a : split.support) w_min = std::min(w_min, split.weights[a]);
  const double d = reg.d_min;
  const double root_n = std::sqrt(static_cast<double>(nw));
  const double threshold =
      pot.s_f * w_min * d /
      (2.0 * (pot.s_f + 2.0 * (1.0 + pot.tau) * root_n));
  if (epsilon >= threshold) {
    std::ostringstream os;
    os << "radius " << epsilon << " not below admissible threshold "
       << threshold;
    throw EpsilonTooLargeError(os.str(), threshold);
  }

  RobustMechanism rm;
  rm.epsilon = epsilon;
  rm.d_min = d;
  rm.delta = 2.0 * epsilon / (w_min * d - 2.0 * epsilon * pot.y_norm1);
  const double delta = rm.delta;
  const double rho = delta * pot.y_norm1 / (1.0 + delta * pot.y_norm1);

  // One signal per recommended action, then one reset signal per state.
  for (int a : split.support) {
    rm.signal_weights.push_back((1.0 - rho) * split.weights[a]);
    std::vector<double> xi(nw);
    for (int w = 0; w < nw; ++w)
      xi[w] = (1.0 - delta) * split.posteriors[a][w] + delta * reg.eta[a][w];
    rm.signal_posteriors.push_back(std::move(xi));
    rm.signal_action.push_back(a);
  }
  for (int w = 0; w < nw; ++w) {
    rm.signal_weights.push_back(delta * pot.y[w] /
                                (1.0 + delta * pot.y_norm1));
    std::vector<double> e(nw, 0.0);
    e[w] = 1.0;
    rm.signal_posteriors.push_back(std::move(e));
    rm.signal_action.push_back(receiver_best_action(inst, w));
  }

  // Action-level view: collapse signals sharing an action.
  const std::vector<double> pi_hat = stationary_design(rm, nw);
  rm.collapsed = SignalingMechanism(0, nw, inst.n_actions);
  for (int w = 0; w < nw; ++w) {
    if (pi_hat[w] > kMassTol) {
      for (size_t s = 0; s < rm.signal_weights.size(); ++s)
        rm.collapsed.prob(0, w, rm.signal_action[s]) +=
            rm.signal_weights[s] * rm.signal_posteriors[s][w] / pi_hat[w];
    } else {
      rm.collapsed.prob(0, w, receiver_best_action(inst, w)) = 1.0;
    }
  }

  // The potential is built exactly so that pi_hat is invariant; verify.
  for (int w2 = 0; w2 < nw; ++w2) {
    double flow = 0.0;
    for (size_t s = 0; s < rm.signal_weights.size(); ++s)
      for (int w = 0; w < nw; ++w)
        flow += rm.signal_weights[s] * rm.signal_posteriors[s][w] *
                inst.p(w, rm.signal_action[s], w2);
    if (std::abs(flow - pi_hat[w2]) > 1e-8)
      throw WitnessVerificationError(
          "constructed invariant fails stationarity");
  }

  const double opt = long_run_reward(inst, sigma);
  rm.value_bound = (1.0 - delta) / (1.0 + delta * pot.y_norm1) * opt;
  rm.value_bound_coarse =
      (1.0 - (2.0 * epsilon / (w_min * d)) *
                 (1.0 + 2.0 * (1.0 + pot.tau) * root_n / pot.s_f)) *
      opt;
  rm.payoff = 0.0;
  for (size_t s = 0; s < rm.signal_weights.size(); ++s)
    for (int w = 0; w < nw; ++w)
      rm.payoff += rm.signal_weights[s] * rm.signal_posteriors[s][w] *
                   inst.v(w, rm.signal_action[s]);
  return rm;
}

RobustMechanism build_robust_mechanism(const MppInstance& inst,
                                       double epsilon) {
  return build_robust_mechanism(
      inst, solve_benchmark(inst, InfoModel::no_history()).mechanism,
      epsilon);
}

RobustVerification verify_robust(const MppInstance& inst,
                                 const RobustMechanism& rm, int samples,
                                 std::uint64_t seed) {
  const int nw = inst.n_states, na = inst.n_actions;
  const size_t ns = rm.signal_weights.size();
  const std::vector<double> pi_hat = stationary_design(rm, nw);
  const IncrementalUtility du(inst);

  RobustVerification out;
  out.samples = samples;

  // Closed-form robustness condition: posterior sensitivity times the
  // radius stays within the margin the construction budgeted for.
  double sensitivity = 0.0;
  // Reset signals reveal the state exactly, so only the action signals
  // can have their posteriors moved by a prior perturbation.
  for (size_t s = 0; s + static_cast<size_t>(nw) < ns; ++s) {
    if (rm.signal_weights[s] <= kMassTol) continue;
    for (int w = 0; w < nw; ++w)
      if (rm.signal_posteriors[s][w] > kMassTol)
        sensitivity = std::max(
            sensitivity, rm.signal_posteriors[s][w] / std::max(pi_hat[w],
                                                               kMassTol));
  }
  out.analytic_ok =
      2.0 * sensitivity * rm.epsilon <= rm.delta * rm.d_min + 1e-10;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  out.worst_margin = 0.0;
  bool drift_ok = true;
  for (int it = 0; it < samples; ++it) {
    // Zero-sum direction, l1-normalized; half the draws sit on the
    // boundary of the radius ball.
    std::vector<double> delta(nw);
    double mean = 0.0;
    for (int w = 0; w < nw; ++w) {
      delta[w] = gauss(rng);
      mean += delta[w];
    }
    mean /= nw;
    double norm = 0.0;
    for (int w = 0; w < nw; ++w) {
      delta[w] -= mean;
      norm += std::abs(delta[w]);
    }
    if (norm <= kMassTol) continue;
    double radius = (it % 2 == 0) ? rm.epsilon : rm.epsilon * unif(rng);
    for (int w = 0; w < nw; ++w) delta[w] *= radius / norm;
    // Shrink toward pi_hat if the prior would leave the simplex.
    double scale = 1.0;
    for (int w = 0; w < nw; ++w)
      if (delta[w] < 0.0)
        scale = std::min(scale, pi_hat[w] / -delta[w]);
    std::vector<double> prior(nw);
    double prior_dist = 0.0;
    for (int w = 0; w < nw; ++w) {
      prior[w] = pi_hat[w] + scale * delta[w];
      prior_dist += std::abs(scale * delta[w]);
    }

    for (size_t s = 0; s < ns; ++s) {
      if (rm.signal_weights[s] <= kMassTol) continue;
      // Perturbed posterior via exact Bayes updating of the prior.
      std::vector<double> post(nw, 0.0);
      double mass = 0.0;
      for (int w = 0; w < nw; ++w) {
        if (pi_hat[w] <= kMassTol) continue;
        const double like =
            rm.signal_weights[s] * rm.signal_posteriors[s][w] / pi_hat[w];
        post[w] = prior[w] * like;
        mass += post[w];
      }
      if (mass <= kMassTol) continue;
      double drift = 0.0, peak = 0.0;
      for (int w = 0; w < nw; ++w) {
        post[w] /= mass;
        drift += std::abs(post[w] - rm.signal_posteriors[s][w]);
        if (rm.signal_posteriors[s][w] > kMassTol)
          peak = std::max(peak, rm.signal_posteriors[s][w] /
                                    std::max(pi_hat[w], kMassTol));
      }
      if (s + static_cast<size_t>(nw) < ns) {
        // Budgeted drift plus the Bayes-continuity inequality itself.
        if (drift > rm.delta * rm.d_min + 1e-9) drift_ok = false;
        if (drift > 2.0 * peak * prior_dist + 1e-9) drift_ok = false;
      }
      const int a = rm.signal_action[s];
      for (int a2 = 0; a2 < na; ++a2) {
        if (a2 == a) continue;
        double slack = 0.0;
        for (int w = 0; w < nw; ++w) slack += post[w] * du.at(w, a, a2);
        out.worst_margin = std::min(out.worst_margin, slack);
      }
    }
  }
  out.sampled_ok = drift_ok && out.worst_margin >= -1e-9;
  return out;
}

PersuasiveLag persuasive_lag(const MppInstance& inst,
                             const RobustMechanism& rm, double eps) {
  const DenseChain chain = induced_chain(inst, rm.collapsed);
  const std::vector<double> pi = stationary_distribution(chain);
  const int n = inst.n_states;

  PersuasiveLag out;
  // March all rows p(.|x) forward together until every one is close.
  std::vector<std::vector<double>> rows(inst.n_pairs(),
                                        std::vector<double>(n));
  for (int x = 0; x < inst.n_pairs(); ++x)
    for (int w = 0; w < n; ++w) rows[x][w] = inst.p_from_pair(x, w);
  constexpr int kSearchCap = 1000000;
  std::vector<double> next(n);
  for (int l = 0; l <= kSearchCap; ++l) {
    double worst = 0.0;
    for (const auto& row : rows) {
      double dist = 0.0;
      for (int w = 0; w < n; ++w) dist += std::abs(row[w] - pi[w]);
      worst = std::max(worst, dist);
    }
    if (worst <= eps) {
      out.exact = l;
      break;
    }
    for (auto& row : rows) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        if (row[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) next[j] += row[i] * chain.at(i, j);
      }
      row = next;
    }
  }
  if (out.exact < 0)
    throw MppError("mixing lag search exceeded its cap");
  out.spectral = lag_bound(spectral_quantities(inst, rm.collapsed), eps);

  // Internal consistency: the spectral bound dominates on real spectra,
  // and the mechanism is obedient at its own mixing lag (when checkable).
  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = chain.at(i, j);
  bool real_spectrum = true;
  const auto ev = Eigen::EigenSolver<Eigen::MatrixXd>(T, false).eigenvalues();
  for (int i = 0; i < n; ++i)
    if (std::abs(ev(i).imag()) > 1e-9) real_spectrum = false;
  if (real_spectrum && out.exact > out.spectral)
    throw WitnessVerificationError(
        "exact mixing lag exceeds the spectral bound");
  try {
    const ObedienceReport rep = check_persuasive(
        inst, rm.collapsed, InfoModel::with_lag(out.exact));
    if (!rep.persuasive)
      throw WitnessVerificationError(
          "construction fails obedience at its own mixing lag: " +
          rep.worst_context);
  } catch (const CapExceededError&) {
    // Mixing lag beyond the slice cap; the exact oracle cannot run.
  }
  return out;
}

}  // namespace mpp
