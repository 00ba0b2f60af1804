// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/benchmark.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/lp.hpp"

namespace mpp {
namespace {

constexpr double kMassTol = 1e-12;

// Occupancy LP over (w, a): obedience aggregated over everything the
// receiver cannot see, flow balance, normalization.
BenchmarkResult solve_no_history(const MppInstance& inst) {
  const int nw = inst.n_states, na = inst.n_actions;
  const IncrementalUtility du(inst);
  auto idx = [&](int w, int a) { return static_cast<size_t>(w) * na + a; };

  LinearProgram lp(static_cast<size_t>(nw) * na);
  for (int w = 0; w < nw; ++w)
    for (int a = 0; a < na; ++a) lp.objective[idx(w, a)] = inst.v(w, a);

  for (int a = 0; a < na; ++a)
    for (int a2 = 0; a2 < na; ++a2) {
      if (a2 == a) continue;
      std::vector<double> row(lp.n_vars, 0.0);
      for (int w = 0; w < nw; ++w) row[idx(w, a)] = du.at(w, a, a2);
      lp.add_ineq(std::move(row), 0.0);
    }
  for (int w2 = 0; w2 < nw; ++w2) {
    std::vector<double> row(lp.n_vars, 0.0);
    for (int w = 0; w < nw; ++w)
      for (int a = 0; a < na; ++a) row[idx(w, a)] += inst.p(w, a, w2);
    for (int a = 0; a < na; ++a) row[idx(w2, a)] -= 1.0;
    lp.add_eq(std::move(row), 0.0);
  }
  lp.add_eq(std::vector<double>(lp.n_vars, 1.0), 1.0);

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailureError("no-history benchmark LP not optimal");

  BenchmarkResult res;
  res.value = sol.value;
  res.occupancy = sol.primal;
  res.mechanism = SignalingMechanism(0, nw, na);
  for (int w = 0; w < nw; ++w) {
    double mass = 0.0;
    for (int a = 0; a < na; ++a) mass += sol.primal[idx(w, a)];
    if (mass > kMassTol) {
      for (int a = 0; a < na; ++a)
        res.mechanism.prob(0, w, a) = sol.primal[idx(w, a)] / mass;
    } else {
      res.mechanism.prob(0, w, receiver_best_action(inst, w)) = 1.0;
    }
  }
  return res;
}

// Occupancy LP over (x, w, a) where x is the previous (state, action)
// pair; the receiver conditions on x, so obedience holds per x.
BenchmarkResult solve_full_history(const MppInstance& inst) {
  const int nw = inst.n_states, na = inst.n_actions, nx = inst.n_pairs();
  const IncrementalUtility du(inst);
  auto idx = [&](int x, int w, int a) {
    return (static_cast<size_t>(x) * nw + w) * na + a;
  };

  LinearProgram lp(static_cast<size_t>(nx) * nw * na);
  for (int x = 0; x < nx; ++x)
    for (int w = 0; w < nw; ++w)
      for (int a = 0; a < na; ++a) lp.objective[idx(x, w, a)] = inst.v(w, a);

  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < na; ++a)
      for (int a2 = 0; a2 < na; ++a2) {
        if (a2 == a) continue;
        std::vector<double> row(lp.n_vars, 0.0);
        for (int w = 0; w < nw; ++w) row[idx(x, w, a)] = du.at(w, a, a2);
        lp.add_ineq(std::move(row), 0.0);
      }
  // Flow: the next lifted state is ((w, a), w') with probability p(w'|w,a).
  for (int x2 = 0; x2 < nx; ++x2) {
    const int wx = inst.pair_state(x2), ax = inst.pair_action(x2);
    for (int w2 = 0; w2 < nw; ++w2) {
      std::vector<double> row(lp.n_vars, 0.0);
      for (int x = 0; x < nx; ++x)
        row[idx(x, wx, ax)] += inst.p(wx, ax, w2);
      for (int a = 0; a < na; ++a) row[idx(x2, w2, a)] -= 1.0;
      lp.add_eq(std::move(row), 0.0);
    }
  }
  lp.add_eq(std::vector<double>(lp.n_vars, 1.0), 1.0);

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailureError("full-history benchmark LP not optimal");

  BenchmarkResult res;
  res.value = sol.value;
  res.occupancy = sol.primal;
  res.mechanism = SignalingMechanism(1, nw, na);
  for (int x = 0; x < nx; ++x)
    for (int w = 0; w < nw; ++w) {
      double mass = 0.0;
      for (int a = 0; a < na; ++a) mass += sol.primal[idx(x, w, a)];
      if (mass > kMassTol) {
        for (int a = 0; a < na; ++a)
          res.mechanism.prob(x, w, a) = sol.primal[idx(x, w, a)] / mass;
      } else {
        res.mechanism.prob(x, w, receiver_best_action(inst, w)) = 1.0;
      }
    }
  return res;
}

}  // namespace

BenchmarkResult solve_benchmark(const MppInstance& inst,
                                const InfoModel& model) {
  switch (model.kind) {
    case InfoModel::NoHistory:
      return solve_no_history(inst);
    case InfoModel::FullHistory:
      return solve_full_history(inst);
    default:
      throw MppError(
          "partial-history models have no exact LP benchmark; "
          "use solve_partial");
  }
}

EqualityCheck check_equality_condition(const MppInstance& inst) {
  const int nw = inst.n_states, na = inst.n_actions, nx = inst.n_pairs();
  const BenchmarkResult no = solve_benchmark(inst, InfoModel::no_history());

  EqualityCheck check;
  check.value_no = no.value;

  std::vector<int> support;
  std::vector<std::vector<double>> beliefs;  // per supported action
  for (int a = 0; a < na; ++a) {
    double mass = 0.0;
    for (int w = 0; w < nw; ++w)
      mass += no.occupancy[static_cast<size_t>(w) * na + a];
    if (mass <= kMassTol) continue;
    support.push_back(a);
    std::vector<double> mu(nw);
    for (int w = 0; w < nw; ++w)
      mu[w] = no.occupancy[static_cast<size_t>(w) * na + a] / mass;
    beliefs.push_back(std::move(mu));
  }

  // Linear independence of the distinct optimal beliefs.
  std::vector<std::vector<double>> distinct;
  for (const auto& mu : beliefs) {
    bool dup = false;
    for (const auto& other : distinct) {
      double dist = 0.0;
      for (int w = 0; w < nw; ++w) dist += std::abs(mu[w] - other[w]);
      if (dist <= 1e-9) dup = true;
    }
    if (!dup) distinct.push_back(mu);
  }
  Eigen::MatrixXd B(nw, static_cast<int>(distinct.size()));
  for (size_t c = 0; c < distinct.size(); ++c)
    for (int w = 0; w < nw; ++w) B(w, static_cast<int>(c)) = distinct[c][w];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-9) ++rank;
  if (rank < static_cast<int>(distinct.size())) {
    check.failing_clause = "optimal beliefs are linearly dependent";
    return check;
  }

  // Every one-step belief must decompose over the optimal beliefs.
  std::vector<std::vector<double>> lambda(nx,
                                          std::vector<double>(support.size()));
  for (int x = 0; x < nx; ++x) {
    LinearProgram lp(support.size());
    for (int w = 0; w < nw; ++w) {
      std::vector<double> row(lp.n_vars);
      for (size_t s = 0; s < support.size(); ++s) row[s] = beliefs[s][w];
      lp.add_eq(std::move(row), inst.p_from_pair(x, w));
    }
    lp.add_eq(std::vector<double>(lp.n_vars, 1.0), 1.0);
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
      std::ostringstream os;
      os << "one-step belief after pair (" << inst.pair_state(x) << ","
         << inst.pair_action(x) << ") lies outside the belief hull";
      check.failing_clause = os.str();
      return check;
    }
    lambda[x] = sol.primal;
  }

  // Both clauses hold: build and verify the memory-1 witness.
  check.witness = SignalingMechanism(1, nw, na);
  for (int x = 0; x < nx; ++x)
    for (int w = 0; w < nw; ++w) {
      const double pw = inst.p_from_pair(x, w);
      if (pw > kMassTol) {
        double sum = 0.0;
        for (size_t s = 0; s < support.size(); ++s) {
          check.witness.prob(x, w, support[s]) =
              lambda[x][s] * beliefs[s][w] / pw;
          sum += check.witness.prob(x, w, support[s]);
        }
        // Absorb LP round-off so the row is exactly stochastic.
        if (sum > kMassTol)
          for (size_t s = 0; s < support.size(); ++s)
            check.witness.prob(x, w, support[s]) /= sum;
        else
          check.witness.prob(x, w, receiver_best_action(inst, w)) = 1.0;
      } else {
        check.witness.prob(x, w, receiver_best_action(inst, w)) = 1.0;
      }
    }

  const ObedienceReport rep =
      check_persuasive(inst, check.witness, InfoModel::full_history(), 1e-7);
  if (!rep.persuasive)
    throw WitnessVerificationError(
        "equality witness fails the full-history obedience check: " +
        rep.worst_context);
  check.witness_value = long_run_reward(inst, check.witness);
  if (std::abs(check.witness_value - no.value) > 1e-7)
    throw WitnessVerificationError(
        "equality witness does not match the no-history optimum");
  check.holds = true;
  return check;
}

}  // namespace mpp
