// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mpp/errors.hpp"
#include "mpp/lp.hpp"

namespace mpp {
namespace {

// Tarjan SCC, iterative. Returns component id per node.
int strongly_connected_components(const std::vector<std::vector<int>>& adj,
                                  std::vector<int>* comp) {
  const int n = static_cast<int>(adj.size());
  comp->assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack, call_node, call_edge;
  std::vector<bool> on_stack(n, false);
  int next_index = 0, n_comp = 0;

  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call_node = {root};
    call_edge = {0};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call_node.empty()) {
      const int v = call_node.back();
      if (call_edge.back() < static_cast<int>(adj[v].size())) {
        const int w = adj[v][call_edge.back()++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          call_node.push_back(w);
          call_edge.push_back(0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        if (low[v] == index[v]) {
          for (;;) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            (*comp)[w] = n_comp;
            if (w == v) break;
          }
          ++n_comp;
        }
        call_node.pop_back();
        call_edge.pop_back();
        if (!call_node.empty()) {
          const int parent = call_node.back();
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
  return n_comp;
}

constexpr double kEdgeTol = 1e-12;

std::vector<double> power_iterate(const DenseChain& chain,
                                  std::vector<double> x, int max_iters,
                                  double tol) {
  const std::int64_t n = chain.n;
  std::vector<double> next(static_cast<size_t>(n));
  for (int it = 0; it < max_iters; ++it) {
    // Lazy step (I + P) / 2 to damp periodic components.
    for (std::int64_t j = 0; j < n; ++j) next[j] = 0.5 * x[j];
    for (std::int64_t i = 0; i < n; ++i) {
      const double xi = 0.5 * x[i];
      if (xi == 0.0) continue;
      for (std::int64_t j = 0; j < n; ++j) next[j] += xi * chain.at(i, j);
    }
    double diff = 0.0;
    for (std::int64_t j = 0; j < n; ++j) diff += std::abs(next[j] - x[j]);
    x.swap(next);
    if (diff < tol) break;
  }
  return x;
}

}  // namespace

DenseChain induced_slice_chain(const MppInstance& inst,
                               const SignalingMechanism& sigma, int L) {
  const int k = sigma.memory;
  if (L < std::max(k, 1))
    throw MppError("slice length below mechanism window");
  const SliceSpace sp(inst.n_pairs(), L);
  DenseChain chain;
  chain.n = sp.size;
  chain.probs.assign(static_cast<size_t>(sp.size) * sp.size, 0.0);
  for (std::int64_t h = 0; h < sp.size; ++h) {
    const int x = sp.last(h);
    const std::int64_t window = sp.suffix(h, k);
    for (int w2 = 0; w2 < inst.n_states; ++w2) {
      const double pw = inst.p_from_pair(x, w2);
      if (pw <= 0.0) continue;
      for (int a2 = 0; a2 < inst.n_actions; ++a2) {
        const double ps = sigma.prob(window, w2, a2);
        if (ps <= 0.0) continue;
        const std::int64_t h2 = sp.append(h, inst.pair_index(w2, a2));
        chain.at(h, h2) += pw * ps;
      }
    }
  }
  return chain;
}

DenseChain induced_chain(const MppInstance& inst,
                         const SignalingMechanism& sigma) {
  if (sigma.memory != 0)
    throw MppError("state chain requires a memory-0 mechanism");
  DenseChain chain;
  chain.n = inst.n_states;
  chain.probs.assign(static_cast<size_t>(inst.n_states) * inst.n_states, 0.0);
  for (int w = 0; w < inst.n_states; ++w)
    for (int a = 0; a < inst.n_actions; ++a) {
      const double ps = sigma.prob(0, w, a);
      if (ps <= 0.0) continue;
      for (int w2 = 0; w2 < inst.n_states; ++w2)
        chain.at(w, w2) += ps * inst.p(w, a, w2);
    }
  return chain;
}

bool check_unichain(const DenseChain& chain) {
  const int n = static_cast<int>(chain.n);
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (chain.at(i, j) > kEdgeTol) adj[i].push_back(j);
  std::vector<int> comp;
  const int n_comp = strongly_connected_components(adj, &comp);
  // A class is closed iff no edge leaves its component.
  std::vector<bool> closed(n_comp, true);
  for (int i = 0; i < n; ++i)
    for (int j : adj[i])
      if (comp[j] != comp[i]) closed[comp[i]] = false;
  int n_closed = 0;
  for (bool c : closed) n_closed += c ? 1 : 0;
  return n_closed == 1;
}

std::vector<double> stationary_distribution(const DenseChain& chain) {
  if (!check_unichain(chain))
    throw NonUnichainError("chain has multiple recurrent classes");
  const std::int64_t n = chain.n;

  // Direct solve of pi (I - P) = 0 with the last column replaced by
  // the normalization constraint.
  Eigen::MatrixXd A(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      A(j, i) = (i == j ? 1.0 : 0.0) - chain.at(i, j);
  for (std::int64_t i = 0; i < n; ++i) A(n - 1, i) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = A.colPivHouseholderQr().solve(b);

  std::vector<double> out(static_cast<size_t>(n));
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = std::max(0.0, pi(i));
    sum += out[i];
  }
  for (double& p : out) p /= sum;

  // Cross-check with (lazy) power iteration from the direct solution.
  std::vector<double> check = power_iterate(chain, out, 2000, 1e-13);
  double diff = 0.0;
  for (std::int64_t i = 0; i < n; ++i) diff += std::abs(check[i] - out[i]);
  if (diff > 1e-7)
    throw NumericalFailureError("stationary distribution cross-check failed");
  return out;
}

InvariantDistribution sender_preferred_invariant(
    const MppInstance& inst, const SignalingMechanism& sigma, int L) {
  const DenseChain chain = induced_slice_chain(inst, sigma, L);
  InvariantDistribution inv;
  inv.slice_length = L;
  inv.n_states = inst.n_states;
  inv.n_actions = inst.n_actions;

  if (check_unichain(chain)) {
    // Unique invariant; nothing to optimize over.
    inv.probs = stationary_distribution(chain);
    return inv;
  }

  // Several invariant distributions: pick the sender-preferred one by LP.
  const std::int64_t n = chain.n;
  const SliceSpace sp(inst.n_pairs(), L);
  LinearProgram lp(static_cast<size_t>(n));
  for (std::int64_t h = 0; h < n; ++h)
    lp.objective[h] = inst.v(inst.pair_state(sp.last(h)),
                             inst.pair_action(sp.last(h)));
  for (std::int64_t h2 = 0; h2 < n; ++h2) {
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    for (std::int64_t h = 0; h < n; ++h) row[h] = chain.at(h, h2);
    row[h2] -= 1.0;
    lp.add_eq(std::move(row), 0.0);
  }
  lp.add_eq(std::vector<double>(static_cast<size_t>(n), 1.0), 1.0);
  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalFailureError("invariant-selection LP not optimal");
  inv.probs = sol.primal;
  return inv;
}

double long_run_reward(const MppInstance& inst,
                       const SignalingMechanism& sigma) {
  const int L = std::max(sigma.memory, 1);
  const InvariantDistribution inv = sender_preferred_invariant(inst, sigma, L);
  const std::vector<double> pair_freq = inv.pair_marginal();
  double reward = 0.0;
  for (int x = 0; x < inst.n_pairs(); ++x)
    reward += pair_freq[x] * inst.v(inst.pair_state(x), inst.pair_action(x));
  return reward;
}

double lag_distance(const MppInstance& inst, const SignalingMechanism& sigma,
                    int lag) {
  const DenseChain chain = induced_chain(inst, sigma);
  const std::vector<double> pi = stationary_distribution(chain);
  const int n = inst.n_states;
  double worst = 0.0;
  for (int x = 0; x < inst.n_pairs(); ++x) {
    std::vector<double> row(n), next(n);
    for (int w = 0; w < n; ++w) row[w] = inst.p_from_pair(x, w);
    for (int step = 0; step < lag; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        if (row[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) next[j] += row[i] * chain.at(i, j);
      }
      row.swap(next);
    }
    double dist = 0.0;
    for (int w = 0; w < n; ++w) dist += std::abs(row[w] - pi[w]);
    worst = std::max(worst, dist);
  }
  return worst;
}

SpectralQuantities spectral_quantities(const MppInstance& inst,
                                       const SignalingMechanism& sigma) {
  const DenseChain chain = induced_chain(inst, sigma);
  const std::vector<double> pi = stationary_distribution(chain);
  const int n = inst.n_states;

  Eigen::MatrixXd T(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(i, j) = chain.at(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(T, /*computeEigenvectors=*/false);
  const auto& ev = es.eigenvalues();

  // Drop the single eigenvalue closest to 1; the gap is against the rest.
  int perron = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(ev(i) - std::complex<double>(1.0, 0.0)) <
        std::abs(ev(perron) - std::complex<double>(1.0, 0.0)))
      perron = i;
  double second = 0.0;
  for (int i = 0; i < n; ++i)
    if (i != perron) second = std::max(second, std::abs(ev(i)));

  SpectralQuantities sq;
  sq.gap = 1.0 - second;
  sq.pi_min = *std::min_element(pi.begin(), pi.end());
  if (sq.gap <= 1e-12)
    throw DegenerateGapError("absolute spectral gap numerically zero");
  return sq;
}

int lag_bound(const SpectralQuantities& sq, double eps) {
  const double raw = std::log(2.0 / (eps * sq.pi_min)) / sq.gap;
  return static_cast<int>(std::ceil(std::max(0.0, raw)));
}

}  // namespace mpp
