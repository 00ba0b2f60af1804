// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/partial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mpp/benchmark.hpp"
#include "mpp/chain.hpp"
#include "mpp/errors.hpp"
#include "mpp/lp.hpp"

namespace mpp {
namespace {

constexpr double kMassTol = 1e-12;

// One alternation round: freeze the invariant and the receiver's
// belief propagation at the current mechanism, then re-optimize the
// signaling table by LP (simplex rows + obedience rows; the flow
// coupling is deliberately left to the outer fixed-point loop).
bool sigma_step(const MppInstance& inst, const PartialOptions& opts,
                SignalingMechanism* sigma, double* lp_value) {
  const int k = sigma->memory;
  const int m = std::max(k, 1);
  const int nw = inst.n_states, na = inst.n_actions;
  const SliceSpace sp(inst.n_pairs(), m);
  const SliceSpace win(inst.n_pairs(), k);
  const IncrementalUtility du(inst);
  const std::int64_t n = sp.size;

  const DenseChain chain = induced_slice_chain(inst, *sigma, m);
  const InvariantDistribution inv = sender_preferred_invariant(inst, *sigma, m);

  auto var = [&](std::int64_t g, int w, int a) {
    return static_cast<size_t>((g * nw + w) * na + a);
  };
  LinearProgram lp(static_cast<size_t>(win.size) * nw * na);

  // Objective: expected sender reward at the frozen occupancy.
  for (std::int64_t h = 0; h < n; ++h) {
    if (inv.probs[h] <= kMassTol) continue;
    const int x = sp.last(h);
    const std::int64_t g = sp.suffix(h, k);
    for (int w = 0; w < nw; ++w) {
      const double c = inv.probs[h] * inst.p_from_pair(x, w);
      if (c <= 0.0) continue;
      for (int a = 0; a < na; ++a)
        lp.objective[var(g, w, a)] += c * inst.v(w, a);
    }
  }
  for (std::int64_t g = 0; g < win.size; ++g)
    for (int w = 0; w < nw; ++w) {
      std::vector<double> row(lp.n_vars, 0.0);
      for (int a = 0; a < na; ++a) row[var(g, w, a)] = 1.0;
      lp.add_eq(std::move(row), 1.0);
    }

  // Obedience per observed window g0, with the receiver's belief about
  // the current window obtained by pushing g0 through the frozen chain.
  std::vector<double> d(static_cast<size_t>(n)), next(static_cast<size_t>(n));
  for (std::int64_t g0 = 0; g0 < n; ++g0) {
    if (inv.probs[g0] <= kMassTol) continue;
    std::fill(d.begin(), d.end(), 0.0);
    d[g0] = 1.0;
    for (int step = 0; step < opts.lag; ++step) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::int64_t i = 0; i < n; ++i) {
        if (d[i] == 0.0) continue;
        for (std::int64_t j = 0; j < n; ++j) next[j] += d[i] * chain.at(i, j);
      }
      d.swap(next);
    }
    for (int a = 0; a < na; ++a)
      for (int a2 = 0; a2 < na; ++a2) {
        if (a2 == a) continue;
        std::vector<double> row(lp.n_vars, 0.0);
        bool nonzero = false;
        for (std::int64_t h = 0; h < n; ++h) {
          if (d[h] <= kMassTol) continue;
          const int x = sp.last(h);
          const std::int64_t g = sp.suffix(h, k);
          for (int w = 0; w < nw; ++w) {
            const double c = d[h] * inst.p_from_pair(x, w) * du.at(w, a, a2);
            if (c == 0.0) continue;
            row[var(g, w, a)] += c;
            nonzero = true;
          }
        }
        if (nonzero) lp.add_ineq(std::move(row), 0.0);
      }
  }

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal) return false;
  *lp_value = sol.value;
  for (std::int64_t g = 0; g < win.size; ++g)
    for (int w = 0; w < nw; ++w) {
      double mass = 0.0;
      for (int a = 0; a < na; ++a) mass += sol.primal[var(g, w, a)];
      for (int a = 0; a < na; ++a)
        sigma->prob(g, w, a) =
            mass > kMassTol ? sol.primal[var(g, w, a)] / mass
                            : (a == receiver_best_action(inst, w) ? 1.0 : 0.0);
    }
  return true;
}

// Run the alternation from *sigma, recording the best exactly verified
// iterate seen along the way (the surrogate LP value is only a guide).
void alternate(const MppInstance& inst, const PartialOptions& opts,
               const InfoModel& model, SignalingMechanism* sigma,
               double* best_value, SignalingMechanism* best_sigma,
               int* iters) {
  auto admit = [&] {
    try {
      const ObedienceReport rep =
          check_persuasive(inst, *sigma, model, opts.obedience_tol);
      if (rep.persuasive) {
        const double exact = long_run_reward(inst, *sigma);
        if (exact > *best_value) {
          *best_value = exact;
          *best_sigma = *sigma;
        }
      }
    } catch (const NonUnichainError&) {
      // Iterates may wander through reducible chains; skip those.
    }
  };

  double prev_value = -1.0;
  for (*iters = 0; *iters < opts.max_iters; ++*iters) {
    admit();
    double lp_value = 0.0;
    bool ok = false;
    try {
      ok = sigma_step(inst, opts, sigma, &lp_value);
    } catch (const NonUnichainError&) {
      ok = false;
    } catch (const NumericalFailureError&) {
      ok = false;
    }
    if (!ok) break;
    if (std::abs(lp_value - prev_value) < opts.value_tol) {
      ++*iters;
      break;
    }
    prev_value = lp_value;
  }
  admit();  // cover the final iterate
}

SignalingMechanism random_start(const MppInstance& inst, int memory,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> exp1(1.0);
  SignalingMechanism sigma(memory, inst.n_states, inst.n_actions);
  for (std::int64_t h = 0; h < sigma.n_windows(); ++h)
    for (int w = 0; w < inst.n_states; ++w) {
      double sum = 0.0;
      for (int a = 0; a < inst.n_actions; ++a) {
        sigma.prob(h, w, a) = exp1(rng);
        sum += sigma.prob(h, w, a);
      }
      for (int a = 0; a < inst.n_actions; ++a) sigma.prob(h, w, a) /= sum;
    }
  return sigma;
}

// Collapse the full-history optimum to memory k by averaging the
// recommendation table over the previous pair under its occupancy.
// Invariant by lazy power iteration, warm-started from a previous
// estimate; cheap enough to sit inside the polish loop. Falls back to
// the exact dense solve when iteration stalls.
std::vector<double> invariant_warm(const DenseChain& chain,
                                   std::vector<double> x) {
  const std::int64_t n = chain.n;
  if (static_cast<std::int64_t>(x.size()) != n)
    x.assign(static_cast<size_t>(n), 1.0 / static_cast<double>(n));
  std::vector<double> next(static_cast<size_t>(n));
  for (int it = 0; it < 5000; ++it) {
    for (std::int64_t j = 0; j < n; ++j) next[j] = 0.5 * x[j];
    for (std::int64_t i = 0; i < n; ++i) {
      const double xi = 0.5 * x[i];
      if (xi == 0.0) continue;
      for (std::int64_t j = 0; j < n; ++j) next[j] += xi * chain.at(i, j);
    }
    double diff = 0.0;
    for (std::int64_t j = 0; j < n; ++j) diff += std::abs(next[j] - x[j]);
    x.swap(next);
    if (diff < 1e-13) return x;
  }
  return stationary_distribution(chain);
}

// Exact long-run reward along a warm invariant estimate.
double reward_warm(const MppInstance& inst, const SignalingMechanism& sigma,
                   int m, std::vector<double>* inv_estimate) {
  const DenseChain chain = induced_slice_chain(inst, sigma, m);
  if (!check_unichain(chain)) throw NonUnichainError("reducible iterate");
  *inv_estimate = invariant_warm(chain, std::move(*inv_estimate));
  const SliceSpace sp(inst.n_pairs(), m);
  double reward = 0.0;
  for (std::int64_t h = 0; h < sp.size; ++h) {
    const int x = sp.last(h);
    reward +=
        (*inv_estimate)[h] * inst.v(inst.pair_state(x), inst.pair_action(x));
  }
  return reward;
}

// Reduced-gradient ascent along the obedience boundary. Interior moves
// Obedience rows near the boundary, with their exact gradients. Each row
// is one (observed window, recommended a, deviation a') whose raw margin
// lies within `band` (relative to the recommendation mass) of zero.
struct ActiveSet {
  std::vector<std::array<std::int64_t, 3>> idx;  // (g0, a, a')
  std::vector<std::vector<double>> normals;      // unit gradient rows
  std::vector<double> scales;                    // original gradient norms
  std::vector<double> margins;                   // raw margins
};

ActiveSet collect_active(const MppInstance& inst, int lag, int k,
                         const SignalingMechanism& sigma,
                         const DenseChain& chain,
                         const std::vector<double>& pi, double band) {
  const int m = std::max(k, 1);
  const int nw = inst.n_states, na = inst.n_actions;
  const SliceSpace sp(inst.n_pairs(), m);
  const SliceSpace win(inst.n_pairs(), k);
  const IncrementalUtility du(inst);
  const std::int64_t n = sp.size;
  const std::int64_t dim = win.size * nw * na;
  auto var = [&](std::int64_t g, int w, int a) {
    return static_cast<size_t>((g * nw + w) * na + a);
  };

  ActiveSet out;
  std::vector<double> d(static_cast<size_t>(n)), nxt(static_cast<size_t>(n));
  for (std::int64_t g0 = 0; g0 < n; ++g0) {
    if (pi[g0] <= 1e-12) continue;
    std::vector<std::vector<double>> fwd(1);  // e_g P^j
    fwd[0].assign(static_cast<size_t>(n), 0.0);
    fwd[0][g0] = 1.0;
    for (int j = 0; j < lag; ++j) {
      d = fwd.back();
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (std::int64_t i = 0; i < n; ++i) {
        if (d[i] == 0.0) continue;
        for (std::int64_t h = 0; h < n; ++h) nxt[h] += d[i] * chain.at(i, h);
      }
      fwd.push_back(nxt);
    }
    for (int a = 0; a < na; ++a)
      for (int a2 = 0; a2 < na; ++a2) {
        if (a2 == a) continue;
        // b(h) = sum_w p(w|last h) sigma(a|win h, w) du(w,a,a').
        Eigen::VectorXd b(n);
        for (std::int64_t h = 0; h < n; ++h) {
          double acc = 0.0;
          const std::int64_t g = sp.suffix(h, k);
          for (int w = 0; w < nw; ++w)
            acc += inst.p_from_pair(sp.last(h), w) * sigma.prob(g, w, a) *
                   du.at(w, a, a2);
          b(h) = acc;
        }
        double margin = 0.0, mass = 0.0;
        for (std::int64_t h = 0; h < n; ++h) {
          margin += fwd[lag][h] * b(h);
          const std::int64_t g = sp.suffix(h, k);
          for (int w = 0; w < nw; ++w)
            mass += fwd[lag][h] * inst.p_from_pair(sp.last(h), w) *
                    sigma.prob(g, w, a);
        }
        if (mass <= 1e-12 || margin > band * mass) continue;

        std::vector<double> normal(static_cast<size_t>(dim), 0.0);
        // Through the final aggregation.
        for (std::int64_t h = 0; h < n; ++h) {
          const double c = fwd[lag][h];
          if (c <= 1e-15) continue;
          const std::int64_t g = sp.suffix(h, k);
          for (int w = 0; w < nw; ++w)
            normal[var(g, w, a)] +=
                c * inst.p_from_pair(sp.last(h), w) * du.at(w, a, a2);
        }
        // Through the push-forward chain powers.
        std::vector<Eigen::VectorXd> tail(lag + 1);
        tail[lag] = b;
        for (int j = lag - 1; j >= 1; --j) {
          tail[j] = Eigen::VectorXd::Zero(n);
          for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t h = 0; h < n; ++h)
              tail[j](i) += chain.at(i, h) * tail[j + 1](h);
        }
        for (int j = 0; j < lag; ++j) {
          for (std::int64_t h = 0; h < n; ++h) {
            const double c = fwd[j][h];
            if (c <= 1e-15) continue;
            const std::int64_t g = sp.suffix(h, k);
            for (int w = 0; w < nw; ++w) {
              const double pw = inst.p_from_pair(sp.last(h), w);
              if (pw <= 0.0) continue;
              for (int a3 = 0; a3 < na; ++a3)
                normal[var(g, w, a3)] +=
                    c * pw * tail[j + 1](sp.append(h, inst.pair_index(w, a3)));
            }
          }
        }
        double norm = 0.0;
        for (double x : normal) norm += x * x;
        if (norm > 1e-18) {
          norm = std::sqrt(norm);
          for (double& x : normal) x /= norm;
          out.normals.push_back(std::move(normal));
          out.scales.push_back(norm);
          out.idx.push_back({g0, a, a2});
          out.margins.push_back(margin);
        }
      }
  }
  return out;
}

// Pull a perturbed mechanism back onto the persuasive set with Newton
// steps along the violated obedience gradients.
bool repair_feasibility(const MppInstance& inst, const PartialOptions& opts,
                        SignalingMechanism* sigma) {
  const int k = sigma->memory;
  const int m = std::max(k, 1);
  const std::int64_t dim =
      static_cast<std::int64_t>(sigma->table.size());
  std::vector<double> pi;
  for (int it = 0; it < 100; ++it) {
    const DenseChain chain = induced_slice_chain(inst, *sigma, m);
    if (!check_unichain(chain)) return false;
    pi = invariant_warm(chain, std::move(pi));
    const ActiveSet as =
        collect_active(inst, opts.lag, k, *sigma, chain, pi, 0.0);
    const int nc = static_cast<int>(as.idx.size());
    double worst = 0.0;
    for (int c = 0; c < nc; ++c) worst = std::min(worst, as.margins[c]);
    if (worst >= 0.0) return true;

    const int nw = inst.n_states, na = inst.n_actions;
    // Work in the simplex tangent space so row renormalization does not
    // undo the correction: subtract each (window, state) row mean.
    Eigen::MatrixXd N(nc, dim);
    Eigen::VectorXd rhs(nc);
    for (int c = 0; c < nc; ++c) {
      for (std::int64_t i = 0; i < dim; ++i) N(c, i) = as.normals[c][i];
      for (std::int64_t row = 0; row < dim / na; ++row) {
        const double mean = N.row(c).segment(row * na, na).mean();
        N.row(c).segment(row * na, na).array() -= mean;
      }
      rhs(c) = std::max(0.0, (1e-11 - as.margins[c]) / as.scales[c]);
    }
    Eigen::MatrixXd G = N * N.transpose();
    G.diagonal().array() += 1e-10;
    const Eigen::VectorXd corr = N.transpose() * G.ldlt().solve(rhs);
    const std::int64_t n_win = dim / (nw * na);
    for (std::int64_t g = 0; g < n_win; ++g)
      for (int w = 0; w < nw; ++w) {
        double sum = 0.0;
        for (int a = 0; a < na; ++a) {
          const size_t i = static_cast<size_t>((g * nw + w) * na + a);
          double s = sigma->table[i] + corr(static_cast<std::int64_t>(i));
          s = std::min(1.0, std::max(0.0, s));
          sigma->table[i] = s;
          sum += s;
        }
        for (int a = 0; a < na; ++a)
          sigma->table[static_cast<size_t>((g * nw + w) * na + a)] /= sum;
      }
  }
  return false;
}

// Reduced-gradient ascent along the obedience boundary. Interior moves
// rarely exist at good candidates (the binding constraints have empty
// interior), so the ascent direction is the exact value gradient
// projected onto the tangent space of the active obedience constraints
// and the simplex facets. Every accepted step re-verifies exactly.
void boundary_ascent(const MppInstance& inst, const PartialOptions& opts,
                     const InfoModel& model, SignalingMechanism* sigma,
                     double* value) {
  const int k = sigma->memory;
  const int m = std::max(k, 1);
  const int nw = inst.n_states, na = inst.n_actions;
  const SliceSpace sp(inst.n_pairs(), m);
  const SliceSpace win(inst.n_pairs(), k);
  const IncrementalUtility du(inst);
  const std::int64_t n = sp.size;
  const std::int64_t dim = win.size * nw * na;
  auto var = [&](std::int64_t g, int w, int a) {
    return static_cast<size_t>((g * nw + w) * na + a);
  };

  std::vector<double> pi;
  for (int outer = 0; outer < 200; ++outer) {
    const DenseChain chain = induced_slice_chain(inst, *sigma, m);
    if (!check_unichain(chain)) return;
    pi = invariant_warm(chain, std::move(pi));

    // Fundamental matrix of the slice chain.
    Eigen::MatrixXd A(n, n);
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        A(i, j) = (i == j ? 1.0 : 0.0) - chain.at(i, j) + pi[j];
    const Eigen::MatrixXd Z = A.partialPivLu().inverse();

    // One-step reward r(h) and the exact value gradient
    // dV/ds_i = pi' dP/ds_i Z r + pi' dr/ds_i.
    Eigen::VectorXd r(n);
    for (std::int64_t h = 0; h < n; ++h) {
      double acc = 0.0;
      const std::int64_t g = sp.suffix(h, k);
      for (int w = 0; w < nw; ++w) {
        const double pw = inst.p_from_pair(sp.last(h), w);
        if (pw <= 0.0) continue;
        for (int a = 0; a < na; ++a)
          acc += pw * sigma->prob(g, w, a) * inst.v(w, a);
      }
      r(h) = acc;
    }
    const Eigen::VectorXd zr = Z * r;
    std::vector<double> grad(static_cast<size_t>(dim), 0.0);
    for (std::int64_t h = 0; h < n; ++h) {
      if (pi[h] <= 1e-15) continue;
      const std::int64_t g = sp.suffix(h, k);
      for (int w = 0; w < nw; ++w) {
        const double c = pi[h] * inst.p_from_pair(sp.last(h), w);
        if (c <= 0.0) continue;
        for (int a = 0; a < na; ++a)
          grad[var(g, w, a)] +=
              c * (zr(sp.append(h, inst.pair_index(w, a))) + inst.v(w, a));
      }
    }

    // Obedience rows near the boundary at the current point. The wide
    // band also catches rows a small step would cross.
    const ActiveSet act =
        collect_active(inst, opts.lag, k, *sigma, chain, pi, 1e-3);
    const std::vector<std::vector<double>>& normals = act.normals;
    const int nc = static_cast<int>(normals.size());

    // Project the gradient onto the tangent space of all equality-like
    // constraints at once: row sums fixed, active normals orthogonal,
    // binding box facets removed. The facet set is grown to a fixed
    // point, with the exact projection recomputed each round.
    const std::int64_t n_rows = win.size * nw;
    std::vector<double> dir(static_cast<size_t>(dim), 0.0);
    std::vector<bool> clamped(static_cast<size_t>(dim), false);
    std::vector<bool> dropped(static_cast<size_t>(nc), false);
    for (int round = 0; round < 32; ++round) {
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n_rows + nc, dim);
      for (std::int64_t g = 0; g < win.size; ++g)
        for (int w = 0; w < nw; ++w)
          for (int a = 0; a < na; ++a)
            if (!clamped[var(g, w, a)])
              C(g * nw + w, var(g, w, a)) = 1.0;
      for (int c = 0; c < nc; ++c)
        if (!dropped[c])
          for (std::int64_t i = 0; i < dim; ++i)
            C(n_rows + c, i) = clamped[i] ? 0.0 : normals[c][i];
      Eigen::VectorXd v(dim);
      for (std::int64_t i = 0; i < dim; ++i) v(i) = clamped[i] ? 0.0 : grad[i];
      Eigen::MatrixXd G = C * C.transpose();
      G.diagonal().array() += 1e-10;
      const Eigen::VectorXd lam = G.ldlt().solve(C * v);
      const Eigen::VectorXd proj = v - C.transpose() * lam;
      for (std::int64_t i = 0; i < dim; ++i) dir[i] = clamped[i] ? 0.0 : proj(i);
      bool changed = false;
      // A positive multiplier means moving off this constraint raises
      // both the value and the margin, so it should not bind the ascent.
      for (int c = 0; c < nc; ++c)
        if (!dropped[c] && lam(n_rows + c) > 1e-9) {
          dropped[c] = true;
          changed = true;
        }
      for (std::int64_t i = 0; i < dim; ++i) {
        if (clamped[i]) continue;
        const double s = sigma->table[static_cast<size_t>(i)];
        if ((s <= 1e-12 && dir[i] < -1e-12) ||
            (s >= 1.0 - 1e-12 && dir[i] > 1e-12)) {
          clamped[i] = true;
          changed = true;
        }
      }
      if (!changed) break;
    }
    double dmax = 0.0;
    for (double x : dir) dmax = std::max(dmax, std::abs(x));
    if (dmax < 1e-10) return;

    // Backtracking line search with exact verification.
    bool accepted = false;
    for (double alpha : {0.5, 0.2, 0.08, 0.03, 0.01, 0.003, 0.001}) {
      SignalingMechanism cand = *sigma;
      const double scale = alpha / dmax;
      for (std::int64_t g = 0; g < win.size; ++g)
        for (int w = 0; w < nw; ++w) {
          double sum = 0.0;
          for (int a = 0; a < na; ++a) {
            double s = sigma->prob(g, w, a) + scale * dir[var(g, w, a)];
            s = std::min(1.0, std::max(0.0, s));
            cand.prob(g, w, a) = s;
            sum += s;
          }
          for (int a = 0; a < na; ++a) cand.prob(g, w, a) /= sum;
        }
      // Tangent steps drift off the boundary (second order on the rows
      // projected out, first order on rows behind newly opened windows),
      // so pull each trial point back onto the persuasive set with the
      // reachability-aware Newton repair before judging it.
      try {
        if (!repair_feasibility(inst, opts, &cand)) continue;
        std::vector<double> est = pi;
        const double v = reward_warm(inst, cand, m, &est);
        if (v <= *value + 1e-10 ||
            !check_persuasive(inst, cand, model, opts.obedience_tol)
                 .persuasive)
          continue;
        *sigma = cand;
        *value = v;
        pi = std::move(est);
        accepted = true;
        break;
      } catch (const MppError&) {
        continue;
      }
    }
    if (!accepted) return;
  }
}

// Blend one signaling row toward a vertex of the action simplex.
SignalingMechanism row_move(const SignalingMechanism& sigma, std::int64_t g,
                            int w, int a, double t) {
  SignalingMechanism out = sigma;
  for (int a2 = 0; a2 < sigma.n_actions; ++a2)
    out.prob(g, w, a2) =
        (1.0 - t) * sigma.prob(g, w, a2) + (a2 == a ? t : 0.0);
  return out;
}

// Verified local ascent on the exact value. Single-row moves alone stall
// where an obedience constraint binds, so a failing move may be paired
// with a compensating move on a nearby row (same window, or a window
// agreeing on the recent pairs) that restores obedience while keeping a
// net value gain. Accepted moves always pass the exact oracle.
void polish(const MppInstance& inst, const PartialOptions& opts,
            const InfoModel& model, SignalingMechanism* sigma,
            double* value) {
  const int m = std::max(sigma->memory, 1);
  const int k = sigma->memory;
  const int nw = inst.n_states, na = inst.n_actions;
  const SliceSpace win(inst.n_pairs(), k);
  const double steps[] = {0.3, 0.1, 0.03, 0.01, 0.003};
  const double comp_steps[] = {0.4, 0.2, 0.1, 0.05, 0.02};

  // Neighbor rows of (g, w): other states at g, and windows that share
  // the k-1 most recent pairs (they feed the same near-future contexts).
  auto neighbors = [&](std::int64_t g, int w) {
    std::vector<std::pair<std::int64_t, int>> out;
    for (int w2 = 0; w2 < nw; ++w2)
      if (w2 != w) out.emplace_back(g, w2);
    if (k >= 1) {
      const std::int64_t recent = win.suffix(g, k - 1);
      const std::int64_t stride = win.size / inst.n_pairs();
      for (int old = 0; old < inst.n_pairs(); ++old) {
        const std::int64_t g2 = old * stride + recent;
        if (g2 == g) continue;
        for (int w2 = 0; w2 < nw; ++w2) out.emplace_back(g2, w2);
      }
      // Windows agreeing on the older pairs but differing in the newest.
      const std::int64_t oldest = win.prefix(g, k - 1);
      for (int x = 0; x < inst.n_pairs(); ++x) {
        const std::int64_t g2 = oldest * inst.n_pairs() + x;
        if (g2 == g) continue;
        for (int w2 = 0; w2 < nw; ++w2) out.emplace_back(g2, w2);
      }
    }
    return out;
  };

  std::vector<double> inv;
  auto eval = [&](const SignalingMechanism& cand, double* v) {
    try {
      std::vector<double> est = inv;
      *v = reward_warm(inst, cand, m, &est);
      inv = std::move(est);
      return true;
    } catch (const MppError&) {
      return false;
    }
  };
  auto verified = [&](const SignalingMechanism& cand) {
    return check_persuasive(inst, cand, model, opts.obedience_tol)
        .persuasive;
  };

  for (int pass = 0; pass < opts.polish_passes; ++pass) {
    bool improved = false;
    for (std::int64_t g = 0; g < sigma->n_windows(); ++g)
      for (int w = 0; w < nw; ++w)
        for (int a = 0; a < na; ++a) {
          bool moved_here = false;
          for (const double t : steps) {
            if (std::abs(sigma->prob(g, w, a) - 1.0) < 1e-12) break;
            const SignalingMechanism cand = row_move(*sigma, g, w, a, t);
            double v = 0.0;
            if (!eval(cand, &v) || v <= *value + 1e-9) continue;
            if (verified(cand)) {
              *sigma = cand;
              *value = v;
              improved = moved_here = true;
              break;
            }
            // Obedience blocks the move: look for a compensating row.
            for (const auto& [g2, w2] : neighbors(g, w)) {
              for (int a2 = 0; a2 < na && !moved_here; ++a2)
                for (const double s : comp_steps) {
                  const SignalingMechanism cand2 =
                      row_move(cand, g2, w2, a2, s);
                  double v2 = 0.0;
                  if (!eval(cand2, &v2) || v2 <= *value + 1e-9) continue;
                  if (!verified(cand2)) continue;
                  *sigma = cand2;
                  *value = v2;
                  improved = moved_here = true;
                  break;
                }
              if (moved_here) break;
            }
            if (moved_here) break;
          }
        }
    if (!improved) break;
  }
  // Re-certify with the fully checked pipeline.
  *value = long_run_reward(inst, *sigma);
}

SignalingMechanism warm_from_full(const MppInstance& inst, int memory) {
  const BenchmarkResult full =
      solve_benchmark(inst, InfoModel::full_history());
  if (memory >= 1) return lift_memory(full.mechanism, memory);

  const int nw = inst.n_states, na = inst.n_actions, nx = inst.n_pairs();
  SignalingMechanism sigma(0, nw, na);
  for (int w = 0; w < nw; ++w) {
    double mass = 0.0;
    std::vector<double> avg(na, 0.0);
    for (int x = 0; x < nx; ++x)
      for (int a = 0; a < na; ++a) {
        const double z = full.occupancy[(static_cast<size_t>(x) * nw + w) * na + a];
        avg[a] += z;
        mass += z;
      }
    if (mass > kMassTol)
      for (int a = 0; a < na; ++a) sigma.prob(0, w, a) = avg[a] / mass;
    else
      sigma.prob(0, w, receiver_best_action(inst, w)) = 1.0;
  }
  return sigma;
}

}  // namespace

PartialResult solve_partial(const MppInstance& inst,
                            const PartialOptions& user_opts) {
  // Refinement cost grows sharply with the window space, so the search
  // budget is scaled down at large memories. Warm starts lifted from
  // smaller memories keep their exact value, so the cheap path still
  // returns a certified lower bound at least as good as the lift.
  PartialOptions opts = user_opts;
  {
    const std::int64_t dim = SliceSpace(inst.n_pairs(), opts.memory).size *
                             inst.n_states * inst.n_actions;
    if (dim > 512) {
      opts.starts = std::min(opts.starts, 8);
      opts.max_iters = std::min(opts.max_iters, 5);
      opts.polish = false;
    } else if (dim > 128) {
      opts.starts = std::min(opts.starts, 8);
      opts.hops = std::min(opts.hops, 6);
    }
  }
  const InfoModel model = InfoModel::with_lag(opts.lag);
  PartialResult best;
  best.value = -1.0;

  std::vector<SignalingMechanism> inits;
  inits.push_back(warm_from_full(inst, opts.memory));
  inits.push_back(full_revelation(inst, opts.memory));
  for (const SignalingMechanism& w : opts.warm_starts) {
    if (w.memory > opts.memory)
      throw MppError("warm start memory exceeds the solve's memory");
    inits.push_back(w.memory == opts.memory ? w
                                            : lift_memory(w, opts.memory));
  }
  for (int s = 0; s < opts.starts; ++s)
    inits.push_back(random_start(
        inst, opts.memory,
        opts.seed ^ (0x9E3779B97F4A7C15ULL *
                     static_cast<std::uint64_t>(s + 1))));

  for (size_t s = 0; s < inits.size(); ++s) {
    SignalingMechanism sigma = inits[s];
    double start_best = -1.0;
    SignalingMechanism start_best_sigma;
    int iters = 0;
    alternate(inst, opts, model, &sigma, &start_best, &start_best_sigma,
              &iters);
    best.start_values.push_back(start_best);
    if (start_best > best.value) {
      best.value = start_best;
      best.mechanism = start_best_sigma;
      best.best_start = static_cast<int>(s);
      best.iterations = iters;
    }
  }

  if (best.best_start < 0)
    throw NotPersuasiveError(
        "no start produced an exactly persuasive mechanism");

  if (opts.polish) {
    // Polish until fixed, re-seeding the alternation from the polished
    // point in between: the two moves escape each other's stalls.
    polish(inst, opts, model, &best.mechanism, &best.value);
    boundary_ascent(inst, opts, model, &best.mechanism, &best.value);
    for (int cycle = 0; cycle < 3; ++cycle) {
      SignalingMechanism sigma = best.mechanism;
      double cand_value = best.value;
      SignalingMechanism cand_sigma = best.mechanism;
      int iters = 0;
      alternate(inst, opts, model, &sigma, &cand_value, &cand_sigma, &iters);
      polish(inst, opts, model, &cand_sigma, &cand_value);
      boundary_ascent(inst, opts, model, &cand_sigma, &cand_value);
      if (cand_value <= best.value + 1e-9) break;
      best.value = cand_value;
      best.mechanism = cand_sigma;
    }

    // Basin hopping: jump off the incumbent, pull the jump back onto the
    // persuasive set, and ascend again. Keeps strict improvements only.
    std::mt19937_64 rng(static_cast<std::uint64_t>(opts.seed) *
                            0xA24BAED4963EE407ULL +
                        17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double hop_scales[] = {0.05, 0.12, 0.25, 0.4};
    const int nw = inst.n_states, na = inst.n_actions;
    for (int hop = 0; hop < opts.hops; ++hop) {
      SignalingMechanism cand = best.mechanism;
      const double s = hop_scales[hop % 4];
      for (double& x : cand.table) x += s * gauss(rng);
      for (std::int64_t g = 0; g < cand.n_windows(); ++g)
        for (int w = 0; w < nw; ++w) {
          double sum = 0.0;
          for (int a = 0; a < na; ++a) {
            double& x = cand.prob(g, w, a);
            x = std::min(1.0, std::max(0.0, x));
            sum += x;
          }
          for (int a = 0; a < na; ++a)
            cand.prob(g, w, a) = sum > 1e-12 ? cand.prob(g, w, a) / sum
                                             : 1.0 / na;
        }
      try {
        if (!repair_feasibility(inst, opts, &cand)) continue;
        if (!check_persuasive(inst, cand, model, opts.obedience_tol)
                 .persuasive)
          continue;
        double v = long_run_reward(inst, cand);
        boundary_ascent(inst, opts, model, &cand, &v);
        if (v > best.value + 1e-9) {
          polish(inst, opts, model, &cand, &v);
          boundary_ascent(inst, opts, model, &cand, &v);
          best.value = v;
          best.mechanism = cand;
        }
      } catch (const MppError&) {
        continue;
      }
    }
  }
  return best;
}

}  // namespace mpp
