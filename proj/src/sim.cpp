// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/sim.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "mpp/chain.hpp"
#include "mpp/errors.hpp"

namespace mpp {
namespace {

constexpr double kMassTol = 1e-12;

int sample_index(const std::vector<double>& probs, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

// Best response to a posterior; ties go to the recommendation.
int best_response(const MppInstance& inst, const std::vector<double>& post,
                  int recommended) {
  std::vector<double> payoff(inst.n_actions, 0.0);
  for (int a = 0; a < inst.n_actions; ++a)
    for (int w = 0; w < inst.n_states; ++w)
      payoff[a] += post[w] * inst.u(w, a);
  int best = 0;
  for (int a = 1; a < inst.n_actions; ++a)
    if (payoff[a] > payoff[best]) best = a;
  if (payoff[recommended] >= payoff[best] - 1e-12) return recommended;
  return best;
}

}  // namespace

SimResult simulate(const MppInstance& inst, const SignalingMechanism& sigma,
                   const ReceiverBehavior& behavior, std::int64_t steps,
                   std::uint64_t seed) {
  const int k = sigma.memory;
  const int m = std::max(k, 1);
  const int nw = inst.n_states, na = inst.n_actions, nx = inst.n_pairs();
  const SliceSpace sp(nx, m);
  const std::int64_t n = sp.size;

  // Independent streams: one drives the process, one the signals.
  std::mt19937_64 rng_trans(seed * 2654435761ULL + 1);
  std::mt19937_64 rng_signal(seed * 0x9E3779B97F4A7C15ULL + 2);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const InvariantDistribution inv = sender_preferred_invariant(inst, sigma, m);

  // Precomputed best responses per (observed context, recommendation).
  const bool respond = behavior.kind == ReceiverBehavior::BestRespond;
  const int lag = behavior.model.kind == InfoModel::Lag ? behavior.model.lag
                                                        : 0;
  const bool contextual =
      respond && behavior.model.kind != InfoModel::NoHistory;
  std::vector<int> best;  // [context][a] or [a]
  if (respond) {
    DenseChain chain;
    if (contextual) chain = induced_slice_chain(inst, sigma, m);
    const std::int64_t n_ctx = contextual ? n : 1;
    best.assign(static_cast<size_t>(n_ctx) * na, 0);
    std::vector<double> d(static_cast<size_t>(n)),
        next(static_cast<size_t>(n));
    for (std::int64_t g = 0; g < n_ctx; ++g) {
      if (contextual) {
        std::fill(d.begin(), d.end(), 0.0);
        d[g] = 1.0;
        for (int step = 0; step < lag; ++step) {
          std::fill(next.begin(), next.end(), 0.0);
          for (std::int64_t i = 0; i < n; ++i) {
            if (d[i] == 0.0) continue;
            for (std::int64_t j = 0; j < n; ++j)
              next[j] += d[i] * chain.at(i, j);
          }
          d.swap(next);
        }
      } else {
        d = inv.probs;
      }
      // State belief before the recommendation, as the fallback when
      // the recommendation itself has probability zero.
      std::vector<double> base(nw, 0.0);
      for (std::int64_t h = 0; h < n; ++h) {
        if (d[h] <= kMassTol) continue;
        for (int w = 0; w < nw; ++w)
          base[w] += d[h] * inst.p_from_pair(sp.last(h), w);
      }
      for (int a = 0; a < na; ++a) {
        std::vector<double> post(nw, 0.0);
        double mass = 0.0;
        for (std::int64_t h = 0; h < n; ++h) {
          if (d[h] <= kMassTol) continue;
          const std::int64_t window = sp.suffix(h, k);
          for (int w = 0; w < nw; ++w) {
            const double pr =
                d[h] * inst.p_from_pair(sp.last(h), w) * sigma.prob(window, w, a);
            post[w] += pr;
            mass += pr;
          }
        }
        if (mass > kMassTol)
          for (int w = 0; w < nw; ++w) post[w] /= mass;
        else
          post = base;
        best[static_cast<size_t>(g) * na + a] = best_response(inst, post, a);
      }
    }
  }

  // Initial window drawn from the invariant.
  std::int64_t slice = sample_index(inv.probs, unif(rng_trans));
  std::deque<std::int64_t> past;  // windows, oldest first, for lagged eyes
  past.assign(static_cast<size_t>(lag) + 1, slice);

  SimResult res;
  res.steps = steps;
  res.pair_freq.assign(nx, 0.0);
  std::vector<double> row(nw), srow(na);
  for (std::int64_t t = 0; t < steps; ++t) {
    for (int w = 0; w < nw; ++w) row[w] = inst.p_from_pair(sp.last(slice), w);
    const int w = sample_index(row, unif(rng_trans));
    const std::int64_t window = sp.suffix(slice, k);
    for (int a = 0; a < na; ++a) srow[a] = sigma.prob(window, w, a);
    const int rec = sample_index(srow, unif(rng_signal));
    int played = rec;
    if (respond) {
      const std::int64_t ctx = contextual ? past.front() : 0;
      played = best[static_cast<size_t>(ctx) * na + rec];
    }
    if (played != rec) ++res.disobediences;
    res.average_reward += inst.v(w, played);
    res.pair_freq[inst.pair_index(w, played)] += 1.0;
    slice = sp.append(slice, inst.pair_index(w, played));
    past.push_back(slice);
    past.pop_front();
  }
  res.average_reward /= static_cast<double>(steps);
  for (double& f : res.pair_freq) f /= static_cast<double>(steps);
  return res;
}

}  // namespace mpp
