// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/persuasion.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "mpp/chain.hpp"
#include "mpp/errors.hpp"

namespace mpp {
namespace {

constexpr double kMassTol = 1e-12;

}  // namespace

int slice_cap() {
  if (const char* env = std::getenv("MPP_SLICE_CAP")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  return 4;
}

ObedienceReport check_persuasive(const MppInstance& inst,
                                 const SignalingMechanism& sigma,
                                 const InfoModel& model, double tol) {
  const int k = sigma.memory;
  const int m = std::max(k, 1);
  const int lag = model.kind == InfoModel::Lag ? model.lag
                  : model.kind == InfoModel::FullHistory ? 0
                                                         : 0;
  if (model.kind != InfoModel::NoHistory && lag + m > slice_cap()) {
    std::ostringstream os;
    os << "slice length " << lag + m << " exceeds cap " << slice_cap();
    throw CapExceededError(os.str());
  }
  if (m > slice_cap()) {
    std::ostringstream os;
    os << "mechanism window " << m << " exceeds cap " << slice_cap();
    throw CapExceededError(os.str());
  }

  const DenseChain chain = induced_slice_chain(inst, sigma, m);
  const InvariantDistribution inv =
      sender_preferred_invariant(inst, sigma, m);
  const SliceSpace sp(inst.n_pairs(), m);
  const IncrementalUtility du(inst);
  const std::int64_t n = sp.size;

  // Each "context" is what the receiver can condition on besides the
  // recommendation: nothing (the invariant), or a window observed `lag`
  // steps ago (its point mass pushed forward through the slice chain).
  std::vector<std::pair<std::int64_t, std::vector<double>>> contexts;
  if (model.kind == InfoModel::NoHistory) {
    contexts.emplace_back(-1, inv.probs);
  } else {
    for (std::int64_t g = 0; g < n; ++g) {
      if (inv.probs[g] <= kMassTol) continue;
      std::vector<double> d(static_cast<size_t>(n), 0.0);
      d[g] = 1.0;
      std::vector<double> next(static_cast<size_t>(n));
      for (int step = 0; step < lag; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
          if (d[i] == 0.0) continue;
          for (std::int64_t j = 0; j < n; ++j)
            next[j] += d[i] * chain.at(i, j);
        }
        d.swap(next);
      }
      contexts.emplace_back(g, std::move(d));
    }
  }

  ObedienceReport report;
  std::vector<double> posterior(inst.n_states);
  for (const auto& [ctx, dist] : contexts) {
    for (int a = 0; a < inst.n_actions; ++a) {
      // Posterior over the current state given recommendation a.
      std::fill(posterior.begin(), posterior.end(), 0.0);
      double mass = 0.0;
      for (std::int64_t h = 0; h < n; ++h) {
        if (dist[h] <= kMassTol) continue;
        const int x = sp.last(h);
        const std::int64_t window = sp.suffix(h, k);
        for (int w = 0; w < inst.n_states; ++w) {
          const double pr =
              dist[h] * inst.p_from_pair(x, w) * sigma.prob(window, w, a);
          posterior[w] += pr;
          mass += pr;
        }
      }
      if (mass <= kMassTol) continue;
      for (int a2 = 0; a2 < inst.n_actions; ++a2) {
        if (a2 == a) continue;
        double slack = 0.0;
        for (int w = 0; w < inst.n_states; ++w)
          slack += posterior[w] * du.at(w, a, a2);
        slack /= mass;
        if (slack < report.worst_margin) {
          report.worst_margin = slack;
          std::ostringstream os;
          if (ctx >= 0) os << "window " << ctx << ", ";
          os << "recommendation " << a << " vs deviation " << a2;
          report.worst_context = os.str();
        }
      }
    }
  }
  report.persuasive = report.worst_margin >= -tol;
  return report;
}

}  // namespace mpp
