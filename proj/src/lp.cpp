// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#include "mpp/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpp/errors.hpp"

namespace mpp {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Full-tableau simplex state. Columns: structural vars, then surplus
// vars (one per inequality), then artificials. The occupancy LPs built
// elsewhere in this library are heavily degenerate (zero right-hand side
// everywhere except one normalization row), so the tableau is
// refactorized from the original data every few dozen pivots: long
// degenerate cascades otherwise accumulate enough roundoff to corrupt
// the pivoting decisions themselves.
struct Tableau {
  std::size_t n_cols = 0;   // total variable columns
  std::size_t n_art0 = 0;   // first artificial column
  std::vector<std::vector<double>> rows;  // coefficient rows
  std::vector<double> rhs;
  std::vector<std::size_t> basis;  // basic column per row
  std::vector<double> cost;        // current reduced-cost row (maximize)
  double obj_shift = 0.0;          // objective value of the basic solution

  std::vector<std::vector<double>> A0;  // pristine constraint rows
  std::vector<double> b0;               // pristine right-hand side
  std::vector<std::size_t> orig;        // original row per current row
  std::vector<double> obj0;             // phase objective per column
  std::size_t pivots_since_refresh = 0;
  bool safe = false;  // Bland's rule + frequent refactorization

  // Reduced costs and objective value for obj0 at the current basis,
  // assuming `rows` holds B^-1 A (so basic columns are unit vectors).
  void compute_costs() {
    cost = obj0;
    obj_shift = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double f = obj0[basis[r]];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_cols; ++j) cost[j] -= f * rows[r][j];
      obj_shift += f * rhs[r];
    }
    for (std::size_t r = 0; r < rows.size(); ++r) cost[basis[r]] = 0.0;
  }

  // Recompute rows = B^-1 A0 and rhs = B^-1 b0 with a fresh factorization
  // of the basis matrix, discarding all accumulated pivot roundoff.
  void refresh() {
    const std::size_t mr = rows.size();
    Eigen::MatrixXd B(mr, mr);
    Eigen::MatrixXd R(mr, static_cast<Eigen::Index>(n_cols) + 1);
    for (std::size_t r = 0; r < mr; ++r) {
      const std::vector<double>& ar = A0[orig[r]];
      for (std::size_t c = 0; c < mr; ++c) B(r, c) = ar[basis[c]];
      for (std::size_t j = 0; j < n_cols; ++j) R(r, j) = ar[j];
      R(r, n_cols) = b0[orig[r]];
    }
    const Eigen::MatrixXd X =
        safe ? Eigen::MatrixXd(B.fullPivLu().solve(R))
             : Eigen::MatrixXd(B.partialPivLu().solve(R));
    for (std::size_t r = 0; r < mr; ++r) {
      for (std::size_t j = 0; j < n_cols; ++j) rows[r][j] = X(r, j);
      rhs[r] = X(r, n_cols);
      if (rhs[r] < 0.0 && rhs[r] > -1e-9) rhs[r] = 0.0;
    }
    // Snap basic columns to exact unit vectors.
    for (std::size_t c = 0; c < mr; ++c)
      for (std::size_t r = 0; r < mr; ++r)
        rows[r][basis[c]] = r == c ? 1.0 : 0.0;
    compute_costs();
    pivots_since_refresh = 0;
  }

  void pivot(std::size_t r, std::size_t c) {
    const double piv = rows[r][c];
    const double inv = 1.0 / piv;
    for (double& v : rows[r]) v *= inv;
    rhs[r] *= inv;
    rows[r][c] = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const double f = rows[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_cols; ++j) rows[i][j] -= f * rows[r][j];
      rows[i][c] = 0.0;
      rhs[i] -= f * rhs[r];
      if (rhs[i] < 0.0 && rhs[i] > -1e-11) rhs[i] = 0.0;
    }
    const double f = cost[c];
    if (std::abs(f) > 0.0) {
      for (std::size_t j = 0; j < n_cols; ++j) cost[j] -= f * rows[r][j];
      cost[c] = 0.0;
      obj_shift += f * rhs[r];
    }
    basis[r] = c;
    ++pivots_since_refresh;
  }

  // Two-pass ratio test. Pass 1 finds the exact minimum ratio over every
  // coefficient above a column-relative noise floor; excluding rows there
  // would let a long step drive them negative and silently abandon
  // feasibility. Pass 2 picks, within a tight tie window around the
  // minimum, the largest pivot element (numerical stability) — or the
  // smallest basic index when `bland` is set, which breaks the ties that
  // sustain degenerate cycles.
  std::size_t ratio_test(std::size_t enter, bool bland) const {
    double colmax = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      colmax = std::max(colmax, std::abs(rows[i][enter]));
    const double floor = 1e-11 * std::max(1.0, colmax);

    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double coef = rows[i][enter];
      if (coef <= floor) continue;
      theta = std::min(theta, std::max(rhs[i], 0.0) / coef);
    }
    if (theta == std::numeric_limits<double>::infinity()) return rows.size();

    const double window = theta * 1e-9 + 1e-14;
    std::size_t leave = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double coef = rows[i][enter];
      if (coef <= floor) continue;
      if (std::max(rhs[i], 0.0) / coef > theta + window) continue;
      if (leave == rows.size()) {
        leave = i;
        continue;
      }
      const bool better = bland ? basis[i] < basis[leave]
                                : coef > rows[leave][enter];
      if (better) leave = i;
    }
    return leave;
  }

  // Runs simplex to optimality over columns [0, col_limit).
  // Returns false on unboundedness. Entering column is Dantzig (most
  // positive reduced cost); after a long degenerate stall the pivot
  // selection switches to index-based tie-breaking until progress.
  bool optimize(std::size_t col_limit) {
    const std::size_t max_iters = 20000 + 200 * (rows.size() + col_limit);
    std::size_t stalled = 0;
    const std::size_t refresh_every = safe ? 8 : 256;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
      if (pivots_since_refresh >= refresh_every) refresh();
      const bool bland = safe || stalled > 200;
      std::size_t enter = col_limit;
      double best_cost = kPivotTol;
      for (std::size_t j = 0; j < col_limit; ++j) {
        if (cost[j] <= best_cost) continue;
        enter = j;
        if (bland) break;  // smallest eligible index
        best_cost = cost[j];
      }
      if (enter == col_limit) {
        // Only trust optimality on a freshly refactorized tableau.
        if (pivots_since_refresh == 0) return true;
        refresh();
        continue;
      }

      const std::size_t leave = ratio_test(enter, bland);
      if (leave == rows.size()) return false;  // unbounded direction
      const double step =
          std::max(rhs[leave], 0.0) / rows[leave][enter];
      stalled = step <= 1e-13 ? stalled + 1 : 0;
      pivot(leave, enter);
    }
    throw NumericalFailureError("simplex iteration limit exceeded");
  }
};

LpSolution solve_attempt(const LinearProgram& lp, bool safe) {
  const std::size_t n = lp.n_vars;
  const std::size_t n_ineq = lp.ineq.size();
  const std::size_t m = lp.eq.size() + n_ineq;

  Tableau t;
  t.safe = safe;
  t.n_art0 = n + n_ineq;
  t.n_cols = t.n_art0 + m;
  t.rows.assign(m, std::vector<double>(t.n_cols, 0.0));
  t.rhs.assign(m, 0.0);
  t.basis.assign(m, 0);

  t.orig.resize(m);
  for (std::size_t i = 0; i < m; ++i) t.orig[i] = i;

  // Inequalities first: row . z >= b becomes row . z - s = b. When the
  // right-hand side is nonpositive, negating gives the surplus a +1
  // coefficient and it can start basic without an artificial.
  std::vector<bool> needs_art(m, true);
  for (std::size_t i = 0; i < n_ineq; ++i) {
    double sign = lp.ineq_rhs[i] > 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j)
      t.rows[i][j] = sign * lp.ineq[i][j];
    t.rows[i][n + i] = -sign;
    t.rhs[i] = sign * lp.ineq_rhs[i];
    if (sign < 0.0) {
      t.basis[i] = n + i;
      needs_art[i] = false;
    }
  }
  for (std::size_t i = 0; i < lp.eq.size(); ++i) {
    const std::size_t r = n_ineq + i;
    const double sign = lp.eq_rhs[i] >= 0.0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j)
      t.rows[r][j] = sign * lp.eq[i][j];
    t.rhs[r] = sign * lp.eq_rhs[i];
  }

  // Phase 1: maximize -(sum of artificials).
  for (std::size_t i = 0; i < m; ++i) {
    if (!needs_art[i]) continue;
    t.rows[i][t.n_art0 + i] = 1.0;
    t.basis[i] = t.n_art0 + i;
  }
  t.A0 = t.rows;  // pristine copy, used by every refactorization
  t.b0 = t.rhs;
  t.obj0.assign(t.n_cols, 0.0);
  for (std::size_t c = t.n_art0; c < t.n_cols; ++c) t.obj0[c] = -1.0;
  t.compute_costs();
  if (!t.optimize(t.n_cols))
    throw NumericalFailureError("phase-1 simplex reported unbounded");
  if (t.obj_shift < -kFeasTol) {
    LpSolution sol;
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Drive out or delete basic artificials left at value zero.
  for (std::size_t i = 0; i < t.rows.size();) {
    if (t.basis[i] < t.n_art0) {
      ++i;
      continue;
    }
    // Prefer the largest structural coefficient: tiny pivots amplify error.
    std::size_t c = t.n_art0;
    double best = kPivotTol;
    for (std::size_t j = 0; j < t.n_art0; ++j) {
      if (std::abs(t.rows[i][j]) > best) {
        best = std::abs(t.rows[i][j]);
        c = j;
      }
    }
    if (c < t.n_art0) {
      t.pivot(i, c);
      ++i;
    } else {
      // Redundant row: every structural coefficient is zero.
      t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
      t.rhs.erase(t.rhs.begin() + static_cast<std::ptrdiff_t>(i));
      t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      t.orig.erase(t.orig.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }

  // Phase 2 over structural + surplus columns with the real objective.
  t.obj0.assign(t.n_cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) t.obj0[j] = lp.objective[j];
  t.refresh();
  LpSolution sol;
  if (!t.optimize(t.n_art0)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;

  // Final refactorization: the basic values come from a fresh solve of
  // the original system, so the reported vertex is exact.
  t.refresh();
  sol.primal.assign(n, 0.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < n) sol.primal[t.basis[i]] = std::max(0.0, t.rhs[i]);
  sol.value = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    sol.value += lp.objective[j] * sol.primal[j];

  // Residual check against the original system.
  double resid = 0.0;
  for (std::size_t i = 0; i < lp.eq.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += lp.eq[i][j] * sol.primal[j];
    resid = std::max(resid, std::abs(lhs - lp.eq_rhs[i]));
  }
  for (std::size_t i = 0; i < n_ineq; ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < n; ++j) lhs += lp.ineq[i][j] * sol.primal[j];
    resid = std::max(resid, std::max(0.0, lp.ineq_rhs[i] - lhs));
  }
  if (resid > kFeasTol)
    throw NumericalFailureError("simplex solution residual too large: " +
                                std::to_string(resid));
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  // Rare hard instances defeat the fast pivot rules; re-solve those with
  // Bland's rule throughout and a refactorization every few pivots.
  // Infeasible/unbounded verdicts are also confirmed by the slow path so
  // a numerically spurious verdict cannot leak out.
  try {
    const LpSolution sol = solve_attempt(lp, false);
    if (sol.status == LpStatus::Optimal) return sol;
  } catch (const NumericalFailureError&) {
  }
  return solve_attempt(lp, true);
}

}  // namespace mpp
