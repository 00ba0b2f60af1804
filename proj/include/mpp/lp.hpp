// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mpp authors

#ifndef MPP_LP_HPP
#define MPP_LP_HPP

#include <cstddef>
#include <vector>

namespace mpp {

/// maximize c'z  subject to  Aeq z = beq,  Aineq z >= bineq,  z >= 0.
/// Rows are stored dense; problems in this codebase are small.
struct LinearProgram {
  std::size_t n_vars = 0;
  std::vector<double> objective;        // size n_vars
  std::vector<std::vector<double>> eq;  // each row size n_vars
  std::vector<double> eq_rhs;
  std::vector<std::vector<double>> ineq;  // row . z >= rhs
  std::vector<double> ineq_rhs;

  explicit LinearProgram(std::size_t n = 0)
      : n_vars(n), objective(n, 0.0) {}

  void add_eq(std::vector<double> row, double rhs) {
    eq.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  }
  void add_ineq(std::vector<double> row, double rhs) {
    ineq.push_back(std::move(row));
    ineq_rhs.push_back(rhs);
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  double value = 0.0;
};

/// Dense two-phase simplex (Dantzig entering, two-pass ratio test,
/// periodic refactorization from the original data). Hard instances are
/// retried with Bland's rule throughout; throws NumericalFailureError if
/// the retry still cannot produce a solution within tolerance.
LpSolution solve(const LinearProgram& lp);

}  // namespace mpp

#endif  // MPP_LP_HPP
