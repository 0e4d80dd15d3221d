// Copyright 2026 The rwl1 Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense linear programming in standard form,
//
//   minimize c'v  subject to  M v = b,  v >= 0,
//
// and the weighted basis pursuit problem built on top of it.

#ifndef RWL1_LPSOLVE_H_
#define RWL1_LPSOLVE_H_

#include <optional>
#include <span>
#include <vector>

#include "rwl1/dense.h"

namespace rwl1::lp {

struct LinearProgram {
  DenseVector objective;    // length d
  DenseMatrix constraints;  // m x d
  DenseVector rhs;          // length m
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::optional<DenseVector> point;  // present iff status == kOptimal
  std::optional<double> value;
  int iterations = 0;
};

struct SolverOptions {
  double pivot_tol = 1e-9;      // smallest admissible pivot magnitude
  double optimality_tol = 1e-9;  // reduced-cost threshold
  double feasibility_tol = 1e-8;  // Phase-I residual, relative to 1+|b|_inf
  double rank_tol = 1e-10;       // redundant-row detection
  int max_iterations = 100000;
  // Consecutive degenerate pivots after which pricing switches from
  // Dantzig's rule to Bland's rule until progress resumes.
  int degenerate_run_limit = 500;
};

// Two-phase simplex on a dense tableau. Deterministic for identical
// inputs. Throws DomainError on inconsistent dimensions or non-finite data
// and ConvergenceError if max_iterations is exhausted.
LpSolution solve_lp(const LinearProgram& program,
                    const SolverOptions& options = {});

struct BasisPursuitResult {
  DenseVector solution;
  // Columns of A in the final simplex basis; feeding them back as a warm
  // start to a re-weighted problem on the same (A, y) skips the crash phase.
  std::vector<std::size_t> basis_columns;
  int iterations = 0;
};

// argmin sum_i weights_i |z_i| subject to A z = y, solved through the split
// z = u - v with u, v >= 0, objective sum_i weights_i (u_i + v_i).
//
// The split tableau stores B^{-1} A once: the v-columns are the negated
// u-columns. Any nonsingular set of columns of A is a feasible basis once
// each basic variable takes the sign of its value, so no Phase I is needed.
//
// Throws InfeasibleError when y is not in the column span of A and
// DomainError for non-positive weights or mismatched sizes.
BasisPursuitResult basis_pursuit_detailed(
    const DenseMatrix& a, std::span<const double> y,
    std::span<const double> weights,
    std::span<const std::size_t> warm_basis = {},
    const SolverOptions& options = {});

DenseVector basis_pursuit(const DenseMatrix& a, std::span<const double> y,
                          std::span<const double> weights,
                          const SolverOptions& options = {});

}  // namespace rwl1::lp

#endif  // RWL1_LPSOLVE_H_
