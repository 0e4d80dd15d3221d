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

#include "rwl1/lpsolve.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rwl1/errors.h"

namespace rwl1::lp {
namespace {

// Dense simplex tableau over the original columns plus the right-hand side.
// Artificial variables are never stored as columns: they start basic, may
// only leave, and are identified by basis indices >= d.
class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SolverOptions& opts)
      : opts_(opts),
        m_(lp.constraints.rows()),
        d_(lp.constraints.cols()),
        stride_(d_ + 1),
        t_(m_ * stride_),
        z_(stride_, 0.0),
        basis_(m_),
        is_basic_(d_, 0),
        active_(m_, 1) {
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
      const auto row = lp.constraints.row(i);
      double* dst = &t_[i * stride_];
      for (std::size_t j = 0; j < d_; ++j) dst[j] = sign * row[j];
      dst[d_] = sign * lp.rhs[i];
      basis_[i] = d_ + i;
    }
  }

  int iterations() const { return iterations_; }

  // Phase I: minimize the sum of artificials. Returns false if the system
  // is infeasible; otherwise drives remaining artificials out of the basis
  // and deactivates redundant rows.
  bool phase_one(double bscale) {
    std::fill(z_.begin(), z_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double* row = &t_[i * stride_];
      for (std::size_t j = 0; j <= d_; ++j) z_[j] -= row[j];
    }
    if (run() == Outcome::kUnbounded) {
      // The Phase-I objective is bounded below by zero.
      throw ConvergenceError("solve_lp: Phase I reported unbounded");
    }
    double infeas = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= d_) infeas += std::abs(t_[i * stride_ + d_]);
    }
    if (infeas > opts_.feasibility_tol * bscale) return false;

    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < d_) continue;
      const double* row = &t_[i * stride_];
      std::size_t best = d_;
      double best_mag = opts_.rank_tol;
      for (std::size_t j = 0; j < d_; ++j) {
        if (!is_basic_[j] && std::abs(row[j]) > best_mag) {
          best_mag = std::abs(row[j]);
          best = j;
        }
      }
      if (best < d_) {
        pivot(i, best);
      } else {
        active_[i] = 0;
      }
    }
    return true;
  }

  // Phase II on the true objective. Returns false if unbounded.
  bool phase_two(std::span<const double> cost) {
    for (std::size_t j = 0; j < d_; ++j) z_[j] = cost[j];
    z_[d_] = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * stride_];
      for (std::size_t j = 0; j <= d_; ++j) z_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) z_[basis_[i]] = 0.0;
    }
    degenerate_run_ = 0;
    bland_ = false;
    return run() == Outcome::kOptimal;
  }

  DenseVector basic_point() const {
    DenseVector x(d_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) x[basis_[i]] = std::max(0.0, t_[i * stride_ + d_]);
    }
    return x;
  }

  // Re-solves B x_B = b from the original data to remove the rounding
  // accumulated over the pivot sequence.
  void refine(const LinearProgram& lp, DenseVector& x) const {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) {
        rows.push_back(i);
        cols.push_back(basis_[i]);
      }
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    if (k == 0) return;
    Eigen::MatrixXd b(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) {
        b(r, c) = lp.constraints(rows[r], cols[c]);
      }
      rhs(r) = lp.rhs[rows[r]];
    }
    const Eigen::VectorXd xb = b.partialPivLu().solve(rhs);
    if (!xb.allFinite()) return;
    DenseVector candidate(d_, 0.0);
    for (Eigen::Index c = 0; c < k; ++c) {
      // Components at rounding level below zero are degenerate basics.
      candidate[cols[c]] = xb(c) < 0.0 && xb(c) > -1e-9 ? 0.0 : xb(c);
    }
    if (residual(lp, candidate) <= residual(lp, x)) x = std::move(candidate);
  }

  static double residual(const LinearProgram& lp, const DenseVector& x) {
    const DenseVector mx = lp.constraints.multiply(x);
    double r = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      r = std::max(r, std::abs(mx[i] - lp.rhs[i]));
    }
    return r;
  }

 private:
  enum class Outcome { kOptimal, kUnbounded };

  Outcome run() {
    for (;;) {
      const std::size_t q = entering();
      if (q == d_) return Outcome::kOptimal;
      const std::size_t r = leaving(q);
      if (r == m_) return Outcome::kUnbounded;
      if (++iterations_ > opts_.max_iterations) {
        throw ConvergenceError("solve_lp: iteration limit exceeded");
      }
      const double step = t_[r * stride_ + d_] / t_[r * stride_ + q];
      if (step <= 1e-12) {
        if (++degenerate_run_ > opts_.degenerate_run_limit) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }
      pivot(r, q);
    }
  }

  std::size_t entering() const {
    std::size_t best = d_;
    double best_val = -opts_.optimality_tol;
    for (std::size_t j = 0; j < d_; ++j) {
      if (is_basic_[j] || z_[j] >= best_val) continue;
      if (bland_) return j;
      best = j;
      best_val = z_[j];
    }
    return best;
  }

  std::size_t leaving(std::size_t q) const {
    std::size_t best = m_;
    double best_ratio = 0.0;
    double best_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double a = t_[i * stride_ + q];
      if (a <= opts_.pivot_tol) continue;
      const double ratio = std::max(0.0, t_[i * stride_ + d_]) / a;
      if (best == m_ || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
        best = i;
        best_ratio = ratio;
        best_pivot = a;
        continue;
      }
      if (ratio > best_ratio + 1e-12 * (1.0 + best_ratio)) continue;
      // Tie: Bland takes the lowest basis index; otherwise prefer
      // artificials, then the larger pivot.
      bool take;
      if (bland_) {
        take = basis_[i] < basis_[best];
      } else {
        const bool art_i = basis_[i] >= d_;
        const bool art_b = basis_[best] >= d_;
        take = art_i != art_b ? art_i : a > best_pivot;
      }
      if (take) {
        best = i;
        best_ratio = std::min(best_ratio, ratio);
        best_pivot = a;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &t_[r * stride_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j <= d_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      double* row = &t_[i * stride_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= d_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double f = z_[q];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= d_; ++j) z_[j] -= f * prow[j];
      z_[q] = 0.0;
    }
    if (basis_[r] < d_) is_basic_[basis_[r]] = 0;
    basis_[r] = q;
    is_basic_[q] = 1;
  }

  const SolverOptions& opts_;
  std::size_t m_;
  std::size_t d_;
  std::size_t stride_;
  std::vector<double> t_;
  std::vector<double> z_;
  std::vector<std::size_t> basis_;
  std::vector<char> is_basic_;
  std::vector<char> active_;
  int iterations_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

// Simplex tableau for the split problem min w'(u + v), A(u - v) = y.
// Only the u-half of B^{-1}[A, -A] is stored; a basic variable is a column
// index plus a sign (+1 for u_j, -1 for v_j).
class SplitTableau {
 public:
  SplitTableau(const DenseMatrix& a, std::span<const double> y,
               std::span<const double> weights, const SolverOptions& opts)
      : opts_(opts),
        w_(weights),
        m_(a.rows()),
        n_(a.cols()),
        stride_(n_ + 1),
        t_(m_ * stride_),
        g_(stride_, 0.0),
        basis_col_(m_, kNone),
        basis_sign_(m_, 1),
        col_row_(n_, kNone),
        active_(m_, 1),
        yscale_(1.0 + norm_inf(y)) {
    for (std::size_t i = 0; i < m_; ++i) {
      const auto row = a.row(i);
      std::copy(row.begin(), row.end(), &t_[i * stride_]);
      t_[i * stride_ + n_] = y[i];
    }
  }

  int iterations() const { return iterations_; }

  // Builds a nonsingular basis by elimination with partial pivoting,
  // trying the warm-start columns first, then flips signs so that every
  // basic value is nonnegative.
  void crash(std::span<const std::size_t> warm) {
    for (std::size_t j : warm) {
      if (j >= n_ || col_row_[j] != kNone) continue;
      std::size_t best = kNone;
      double best_mag = opts_.rank_tol;
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_col_[i] != kNone) continue;
        const double v = std::abs(t_[i * stride_ + j]);
        if (v > best_mag) {
          best_mag = v;
          best = i;
        }
      }
      if (best != kNone) eliminate(best, j);
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_col_[r] != kNone) continue;
      const double* row = &t_[r * stride_];
      std::size_t best = kNone;
      double best_mag = opts_.rank_tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (col_row_[j] == kNone && std::abs(row[j]) > best_mag) {
          best_mag = std::abs(row[j]);
          best = j;
        }
      }
      if (best != kNone) {
        eliminate(r, best);
      } else if (std::abs(row[n_]) > opts_.feasibility_tol * yscale_) {
        throw InfeasibleError("basis_pursuit: y is not in the column span of A");
      } else {
        active_[r] = 0;
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i] || t_[i * stride_ + n_] >= 0.0) continue;
      double* row = &t_[i * stride_];
      for (std::size_t j = 0; j <= n_; ++j) row[j] = -row[j];
      basis_sign_[i] = -1;
    }
    std::fill(g_.begin(), g_.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double cb = w_[basis_col_[i]];
      const double* row = &t_[i * stride_];
      for (std::size_t j = 0; j <= n_; ++j) g_[j] += cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) g_[basis_col_[i]] = basis_sign_[i] * w_[basis_col_[i]];
    }
  }

  void optimize() {
    for (;;) {
      const auto [j, s] = entering();
      if (j == kNone) return;
      const std::size_t r = leaving(j, s);
      if (r == kNone) {
        throw ConvergenceError("basis_pursuit: split LP reported unbounded");
      }
      if (++iterations_ > opts_.max_iterations) {
        throw ConvergenceError("basis_pursuit: iteration limit exceeded");
      }
      const double step = t_[r * stride_ + n_] / (s * t_[r * stride_ + j]);
      if (step <= 1e-12) {
        if (++degenerate_run_ > opts_.degenerate_run_limit) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }
      pivot(r, j, s);
    }
  }

  std::vector<std::size_t> basis_columns() const {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < m_; ++i) {
      if (active_[i]) cols.push_back(basis_col_[i]);
    }
    return cols;
  }

  // Basic solution, re-solved from (A, y) restricted to the basis. Columns
  // are taken in ascending order so the same basis always gives the same
  // bits, however it was reached.
  DenseVector solution(const DenseMatrix& a, std::span<const double> y) const {
    DenseVector z(n_, 0.0);
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      rows.push_back(i);
      cols.push_back(basis_col_[i]);
      z[basis_col_[i]] = basis_sign_[i] * std::max(0.0, t_[i * stride_ + n_]);
    }
    const auto k = static_cast<Eigen::Index>(rows.size());
    if (k == 0) return z;
    std::sort(cols.begin(), cols.end());
    Eigen::MatrixXd b(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) b(r, c) = a(rows[r], cols[c]);
      rhs(r) = y[rows[r]];
    }
    const Eigen::VectorXd zb = b.partialPivLu().solve(rhs);
    if (!zb.allFinite()) return z;
    DenseVector refined(n_, 0.0);
    for (Eigen::Index c = 0; c < k; ++c) refined[cols[c]] = zb(c);
    const double slack = 1e-12 * (1.0 + norm_inf(DenseVector(y.begin(), y.end())));
    return residual(a, y, refined) <= std::max(residual(a, y, z), slack) ? refined : z;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  static double residual(const DenseMatrix& a, std::span<const double> y,
                         const DenseVector& z) {
    const DenseVector az = a.multiply(z);
    double r = 0.0;
    for (std::size_t i = 0; i < az.size(); ++i) {
      r = std::max(r, std::abs(az[i] - y[i]));
    }
    return r;
  }

  // Reduced costs: u_j -> w_j - g_j, v_j -> w_j + g_j. Variables are
  // ordered u_0..u_{n-1}, v_0..v_{n-1} for both Dantzig ties and Bland.
  std::pair<std::size_t, int> entering() const {
    std::size_t best = kNone;
    int best_sign = 1;
    double best_val = -opts_.optimality_tol;
    for (int s : {1, -1}) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (col_row_[j] != kNone) continue;
        const double d = w_[j] - s * g_[j];
        if (d >= best_val) continue;
        if (bland_) return {j, s};
        best = j;
        best_sign = s;
        best_val = d;
      }
    }
    return {best, best_sign};
  }

  std::size_t variable_index(std::size_t row) const {
    return basis_sign_[row] > 0 ? basis_col_[row] : n_ + basis_col_[row];
  }

  std::size_t leaving(std::size_t j, int s) const {
    std::size_t best = kNone;
    double best_ratio = 0.0;
    double best_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!active_[i]) continue;
      const double e = s * t_[i * stride_ + j];
      if (e <= opts_.pivot_tol) continue;
      const double ratio = std::max(0.0, t_[i * stride_ + n_]) / e;
      const double slack = 1e-12 * (1.0 + best_ratio);
      if (best == kNone || ratio < best_ratio - slack) {
        best = i;
        best_ratio = ratio;
        best_pivot = e;
        continue;
      }
      if (ratio > best_ratio + slack) continue;
      const bool take = bland_ ? variable_index(i) < variable_index(best)
                               : e > best_pivot;
      if (take) {
        best = i;
        best_ratio = std::min(best_ratio, ratio);
        best_pivot = e;
      }
    }
    return best;
  }

  // Gauss-Jordan step used by the crash; reduced costs are rebuilt after.
  void eliminate(std::size_t r, std::size_t j) {
    double* prow = &t_[r * stride_];
    const double inv = 1.0 / prow[j];
    for (std::size_t k = 0; k <= n_; ++k) prow[k] *= inv;
    prow[j] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      double* row = &t_[i * stride_];
      const double f = row[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= n_; ++k) row[k] -= f * prow[k];
      row[j] = 0.0;
    }
    basis_col_[r] = j;
    basis_sign_[r] = 1;
    col_row_[j] = r;
    ++iterations_;
  }

  void pivot(std::size_t r, std::size_t j, int s) {
    const double dq = w_[j] - s * g_[j];
    double* prow = &t_[r * stride_];
    const double inv = 1.0 / (s * prow[j]);
    for (std::size_t k = 0; k <= n_; ++k) prow[k] *= inv;
    prow[j] = s;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || !active_[i]) continue;
      double* row = &t_[i * stride_];
      const double f = s * row[j];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= n_; ++k) row[k] -= f * prow[k];
      row[j] = 0.0;
    }
    for (std::size_t k = 0; k <= n_; ++k) g_[k] += dq * prow[k];
    col_row_[basis_col_[r]] = kNone;
    basis_col_[r] = j;
    basis_sign_[r] = s;
    col_row_[j] = r;
    g_[j] = s * w_[j];
  }

  const SolverOptions& opts_;
  std::span<const double> w_;
  std::size_t m_;
  std::size_t n_;
  std::size_t stride_;
  std::vector<double> t_;
  std::vector<double> g_;
  std::vector<std::size_t> basis_col_;
  std::vector<int> basis_sign_;
  std::vector<std::size_t> col_row_;
  std::vector<char> active_;
  double yscale_;
  int iterations_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
};

void validate(const LinearProgram& lp) {
  const auto m = lp.constraints.rows();
  const auto d = lp.constraints.cols();
  if (m == 0 || d == 0) throw DomainError("solve_lp: empty constraint matrix");
  if (lp.objective.size() != d || lp.rhs.size() != m) {
    throw DomainError("solve_lp: dimension mismatch");
  }
  auto finite = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  if (!finite(lp.objective) || !finite(lp.rhs) ||
      !finite(lp.constraints.entries())) {
    throw DomainError("solve_lp: non-finite data");
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& program,
                    const SolverOptions& options) {
  validate(program);
  Tableau tableau(program, options);
  LpSolution out;
  const double bscale = 1.0 + norm_inf(program.rhs);
  if (!tableau.phase_one(bscale)) {
    out.status = LpStatus::kInfeasible;
    out.iterations = tableau.iterations();
    return out;
  }
  if (!tableau.phase_two(program.objective)) {
    out.status = LpStatus::kUnbounded;
    out.iterations = tableau.iterations();
    return out;
  }
  DenseVector x = tableau.basic_point();
  tableau.refine(program, x);
  double value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) value += program.objective[j] * x[j];
  out.status = LpStatus::kOptimal;
  out.point = std::move(x);
  out.value = value;
  out.iterations = tableau.iterations();
  return out;
}

BasisPursuitResult basis_pursuit_detailed(
    const DenseMatrix& a, std::span<const double> y,
    std::span<const double> weights, std::span<const std::size_t> warm_basis,
    const SolverOptions& options) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0 || y.size() != m || weights.size() != n) {
    throw DomainError("basis_pursuit: dimension mismatch");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DomainError("basis_pursuit: weights must be positive and finite");
    }
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("basis_pursuit: non-finite y");
  }
  for (double v : a.entries()) {
    if (!std::isfinite(v)) throw DomainError("basis_pursuit: non-finite A");
  }

  SplitTableau tableau(a, y, weights, options);
  tableau.crash(warm_basis);
  tableau.optimize();

  BasisPursuitResult out;
  out.solution = tableau.solution(a, y);
  out.basis_columns = tableau.basis_columns();
  out.iterations = tableau.iterations();

  const DenseVector az = a.multiply(out.solution);
  double res = 0.0;
  for (std::size_t i = 0; i < m; ++i) res = std::max(res, std::abs(az[i] - y[i]));
  if (res > 1e-8 * (1.0 + norm_inf(y))) {
    throw ConvergenceError("basis_pursuit: residual " + std::to_string(res) +
                           " exceeds tolerance");
  }
  return out;
}

DenseVector basis_pursuit(const DenseMatrix& a, std::span<const double> y,
                          std::span<const double> weights,
                          const SolverOptions& options) {
  return basis_pursuit_detailed(a, y, weights, {}, options).solution;
}

}  // namespace rwl1::lp
