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

// Sparse recovery: plain and weighted l1 minimization, the two-step
// reweighted algorithm, and support-overlap diagnostics.

#ifndef RWL1_RECOVERY_H_
#define RWL1_RECOVERY_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwl1/dense.h"

namespace rwl1::recovery {

using IndexSet = std::vector<std::size_t>;  // sorted ascending

enum class Distribution {
  kGaussian,
  kUniform,
  kRayleigh,
  kChi4,
  kChi6,
  kBpsk,
  kCustom,
};

std::string_view to_string(Distribution d);
// Accepts the lower-case names printed by to_string. DomainError otherwise.
Distribution parse_distribution(std::string_view name);

struct SparseSignal {
  DenseVector values;
  std::size_t sparsity_k = 0;
  IndexSet support;
  Distribution distribution = Distribution::kCustom;

  // Derives support and sparsity from the nonzero entries.
  static SparseSignal from_values(DenseVector values,
                                  Distribution distribution = Distribution::kCustom);
};

// Default "perfect recovery" threshold on ||x* - x||_2 / ||x||_2.
inline constexpr double kDefaultSuccessTol = 1e-4;

struct RecoveryOutcome {
  DenseVector first_pass;   // x_hat
  IndexSet approx_support;  // L, |L| = k
  DenseVector final;        // x*
  double omega = 1.0;
  // Errors against the true signal; NaN when no truth was supplied.
  double first_pass_l2_rel_error;
  double l2_rel_error;
  double linf_error;
  bool first_pass_success = false;
  bool success = false;
};

struct OverlapReport {
  std::size_t overlap_count = 0;   // |K n L|
  double overlap_fraction = 0.0;   // |K n L| / k
  double l1_error = 0.0;           // ||x - x_hat||_1
  std::size_t w_at_error = 0;      // W(x, ||x - x_hat||_1)
  std::size_t lemma1_lower_bound = 0;  // k - w_at_error
};

// Unit-weight basis pursuit.
DenseVector l1_minimize(const DenseMatrix& a, std::span<const double> y);

// Indices of the k largest |v_i|, ties toward the lower index, returned in
// ascending order. DomainError unless 1 <= k <= v.size().
IndexSet k_support(std::span<const double> v, std::size_t k);

// min ||z_L||_1 + omega ||z_Lbar||_1 subject to A z = y.
DenseVector weighted_l1_minimize(const DenseMatrix& a, std::span<const double> y,
                                 const IndexSet& support, double omega);

// Runs the first pass, takes L = k_support(x_hat, k), and solves the
// weighted pass for each omega (sharing the first pass). Errors and success
// flags are filled when `truth` is given.
std::vector<RecoveryOutcome> two_step_recover_multi(
    const DenseMatrix& a, std::span<const double> y, std::size_t k,
    std::span<const double> omegas, double success_tol,
    std::optional<std::span<const double>> truth = std::nullopt);

RecoveryOutcome two_step_recover(
    const DenseMatrix& a, std::span<const double> y, std::size_t k,
    double omega, double success_tol = kDefaultSuccessTol,
    std::optional<std::span<const double>> truth = std::nullopt);

// Size of the largest subset of the support whose l1 norm is <= lambda.
std::size_t w_of(const SparseSignal& x, double lambda);

// Support overlap of k_support(x_hat, k) with supp(x) and the matching
// lower bound k - W(x, ||x - x_hat||_1). Throws std::logic_error if the
// bound is ever violated.
OverlapReport overlap_report(const SparseSignal& x,
                             std::span<const double> x_hat);

double relative_l2_error(std::span<const double> estimate,
                         std::span<const double> truth);

}  // namespace rwl1::recovery

#endif  // RWL1_RECOVERY_H_
