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

#include "rwl1/recovery.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rwl1/errors.h"
#include "rwl1/lpsolve.h"

namespace rwl1::recovery {
namespace {

constexpr std::string_view kNames[] = {"gaussian", "uniform", "rayleigh",
                                       "chi4",     "chi6",    "bpsk",
                                       "custom"};

double linf_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> support_weights(std::size_t n, const IndexSet& support,
                                    double omega) {
  std::vector<double> w(n, omega);
  for (std::size_t i : support) w.at(i) = 1.0;
  return w;
}

}  // namespace

std::string_view to_string(Distribution d) {
  return kNames[static_cast<int>(d)];
}

Distribution parse_distribution(std::string_view name) {
  for (int i = 0; i < static_cast<int>(std::size(kNames)); ++i) {
    if (kNames[i] == name) return static_cast<Distribution>(i);
  }
  throw DomainError("unknown distribution '" + std::string(name) + "'");
}

SparseSignal SparseSignal::from_values(DenseVector values,
                                       Distribution distribution) {
  SparseSignal s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) s.support.push_back(i);
  }
  s.sparsity_k = s.support.size();
  s.values = std::move(values);
  s.distribution = distribution;
  return s;
}

double relative_l2_error(std::span<const double> estimate,
                         std::span<const double> truth) {
  if (estimate.size() != truth.size()) {
    throw DomainError("relative_l2_error: size mismatch");
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    diff += d * d;
  }
  const double base = norm2(truth);
  return base > 0.0 ? std::sqrt(diff) / base : std::sqrt(diff);
}

DenseVector l1_minimize(const DenseMatrix& a, std::span<const double> y) {
  return lp::basis_pursuit(a, y, std::vector<double>(a.cols(), 1.0));
}

IndexSet k_support(std::span<const double> v, std::size_t k) {
  if (k < 1 || k > v.size()) {
    throw DomainError("k_support: k must satisfy 1 <= k <= n");
  }
  IndexSet idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DenseVector weighted_l1_minimize(const DenseMatrix& a, std::span<const double> y,
                                 const IndexSet& support, double omega) {
  return lp::basis_pursuit(a, y, support_weights(a.cols(), support, omega));
}

std::vector<RecoveryOutcome> two_step_recover_multi(
    const DenseMatrix& a, std::span<const double> y, std::size_t k,
    std::span<const double> omegas, double success_tol,
    std::optional<std::span<const double>> truth) {
  const std::size_t n = a.cols();
  if (k < 1 || k > n) throw DomainError("two_step_recover: k out of range");
  for (double omega : omegas) {
    if (!(omega >= 1.0) || !std::isfinite(omega)) {
      throw DomainError("two_step_recover: omega must be >= 1");
    }
  }
  if (truth && truth->size() != n) {
    throw DomainError("two_step_recover: truth has wrong length");
  }

  const auto first =
      lp::basis_pursuit_detailed(a, y, std::vector<double>(n, 1.0));
  const IndexSet support = k_support(first.solution, k);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double first_err =
      truth ? relative_l2_error(first.solution, *truth) : nan;

  std::vector<RecoveryOutcome> out;
  out.reserve(omegas.size());
  for (double omega : omegas) {
    RecoveryOutcome r;
    r.first_pass = first.solution;
    r.approx_support = support;
    r.omega = omega;
    // At omega = 1 the weighted program is the first one verbatim, and the
    // solver is deterministic. Otherwise warm-start from the first basis.
    r.final = omega == 1.0
                  ? first.solution
                  : lp::basis_pursuit_detailed(a, y, support_weights(n, support, omega),
                                               first.basis_columns)
                        .solution;
    r.first_pass_l2_rel_error = first_err;
    r.l2_rel_error = truth ? relative_l2_error(r.final, *truth) : nan;
    r.linf_error = truth ? linf_diff(r.final, *truth) : nan;
    r.first_pass_success = first_err <= success_tol;
    r.success = r.l2_rel_error <= success_tol;
    out.push_back(std::move(r));
  }
  return out;
}

RecoveryOutcome two_step_recover(const DenseMatrix& a, std::span<const double> y,
                                 std::size_t k, double omega, double success_tol,
                                 std::optional<std::span<const double>> truth) {
  const double omegas[] = {omega};
  return std::move(two_step_recover_multi(a, y, k, omegas, success_tol, truth).front());
}

std::size_t w_of(const SparseSignal& x, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("w_of: lambda must be >= 0");
  std::vector<double> mags;
  for (double v : x.values) {
    if (v != 0.0) mags.push_back(std::abs(v));
  }
  std::sort(mags.begin(), mags.end());
  double running = 0.0;
  std::size_t count = 0;
  for (double m : mags) {
    running += m;
    if (running > lambda) break;
    ++count;
  }
  return count;
}

OverlapReport overlap_report(const SparseSignal& x,
                             std::span<const double> x_hat) {
  const std::size_t k = x.sparsity_k;
  if (k < 1) throw DomainError("overlap_report: signal must have k >= 1");
  if (x_hat.size() != x.values.size()) {
    throw DomainError("overlap_report: size mismatch");
  }
  const IndexSet l = k_support(x_hat, k);
  OverlapReport r;
  for (std::size_t i : l) {
    if (x.values[i] != 0.0) ++r.overlap_count;
  }
  r.overlap_fraction = static_cast<double>(r.overlap_count) / static_cast<double>(k);
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    r.l1_error += std::abs(x.values[i] - x_hat[i]);
  }
  r.w_at_error = w_of(x, r.l1_error);
  r.lemma1_lower_bound = k - r.w_at_error;
  if (r.overlap_count < r.lemma1_lower_bound) {
    throw std::logic_error("overlap_report: |K n L| below k - W(x, ||x - x_hat||_1)");
  }
  return r;
}

}  // namespace rwl1::recovery
