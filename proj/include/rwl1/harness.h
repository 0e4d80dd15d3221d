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

// Monte Carlo recovery experiments: seeded problem generation, sweeps over
// sparsity, success-rate aggregation and 50% crossover estimation.

#ifndef RWL1_HARNESS_H_
#define RWL1_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rwl1/dense.h"
#include "rwl1/recovery.h"

namespace rwl1::harness {

using Engine = std::mt19937_64;
using recovery::Distribution;

// Seed of the independent stream for (seed, k, trial). Streams never depend
// on execution order, so sweeps are reproducible under any thread count.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k,
                             std::uint64_t trial);

// k-sparse signal with a uniformly random support. Magnitudes follow the
// named law (uniform on (0,1], Rayleigh with unit scale, chi with 4 or 6
// degrees of freedom, |N(0,1)|, or 1 for bpsk), each with an independent
// random sign. DomainError for k > n or the custom tag.
recovery::SparseSignal generate_signal(std::size_t n, std::size_t k,
                                       Distribution distribution, Engine& rng);

// m x n matrix with iid N(0,1) entries.
DenseMatrix generate_matrix(std::size_t m, std::size_t n, Engine& rng);

struct ExperimentConfig {
  std::size_t n = 200;
  std::size_t m = 112;
  std::vector<std::size_t> k_grid;
  Distribution distribution = Distribution::kGaussian;
  std::vector<double> omegas = {2.0, 3.0, 5.0, 10.0};
  std::size_t trials_per_k = 200;
  std::uint64_t seed = 1;
  double success_tol = recovery::kDefaultSuccessTol;
  bool run_two_step = true;  // algorithms: plain_l1 always, two_step optional
  unsigned threads = 0;      // 0: hardware concurrency
};

// Throws DomainError listing the first violated invariant.
void validate(const ExperimentConfig& config);

// Flat "key = value" text, one per line; '#' starts a comment. Keys: n, m,
// k_grid (comma list or lo:hi:step), distribution, omega (comma list),
// trials_per_k, seed, success_tol, algorithms (plain_l1[,two_step]),
// threads. Unknown keys and malformed values raise DomainError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  std::size_t k = 0;
  std::size_t trial_index = 0;
  double omega = 0.0;
  bool success_plain = false;
  bool success_two_step = false;
  double overlap_fraction = 0.0;
  double l1_error_first_pass = 0.0;
  bool solver_failed = false;

  bool operator==(const TrialRecord&) const = default;
};

struct RatePoint {
  std::size_t k = 0;
  double rate_plain = 0.0;
  double rate_two_step = 0.0;
  double mean_overlap = 0.0;
};

struct OmegaSweep {
  double omega = 0.0;
  std::vector<RatePoint> per_k;
  std::optional<double> crossover_plain;
  std::optional<double> crossover_two_step;
};

struct SweepResult {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;  // ordered by (k, trial, omega)
  std::vector<OmegaSweep> by_omega;
  std::size_t solver_failures = 0;

  // Sweep whose two-step crossover is largest (absent crossovers, meaning
  // the rate never fell below 1/2, rank highest).
  const OmegaSweep& best_omega() const;
};

SweepResult run_sweep(const ExperimentConfig& config);

// First downward crossing of 1/2, linearly interpolated between grid points.
// `rates` are (k, rate) pairs sorted by k.
std::optional<double> estimate_crossover(
    const std::vector<std::pair<double, double>>& rates);

// distribution,n,m,k,trial,omega,success_plain,success_two_step,overlap_fraction,l1_error
void write_trial_log(std::ostream& out, const SweepResult& result);
// distribution,n,m,omega,k,rate_plain,rate_two_step,mean_overlap
void write_summary(std::ostream& out, const SweepResult& result);

}  // namespace rwl1::harness

#endif  // RWL1_HARNESS_H_
