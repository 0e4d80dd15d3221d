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

#include "rwl1/harness.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "rwl1/errors.h"

namespace rwl1::harness {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double nonzero_normal(Engine& rng) {
  boost::random::normal_distribution<double> normal;
  for (;;) {
    const double v = normal(rng);
    if (v != 0.0) return v;
  }
}

// Uniform on (0, 1].
double open_unit(Engine& rng) {
  boost::random::uniform_01<double> u;
  return 1.0 - u(rng);
}

double chi(Engine& rng, int dof) {
  boost::random::normal_distribution<double> normal;
  double s = 0.0;
  for (int i = 0; i < dof; ++i) {
    const double v = normal(rng);
    s += v * v;
  }
  return s > 0.0 ? std::sqrt(s) : chi(rng, dof);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw DomainError("config: bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

std::vector<std::size_t> parse_k_grid(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw DomainError("config: k_grid range is lo:hi:step");
    const auto lo = parse_number<std::size_t>("k_grid", parts[0]);
    const auto hi = parse_number<std::size_t>("k_grid", parts[1]);
    const auto step = parse_number<std::size_t>("k_grid", parts[2]);
    if (step == 0) throw DomainError("config: k_grid step must be positive");
    for (std::size_t k = lo; k <= hi; k += step) out.push_back(k);
    return out;
  }
  for (const auto& p : split(text, ',')) {
    out.push_back(parse_number<std::size_t>("k_grid", p));
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t k,
                             std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(seed) ^ k) ^ trial);
}

recovery::SparseSignal generate_signal(std::size_t n, std::size_t k,
                                       Distribution distribution, Engine& rng) {
  if (k > n) throw DomainError("generate_signal: k must not exceed n");
  if (distribution == Distribution::kCustom) {
    throw DomainError("generate_signal: no generator for 'custom'");
  }
  // Partial Fisher-Yates for a uniform k-subset.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  DenseVector values(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double mag = 0.0;
    switch (distribution) {
      case Distribution::kGaussian: mag = std::abs(nonzero_normal(rng)); break;
      case Distribution::kUniform: mag = open_unit(rng); break;
      case Distribution::kRayleigh: mag = std::sqrt(-2.0 * std::log(open_unit(rng))); break;
      case Distribution::kChi4: mag = chi(rng, 4); break;
      case Distribution::kChi6: mag = chi(rng, 6); break;
      case Distribution::kBpsk: mag = 1.0; break;
      case Distribution::kCustom: break;
    }
    // Rayleigh can return exactly 0 only when U == 1.
    if (mag == 0.0) mag = std::numeric_limits<double>::min();
    const bool negative = (rng() >> 63) != 0;
    values[idx[i]] = negative ? -mag : mag;
  }
  return recovery::SparseSignal::from_values(std::move(values), distribution);
}

DenseMatrix generate_matrix(std::size_t m, std::size_t n, Engine& rng) {
  boost::random::normal_distribution<double> normal;
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  return a;
}

void validate(const ExperimentConfig& c) {
  if (c.n < 2 || c.m < 1 || c.m >= c.n) {
    throw DomainError("config: need 1 <= m < n");
  }
  if (c.k_grid.empty()) throw DomainError("config: k_grid is empty");
  for (std::size_t k : c.k_grid) {
    if (k < 1 || k > c.m) throw DomainError("config: every k must satisfy 1 <= k <= m");
  }
  if (c.trials_per_k < 1) throw DomainError("config: trials_per_k must be >= 1");
  if (c.distribution == Distribution::kCustom) {
    throw DomainError("config: distribution 'custom' cannot be sampled");
  }
  if (c.run_two_step && c.omegas.empty()) {
    throw DomainError("config: two_step requires at least one omega");
  }
  for (double w : c.omegas) {
    if (!(w >= 1.0) || !std::isfinite(w)) throw DomainError("config: omega must be >= 1");
  }
  if (!(c.success_tol > 0.0)) throw DomainError("config: success_tol must be > 0");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n") {
      c.n = parse_number<std::size_t>(key, value);
    } else if (key == "m") {
      c.m = parse_number<std::size_t>(key, value);
    } else if (key == "k_grid") {
      c.k_grid = parse_k_grid(value);
    } else if (key == "distribution") {
      c.distribution = recovery::parse_distribution(value);
    } else if (key == "omega") {
      c.omegas.clear();
      for (const auto& p : split(value, ',')) c.omegas.push_back(parse_number<double>(key, p));
    } else if (key == "trials_per_k") {
      c.trials_per_k = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "success_tol") {
      c.success_tol = parse_number<double>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(key, value);
    } else if (key == "algorithms") {
      bool plain = false;
      c.run_two_step = false;
      for (const auto& a : split(value, ',')) {
        if (a == "plain_l1") {
          plain = true;
        } else if (a == "two_step") {
          c.run_two_step = true;
        } else {
          throw DomainError("config: unknown algorithm '" + a + "'");
        }
      }
      if (!plain && !c.run_two_step) throw DomainError("config: no algorithm selected");
    } else {
      throw DomainError("config: unknown key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open '" + path + "'");
  return parse_config(in);
}

std::optional<double> estimate_crossover(
    const std::vector<std::pair<double, double>>& rates) {
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    const auto [k0, r0] = rates[i];
    const auto [k1, r1] = rates[i + 1];
    if (r0 >= 0.5 && r1 < 0.5) {
      return k0 + (r0 - 0.5) / (r0 - r1) * (k1 - k0);
    }
  }
  return std::nullopt;
}

const OmegaSweep& SweepResult::best_omega() const {
  if (by_omega.empty()) throw DomainError("best_omega: empty sweep");
  auto key = [](const OmegaSweep& s) {
    return s.crossover_two_step.value_or(std::numeric_limits<double>::infinity());
  };
  const OmegaSweep* best = &by_omega.front();
  for (const auto& s : by_omega) {
    if (key(s) > key(*best)) best = &s;
  }
  return *best;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  validate(config);
  const std::vector<double> omegas =
      config.run_two_step ? config.omegas : std::vector<double>{};
  const std::size_t per_trial = std::max<std::size_t>(1, omegas.size());
  const std::size_t tasks = config.k_grid.size() * config.trials_per_k;

  SweepResult result;
  result.config = config;
  result.trials.resize(tasks * per_trial);

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      const std::size_t k = config.k_grid[task / config.trials_per_k];
      const std::size_t trial = task % config.trials_per_k;
      TrialRecord* slot = &result.trials[task * per_trial];
      for (std::size_t o = 0; o < per_trial; ++o) {
        slot[o].k = k;
        slot[o].trial_index = trial;
        slot[o].omega = omegas.empty() ? 1.0 : omegas[o];
      }
      try {
        Engine rng(substream_seed(config.seed, k, trial));
        const DenseMatrix a = generate_matrix(config.m, config.n, rng);
        const auto x = generate_signal(config.n, k, config.distribution, rng);
        const DenseVector y = a.multiply(x.values);
        const std::vector<double> first_only = {1.0};
        const auto outcomes = recovery::two_step_recover_multi(
            a, y, k, omegas.empty() ? std::span<const double>(first_only) : omegas,
            config.success_tol, std::span<const double>(x.values));
        const auto overlap = recovery::overlap_report(x, outcomes.front().first_pass);
        for (std::size_t o = 0; o < per_trial; ++o) {
          slot[o].success_plain = outcomes[o].first_pass_success;
          slot[o].success_two_step = !omegas.empty() && outcomes[o].success;
          slot[o].overlap_fraction = overlap.overlap_fraction;
          slot[o].l1_error_first_pass = overlap.l1_error;
        }
      } catch (const std::exception& e) {
        ++failures;
        for (std::size_t o = 0; o < per_trial; ++o) slot[o].solver_failed = true;
        std::clog << "run_sweep: k=" << k << " trial=" << trial
                  << " counted as failure: " << e.what() << '\n';
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  result.solver_failures = failures;

  // Ordered reduction by (k, trial).
  for (std::size_t o = 0; o < per_trial; ++o) {
    OmegaSweep sweep;
    sweep.omega = omegas.empty() ? 1.0 : omegas[o];
    std::vector<std::pair<double, double>> plain_rates;
    std::vector<std::pair<double, double>> two_step_rates;
    for (std::size_t ki = 0; ki < config.k_grid.size(); ++ki) {
      RatePoint p;
      p.k = config.k_grid[ki];
      for (std::size_t t = 0; t < config.trials_per_k; ++t) {
        const TrialRecord& r =
            result.trials[(ki * config.trials_per_k + t) * per_trial + o];
        p.rate_plain += r.success_plain;
        p.rate_two_step += r.success_two_step;
        p.mean_overlap += r.overlap_fraction;
      }
      const double trials = static_cast<double>(config.trials_per_k);
      p.rate_plain /= trials;
      p.rate_two_step /= trials;
      p.mean_overlap /= trials;
      plain_rates.emplace_back(static_cast<double>(p.k), p.rate_plain);
      two_step_rates.emplace_back(static_cast<double>(p.k), p.rate_two_step);
      sweep.per_k.push_back(p);
    }
    sweep.crossover_plain = estimate_crossover(plain_rates);
    if (!omegas.empty()) sweep.crossover_two_step = estimate_crossover(two_step_rates);
    result.by_omega.push_back(std::move(sweep));
  }
  return result;
}

void write_trial_log(std::ostream& out, const SweepResult& r) {
  const auto dist = recovery::to_string(r.config.distribution);
  out << "distribution,n,m,k,trial,omega,success_plain,success_two_step,"
         "overlap_fraction,l1_error\n";
  for (const auto& t : r.trials) {
    out << dist << ',' << r.config.n << ',' << r.config.m << ',' << t.k << ','
        << t.trial_index << ',' << format_double(t.omega) << ','
        << int{t.success_plain} << ',' << int{t.success_two_step} << ','
        << format_double(t.overlap_fraction) << ','
        << format_double(t.l1_error_first_pass) << '\n';
  }
}

void write_summary(std::ostream& out, const SweepResult& r) {
  const auto dist = recovery::to_string(r.config.distribution);
  out << "distribution,n,m,omega,k,rate_plain,rate_two_step,mean_overlap\n";
  for (const auto& s : r.by_omega) {
    for (const auto& p : s.per_k) {
      out << dist << ',' << r.config.n << ',' << r.config.m << ','
          << format_double(s.omega) << ',' << p.k << ','
          << format_double(p.rate_plain) << ',' << format_double(p.rate_two_step)
          << ',' << format_double(p.mean_overlap) << '\n';
    }
  }
}

}  // namespace rwl1::harness
