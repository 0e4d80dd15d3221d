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

#include "rwl1/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rwl1/errors.h"
#include "rwl1/harness.h"
#include "rwl1/recovery.h"
#include "rwl1/thresholds.h"

namespace rwl1::cli {
namespace {

using recovery::Distribution;

// Bad input files and similar; reported with the usage exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      double v = 0.0;
      std::size_t used = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw InputError(path + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
      }
      out.push_back(v);
    }
  }
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << std::setprecision(17);
  return f;
}

// ---- recover ---------------------------------------------------------------

struct RecoverArgs {
  bool synthetic = false;
  std::string input;
  std::size_t n = 200;
  std::size_t m = 112;
  std::size_t k = 0;
  std::string distribution = "gaussian";
  std::uint64_t seed = 1;
  double omega = 0.0;
  double success_tol = recovery::kDefaultSuccessTol;
  std::string output_prefix;
};

struct Problem {
  DenseMatrix a;
  DenseVector y;
  std::optional<recovery::SparseSignal> truth;
  std::string label;
};

Problem load_problem(const RecoverArgs& r) {
  if (r.synthetic) {
    const auto dist = recovery::parse_distribution(r.distribution);
    if (r.k > r.n) throw DomainError("--k must not exceed --n");
    // Same stream as trial 0 of a sweep at this k.
    harness::Engine rng(harness::substream_seed(r.seed, r.k, 0));
    Problem p{harness::generate_matrix(r.m, r.n, rng), {}, {}, {}};
    p.truth = harness::generate_signal(r.n, r.k, dist, rng);
    p.y = p.a.multiply(p.truth->values);
    p.label = "synthetic n=" + std::to_string(r.n) + " m=" + std::to_string(r.m) +
              " k=" + std::to_string(r.k) + " distribution=" + r.distribution +
              " seed=" + std::to_string(r.seed);
    return p;
  }
  const auto v = read_numbers(r.input);
  if (v.size() < 2 || v[0] < 1 || v[1] < 1 || v[0] != std::floor(v[0]) ||
      v[1] != std::floor(v[1])) {
    throw InputError(r.input + ": expected 'm n' header");
  }
  const auto m = static_cast<std::size_t>(v[0]);
  const auto n = static_cast<std::size_t>(v[1]);
  const std::size_t base = 2 + m * n + m;
  if (v.size() != base && v.size() != base + n) {
    throw InputError(r.input + ": expected " + std::to_string(base - 2) + " or " +
                     std::to_string(base - 2 + n) + " values after the header, got " +
                     std::to_string(v.size() - 2));
  }
  Problem p{DenseMatrix(m, n, DenseVector(v.begin() + 2, v.begin() + 2 + m * n)),
            DenseVector(v.begin() + 2 + m * n, v.begin() + base),
            {},
            {}};
  if (v.size() > base) {
    p.truth = recovery::SparseSignal::from_values(DenseVector(v.begin() + base, v.end()));
  }
  if (r.k > n) throw DomainError("--k must not exceed n");
  p.label = r.input + " (m=" + std::to_string(m) + " n=" + std::to_string(n) + ")";
  return p;
}

int cmd_recover(const RecoverArgs& r, std::ostream& out) {
  if (r.k < 1) throw DomainError("--k must be >= 1");
  if (!(r.omega >= 1.0)) throw DomainError("--omega must be >= 1");
  if (!(r.success_tol > 0.0)) throw DomainError("--success-tol must be > 0");
  const Problem p = load_problem(r);
  std::optional<std::span<const double>> truth;
  if (p.truth) truth = std::span<const double>(p.truth->values);
  const auto o = recovery::two_step_recover(p.a, p.y, r.k, r.omega, r.success_tol, truth);

  out << "instance: " << p.label << '\n';
  out << "k: " << r.k << '\n';
  out << "omega: " << fmt(r.omega) << '\n';
  if (p.truth) {
    out << "first_pass: success=" << yes_no(o.first_pass_success)
        << " l2_rel_error=" << fmt(o.first_pass_l2_rel_error) << '\n';
    out << "two_step: success=" << yes_no(o.success) << " l2_rel_error=" << fmt(o.l2_rel_error)
        << " linf_error=" << fmt(o.linf_error) << '\n';
    if (p.truth->sparsity_k > 0) {
      const auto ov = recovery::overlap_report(*p.truth, o.first_pass);
      out << "support_overlap: " << ov.overlap_count << '/' << p.truth->sparsity_k
          << " fraction=" << fmt(ov.overlap_fraction) << " l1_error=" << fmt(ov.l1_error)
          << " W=" << ov.w_at_error << " lower_bound=" << ov.lemma1_lower_bound << '\n';
    }
  } else {
    out << "first_pass: l1_norm=" << fmt(norm1(o.first_pass)) << '\n';
    out << "two_step: l1_norm=" << fmt(norm1(o.final)) << '\n';
  }
  out << "final_equals_first_pass: " << yes_no(o.final == o.first_pass) << '\n';

  if (!r.output_prefix.empty()) {
    auto xh = open_output(r.output_prefix + "_xhat.txt");
    for (double v : o.first_pass) xh << v << '\n';
    auto sup = open_output(r.output_prefix + "_support.txt");
    for (auto i : o.approx_support) sup << i << '\n';
    auto xs = open_output(r.output_prefix + "_xstar.txt");
    for (double v : o.final) xs << v << '\n';
  }
  return kExitOk;
}

// ---- threshold / weak-threshold / theorem3 ---------------------------------

struct ThresholdArgs {
  std::optional<double> gamma1;
  std::optional<double> f1;
  std::optional<double> f2;
  std::optional<double> omega;
  std::string batch;
  std::string counting = "fixed";
  int grid = 400;
  double tol = 1e-4;
  std::string output;
};

thresholds::DeltaCOptions delta_options(int grid, double tol) {
  thresholds::DeltaCOptions o;
  o.grid_resolution = grid;
  o.bisection_tol = tol;
  return o;
}

std::vector<thresholds::ThresholdQuery> read_batch(const std::string& path,
                                                   thresholds::SupportCounting counting) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("gamma1,f1,f2,omega", 0) != 0) {
    throw InputError(path + ": header must be gamma1,f1,f2,omega");
  }
  std::vector<thresholds::ThresholdQuery> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) {
      std::size_t used = 0;
      double x = 0.0;
      try {
        x = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0) throw InputError(path + ":" + std::to_string(lineno) + ": bad number");
      v.push_back(x);
    }
    if (v.size() != 4) throw InputError(path + ":" + std::to_string(lineno) + ": need 4 columns");
    out.push_back(thresholds::ThresholdQuery::make(v[0], v[1], v[2], v[3], counting));
  }
  return out;
}

int cmd_threshold(const ThresholdArgs& t, std::ostream& out) {
  const auto counting = t.counting == "all" ? thresholds::SupportCounting::kAllSupports
                                            : thresholds::SupportCounting::kFixedSupport;
  std::vector<thresholds::ThresholdQuery> queries;
  if (!t.batch.empty()) {
    if (t.gamma1 || t.f1 || t.f2 || t.omega) {
      throw DomainError("--batch cannot be combined with --gamma1/--f1/--f2/--omega");
    }
    queries = read_batch(t.batch, counting);
  } else {
    if (!t.gamma1 || !t.f1 || !t.f2 || !t.omega) {
      throw DomainError("--gamma1, --f1, --f2 and --omega are required without --batch");
    }
    queries.push_back(thresholds::ThresholdQuery::make(*t.gamma1, *t.f1, *t.f2, *t.omega, counting));
  }
  const auto opts = delta_options(t.grid, t.tol);
  std::vector<thresholds::ThresholdRow> rows;
  for (const auto& q : queries) rows.push_back({q, thresholds::delta_c(q, opts).delta_c});
  if (t.output.empty()) {
    thresholds::write_threshold_csv(out, rows);
  } else {
    auto f = open_output(t.output);
    thresholds::write_threshold_csv(f, rows);
  }
  return kExitOk;
}

int cmd_weak_threshold(double delta, double tol, int grid, std::optional<std::size_t> n,
                       std::ostream& out) {
  const double mu = thresholds::weak_threshold(delta, tol, delta_options(grid, tol));
  out << "delta,mu_w" << (n ? ",k" : "") << '\n';
  out << fmt(delta) << ',' << fmt(mu);
  if (n) out << ',' << fmt(mu * static_cast<double>(*n));
  out << '\n';
  return kExitOk;
}

int cmd_theorem3(double delta, const std::vector<double>& omegas, double tol, int grid,
                 std::ostream& out) {
  out << "delta,omega,mu_w,delta_c,margin,pass\n";
  for (double w : omegas) {
    const auto r = thresholds::theorem3_check(delta, w, delta_options(grid, tol));
    out << fmt(delta) << ',' << fmt(w) << ',' << fmt(r.mu_w) << ',' << fmt(r.delta_c) << ','
        << fmt(r.margin) << ',' << (r.pass ? "pass" : "fail") << '\n';
  }
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;
  std::string out_dir = ".";
};

int cmd_sweep(const SweepArgs& s, std::ostream& out) {
  // Inline flags are appended as config lines, so they override the file.
  std::stringstream text;
  if (!s.config.empty()) {
    std::ifstream in(s.config);
    if (!in) throw InputError("cannot open '" + s.config + "'");
    text << in.rdbuf() << '\n';
  }
  for (const auto& [key, value] : s.overrides) text << key << " = " << value << '\n';
  const auto config = harness::parse_config(text);

  const auto result = harness::run_sweep(config);
  std::filesystem::create_directories(s.out_dir);
  const auto dir = std::filesystem::path(s.out_dir);
  {
    auto f = open_output((dir / "trials.csv").string());
    harness::write_trial_log(f, result);
  }
  {
    auto f = open_output((dir / "summary.csv").string());
    harness::write_summary(f, result);
  }
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); };
  out << "omega,crossover_plain,crossover_two_step\n";
  for (const auto& w : result.by_omega) {
    out << fmt(w.omega) << ',' << opt(w.crossover_plain) << ','
        << (config.run_two_step ? opt(w.crossover_two_step) : std::string("n/a")) << '\n';
  }
  if (config.run_two_step) out << "best_omega: " << fmt(result.best_omega().omega) << '\n';
  out << "solver_failures: " << result.solver_failures << '\n';
  out << "wrote: " << (dir / "trials.csv").string() << ' ' << (dir / "summary.csv").string()
      << '\n';
  return kExitOk;
}

// ---- overlap ---------------------------------------------------------------

struct OverlapArgs {
  std::size_t n = 200;
  std::size_t m = 112;
  std::size_t k = 0;
  std::string distribution = "gaussian";
  std::uint64_t seed = 1;
  std::size_t trials = 1;
};

int cmd_overlap(const OverlapArgs& a, std::ostream& out) {
  if (a.k < 1 || a.k > a.n) throw DomainError("--k must satisfy 1 <= k <= n");
  if (a.m < 1 || a.trials < 1) throw DomainError("--m and --trials must be >= 1");
  const auto dist = recovery::parse_distribution(a.distribution);
  out << "trial,k,overlap_count,overlap_fraction,l1_error,w_at_error,lower_bound\n";
  for (std::size_t t = 0; t < a.trials; ++t) {
    harness::Engine rng(harness::substream_seed(a.seed, a.k, t));
    const auto mat = harness::generate_matrix(a.m, a.n, rng);
    const auto x = harness::generate_signal(a.n, a.k, dist, rng);
    const auto xh = recovery::l1_minimize(mat, mat.multiply(x.values));
    const auto r = recovery::overlap_report(x, xh);
    out << t << ',' << a.k << ',' << r.overlap_count << ',' << fmt(r.overlap_fraction) << ','
        << fmt(r.l1_error) << ',' << r.w_at_error << ',' << r.lemma1_lower_bound << '\n';
  }
  return kExitOk;
}

const char* kDistributions = "gaussian, uniform, rayleigh, chi4, chi6 or bpsk";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-step reweighted l1 sparse recovery and weighted-l1 phase transitions."};
  app.name("rwl1");
  app.require_subcommand(1);
  app.set_version_flag("--version", "rwl1 0.1.0");

  // recover
  RecoverArgs rec;
  auto* recover = app.add_subcommand(
      "recover",
      "Two-step recovery of one instance. Step 1 solves x_hat = argmin ||z||_1 s.t. "
      "Az = y; step 2 takes L = indices of the k largest |x_hat_i|; step 3 solves "
      "x* = argmin ||z_L||_1 + omega ||z_Lbar||_1 s.t. Az = y.");
  recover->add_flag("--synthetic", rec.synthetic,
                    "Generate A (iid N(0,1)) and a k-sparse x from --n/--m/--k/--distribution/"
                    "--seed instead of reading --input");
  recover->add_option("--input", rec.input,
                      "Text file: 'm n', then the m x n entries of A row by row, then the m "
                      "entries of y, then optionally the n entries of the true x. '#' starts a "
                      "comment")
      ->check(CLI::ExistingFile);
  recover->add_option("--n", rec.n, "Signal length (synthetic)")->capture_default_str();
  recover->add_option("--m", rec.m, "Number of measurements (synthetic)")->capture_default_str();
  recover->add_option("--k", rec.k, "Sparsity used for the support estimate L")->required();
  recover->add_option("--distribution", rec.distribution,
                      std::string("Magnitude law for synthetic signals: ") + kDistributions)
      ->capture_default_str();
  recover->add_option("--seed", rec.seed, "Seed for the synthetic instance")->capture_default_str();
  recover->add_option("--omega", rec.omega, "Weight off L in step 3 (>= 1)")->required();
  recover->add_option("--success-tol", rec.success_tol,
                      "Success means ||x* - x||_2 / ||x||_2 <= this")
      ->capture_default_str();
  recover->add_option("--output-prefix", rec.output_prefix,
                      "Write PREFIX_xhat.txt, PREFIX_support.txt and PREFIX_xstar.txt");

  // threshold
  ThresholdArgs th;
  auto* threshold = app.add_subcommand(
      "threshold",
      "Weighted-l1 threshold delta_c(gamma1, gamma2 = 1 - gamma1, f1, f2, omega): the smallest "
      "m/n with psi_com - psi_int - psi_ext < 0 for every admissible (tau1, tau2) with "
      "tau1 + tau2 > delta - gamma1 f1 - gamma2 f2. Prints gamma1,f1,f2,omega,delta_c.");
  threshold->add_option("--gamma1", th.gamma1, "Size of the first index class, in (0,1)");
  threshold->add_option("--f1", th.f1, "Nonzero fraction within class 1, in [0,1]");
  threshold->add_option("--f2", th.f2, "Nonzero fraction within class 2, in [0,1]");
  threshold->add_option("--omega", th.omega, "Weight on class 2 (>= 1)");
  threshold->add_option("--batch", th.batch,
                        "CSV with header gamma1,f1,f2,omega; one output row per query")
      ->check(CLI::ExistingFile);
  threshold->add_option("--counting", th.counting,
                        "fixed: count faces over a fixed support; all: also count the choice "
                        "of support (adds gamma1 H(f1) + gamma2 H(f2))")
      ->check(CLI::IsMember({"fixed", "all"}))
      ->capture_default_str();
  threshold->add_option("--grid", th.grid, "Intervals per tau axis (>= 100)")->capture_default_str();
  threshold->add_option("--tol", th.tol, "Bisection tolerance on delta")->capture_default_str();
  threshold->add_option("--output", th.output, "Write the CSV here instead of stdout");

  // weak-threshold
  double wt_delta = 0.0;
  double wt_tol = 1e-4;
  int wt_grid = 400;
  std::optional<std::size_t> wt_n;
  auto* weak = app.add_subcommand(
      "weak-threshold",
      "Weak threshold mu_W(delta) of plain l1: the largest mu with "
      "delta_c(mu, 1 - mu, 1, 0, 1) <= delta. Prints delta,mu_w[,k].");
  weak->add_option("--delta", wt_delta, "Measurement ratio m/n, in (0,1)")->required();
  weak->add_option("--tol", wt_tol, "Bisection tolerance on mu")->capture_default_str();
  weak->add_option("--grid", wt_grid, "Intervals per tau axis (>= 100)")->capture_default_str();
  weak->add_option("--n", wt_n, "Also print k = n mu_W");

  // theorem3
  double t3_delta = 0.555;
  std::vector<double> t3_omegas = {10.0};
  double t3_tol = 1e-4;
  int t3_grid = 400;
  auto* theorem3 = app.add_subcommand(
      "theorem3",
      "Perfect-recovery check for the two-step algorithm: passes when "
      "delta_c(mu_W(delta), 1 - mu_W(delta), 1, 0, omega) < delta by more than 2 tol. "
      "Prints delta,omega,mu_w,delta_c,margin,pass.");
  theorem3->add_option("--delta", t3_delta, "Measurement ratio m/n, in (0,1)")->capture_default_str();
  theorem3->add_option("--omega", t3_omegas, "One or more weights (>= 1)")->capture_default_str();
  theorem3->add_option("--tol", t3_tol, "Bisection tolerance")->capture_default_str();
  theorem3->add_option("--grid", t3_grid, "Intervals per tau axis (>= 100)")->capture_default_str();

  // sweep
  SweepArgs sw;
  std::map<std::string, std::string> sweep_flags;
  auto* sweep = app.add_subcommand(
      "sweep",
      "Monte Carlo success-rate sweep over k for plain l1 and the two-step algorithm. Writes "
      "trials.csv and summary.csv to --out-dir and prints the 50% crossovers per omega.");
  sweep->add_option("--config", sw.config,
                    "key = value file (n, m, k_grid, distribution, omega, trials_per_k, seed, "
                    "success_tol, threads, algorithms); inline flags override it")
      ->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> inline_keys = {
      {"--n", "n"},
      {"--m", "m"},
      {"--k-grid", "k_grid"},
      {"--distribution", "distribution"},
      {"--omega", "omega"},
      {"--trials", "trials_per_k"},
      {"--seed", "seed"},
      {"--success-tol", "success_tol"},
      {"--threads", "threads"},
      {"--algorithms", "algorithms"},
  };
  const std::map<std::string, std::string> inline_help = {
      {"--n", "Signal length (default 200)"},
      {"--m", "Measurements (default 112)"},
      {"--k-grid", "Sparsities: comma list or lo:hi:step"},
      {"--distribution", std::string("Magnitude law: ") + kDistributions + " (default gaussian)"},
      {"--omega", "Comma list of weights (default 2,3,5,10)"},
      {"--trials", "Trials per k (default 200)"},
      {"--seed", "Master seed (default 1)"},
      {"--success-tol", "Relative l2 success threshold (default 1e-4)"},
      {"--threads", "Worker threads, 0 = all cores (default 0); results do not depend on it"},
      {"--algorithms", "plain_l1 or plain_l1,two_step (default both)"},
  };
  for (const auto& [flag, key] : inline_keys) {
    sweep->add_option(flag, sweep_flags[key], inline_help.at(flag));
  }
  sweep->add_option("--out-dir", sw.out_dir, "Directory for trials.csv and summary.csv")
      ->capture_default_str();

  // overlap
  OverlapArgs ov;
  auto* overlap = app.add_subcommand(
      "overlap",
      "Support overlap |K n L| of plain l1 on synthetic instances, with the lower bound "
      "k - W(x, ||x - x_hat||_1), W being the largest number of nonzeros of x whose "
      "magnitudes sum to at most the l1 error.");
  overlap->add_option("--n", ov.n, "Signal length")->capture_default_str();
  overlap->add_option("--m", ov.m, "Measurements")->capture_default_str();
  overlap->add_option("--k", ov.k, "Sparsity")->required();
  overlap->add_option("--distribution", ov.distribution,
                      std::string("Magnitude law: ") + kDistributions)
      ->capture_default_str();
  overlap->add_option("--seed", ov.seed, "Master seed")->capture_default_str();
  overlap->add_option("--trials", ov.trials, "Number of instances")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (recover->parsed()) {
      if (rec.synthetic == !rec.input.empty()) {
        throw DomainError("give exactly one of --synthetic or --input");
      }
      return cmd_recover(rec, out);
    }
    if (threshold->parsed()) return cmd_threshold(th, out);
    if (weak->parsed()) return cmd_weak_threshold(wt_delta, wt_tol, wt_grid, wt_n, out);
    if (theorem3->parsed()) return cmd_theorem3(t3_delta, t3_omegas, t3_tol, t3_grid, out);
    if (sweep->parsed()) {
      for (const auto& [flag, key] : inline_keys) {
        if (sweep->count(flag) > 0) sw.overrides.emplace_back(key, sweep_flags[key]);
      }
      return cmd_sweep(sw, out);
    }
    if (overlap->parsed()) return cmd_overlap(ov, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace rwl1::cli
