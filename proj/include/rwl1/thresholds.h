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

// Weighted-l1 weak recovery thresholds.
//
// A signal has a fraction f1 of nonzeros on a block of relative size gamma1
// and f2 on the complementary block gamma2 = 1 - gamma1; the off-block is
// penalized by omega. delta_c is the smallest measurement ratio m/n for
// which the net exponent
//
//   psi_com(tau1, tau2) - psi_int(tau1, tau2) - psi_ext(tau1, tau2)
//
// is negative for every face-growth pair (tau1, tau2) with
// tau1 + tau2 > delta - (gamma1 f1 + gamma2 f2). With omega = 1 and
// (f1, f2) = (1, 0) this is the classical l1 weak threshold.

#ifndef RWL1_THRESHOLDS_H_
#define RWL1_THRESHOLDS_H_

#include <functional>
#include <iosfwd>
#include <vector>

namespace rwl1::thresholds {

// Whether the combinatorial exponent also counts the choice of the support
// itself (adds gamma1 H(f1) + gamma2 H(f2)). kFixedSupport is the
// almost-all-supports statement and keeps delta_c at omega = 1 a function
// of total sparsity alone; kAllSupports is the union over supports.
enum class SupportCounting { kFixedSupport, kAllSupports };

struct ThresholdQuery {
  double gamma1 = 0.5;
  double gamma2 = 0.5;
  double f1 = 0.0;
  double f2 = 0.0;
  double omega = 1.0;
  SupportCounting counting = SupportCounting::kFixedSupport;

  static ThresholdQuery make(double gamma1, double f1, double f2, double omega,
                             SupportCounting counting = SupportCounting::kFixedSupport);

  double sparsity() const { return gamma1 * f1 + gamma2 * f2; }
  double tau1_max() const { return gamma1 * (1.0 - f1); }
  double tau2_max() const { return gamma2 * (1.0 - f2); }

  // DomainError unless gamma1 in (0,1), gamma1 + gamma2 = 1, f in [0,1],
  // omega >= 1 and sparsity in (0,1).
  void validate() const;
};

struct ExponentIntermediates {
  double c = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double x0 = 0.0;
  double b = 0.0;
  double omega_prime = 0.0;
  double s_star = 0.0;
  double y_point = 0.0;
  double lambda_star = 0.0;
};

struct ExponentBreakdown {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double psi_com = 0.0;
  double psi_int = 0.0;
  double psi_ext = 0.0;
  double gap = 0.0;  // psi_com - psi_int - psi_ext
  ExponentIntermediates intermediates;
};

// All three take tau1 in [0, gamma1(1-f1)], tau2 in [0, gamma2(1-f2)]
// (DomainError otherwise) and return nats.
double psi_com(const ThresholdQuery& q, double tau1, double tau2);
// min over x > 0 of c x^2 - alpha1 log G(x) - alpha2 log G(omega x); the
// minimizer is written to *x0 when given. Zero when both alphas are zero.
double external_exponent(double c, double alpha1, double alpha2, double omega,
                         double* x0 = nullptr);
double psi_ext(const ThresholdQuery& q, double tau1, double tau2,
               ExponentIntermediates* detail = nullptr);
double psi_int(const ThresholdQuery& q, double tau1, double tau2,
               ExponentIntermediates* detail = nullptr);
ExponentBreakdown exponents(const ThresholdQuery& q, double tau1, double tau2);

struct DeltaCOptions {
  int grid_resolution = 400;   // intervals per tau axis
  double bisection_tol = 1e-4;
  double strict_margin = 1e-9;  // "gap < 0" is tested as gap < -margin
};

struct DeltaCResult {
  double delta_c = 1.0;
  bool saturated = false;  // no delta < 1 satisfied the exponent condition
  // Largest gap over the admissible region at the accepted end of the
  // final bisection bracket (nothing admissible leaves gap at -inf).
  ExponentBreakdown worst;
};

DeltaCResult delta_c(const ThresholdQuery& q, const DeltaCOptions& opts = {});

// mu_W(delta): largest mu with delta_c(mu, 1 - mu, 1, 0, 1) <= delta,
// bisected to `tol`.
double weak_threshold(double delta, double tol = 1e-4,
                      const DeltaCOptions& opts = {});

struct Theorem3Result {
  bool pass = false;
  double margin = 0.0;  // delta - delta_c
  double mu_w = 0.0;
  double delta_c = 0.0;
};

// Checks delta_c(mu_W(delta), 1 - mu_W(delta), 1, 0, omega) < delta. A pass
// requires the margin to exceed the combined bisection resolution
// 2 * opts.bisection_tol, so omega = 1 (margin 0 up to rounding) fails.
Theorem3Result theorem3_check(double delta, double omega,
                              const DeltaCOptions& opts = {});

// User-supplied robustness constants: C(eps1) > 1 on the grid and kappa*.
struct RobustnessProfile {
  std::function<double(double)> c_of_eps1;
  double kappa_star = 0.0;
  std::vector<double> eps1_grid;

  // NOT the true constants (those come from an external robustness
  // analysis): C = 2, kappa* = 1 on eps1 = 0.01, 0.02, ..., 0.5. Meant for
  // demos and tests only.
  static RobustnessProfile placeholder();
};

struct ZetaResult {
  double zeta = 0.0;
  double best_eps1 = 0.0;
  // 2 Q(sqrt(-2 ln(1 - zeta))) when zeta < 1, else 0.
  double overlap_lower_bound = 0.0;
};

// min over the profile grid of
//   2C(1+kappa*)/(C-1) * (1 - exp(-Psi(0.5 (1-eps1)/(1+eps0))^2 / 2)).
// DomainError for eps0 <= 0, an empty grid, eps1 outside (0,1), or C <= 1.
ZetaResult zeta_bound(double eps0, const RobustnessProfile& profile);

struct ThresholdRow {
  ThresholdQuery query;
  double delta_c = 0.0;
};

// gamma1,f1,f2,omega,delta_c
void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows);

}  // namespace rwl1::thresholds

#endif  // RWL1_THRESHOLDS_H_
