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

// Scalar special functions and a bracketing root finder.
//
// Conventions: Q is the standard normal upper tail, Psi = Q^{-1}, and
// G / g are erf and its derivative (2/sqrt(pi)) exp(-x^2).

#ifndef RWL1_SPECIALFN_H_
#define RWL1_SPECIALFN_H_

#include <functional>

namespace rwl1::specialfn {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kTwoOverSqrtPi = 1.12837916709551257390;

// Standard normal density and CDF.
double gaussian_pdf(double x);
double gaussian_cdf(double x);

// log Phi(x), finite for every finite x (asymptotic series in the far
// left tail where Phi underflows).
double log_gaussian_cdf(double x);

// phi(x) / Phi(x). Behaves like -x for x -> -inf; never returns 0/0.
double gaussian_cdf_hazard(double x);

// Q(x) = P(Z > x).
double gaussian_q(double x);

// Psi(p) = Q^{-1}(p). Throws DomainError unless 0 < p < 1.
double gaussian_q_inv(double p);

// G(x) = erf(x) and g(x) = G'(x), for x >= 0 (DomainError otherwise).
double erf_scaled(double x);
double erf_scaled_density(double x);

// Shannon entropy in bits with 0 log 0 = 0.
double binary_entropy(double p);

struct OrderStatParams {
  double theta = 0.0;  // M/N, fraction of the largest magnitudes retained
};

// Asymptotic share of the l1 mass of N iid half-normals carried by the
// largest theta*N of them: exp(-Psi(theta/2)^2 / 2).
double topmass_fraction(double theta);
inline double topmass_fraction(const OrderStatParams& p) {
  return topmass_fraction(p.theta);
}

// Asymptotic fraction of a Gaussian support whose smallest entries fit
// inside an l1 budget of alpha * ||x||_1: 1 - 2 Q(sqrt(-2 ln(1 - alpha))).
double w_fraction_asymptotic(double alpha);

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-10;
  int max_iter = 200;
};

// Bisection safeguarded secant search. Requires f(lo) * f(hi) <= 0
// (BracketError otherwise); ConvergenceError when max_iter is exhausted.
double find_root(const std::function<double(double)>& f,
                 const Bracket& bracket);

}  // namespace rwl1::specialfn

#endif  // RWL1_SPECIALFN_H_
