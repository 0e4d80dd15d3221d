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

#include "rwl1/specialfn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "rwl1/errors.h"

namespace rwl1::specialfn {
namespace {

// Below this argument Phi(x) is computed from its asymptotic expansion.
constexpr double kFarTail = -30.0;

// Phi(x) / phi(x) for x <= kFarTail:
//   (1/|x|) * sum_n (-1)^n (2n-1)!! / x^(2n).
// At |x| >= 30 the eighth term is below 1e-16 relative.
double far_tail_mills(double x) {
  const double inv_x2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 8; ++n) {
    term *= -(2.0 * n - 1.0) * inv_x2;
    sum += term;
  }
  return sum / -x;
}

}  // namespace

double gaussian_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_gaussian_cdf(double x) {
  if (x >= kFarTail) {
    if (x > 5.0) return std::log1p(-gaussian_q(x));
    return std::log(gaussian_cdf(x));
  }
  return -0.5 * x * x + std::log(kInvSqrt2Pi) + std::log(far_tail_mills(x));
}

double gaussian_cdf_hazard(double x) {
  if (x >= kFarTail) return gaussian_pdf(x) / gaussian_cdf(x);
  return 1.0 / far_tail_mills(x);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("gaussian_q_inv: p must lie in (0,1), got " +
                      std::to_string(p));
  }
  return kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double erf_scaled(double x) {
  if (!(x >= 0.0)) throw DomainError("erf_scaled: x must be >= 0");
  return std::erf(x);
}

double erf_scaled_density(double x) {
  if (!(x >= 0.0)) throw DomainError("erf_scaled_density: x must be >= 0");
  return kTwoOverSqrtPi * std::exp(-x * x);
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binary_entropy: p must lie in [0,1]");
  }
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double topmass_fraction(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw DomainError("topmass_fraction: theta must lie in [0,1]");
  }
  if (theta == 0.0) return 0.0;
  if (theta == 1.0) return 1.0;
  const double psi = gaussian_q_inv(0.5 * theta);
  return std::exp(-0.5 * psi * psi);
}

double w_fraction_asymptotic(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw DomainError("w_fraction_asymptotic: alpha must lie in [0,1)");
  }
  if (alpha == 0.0) return 0.0;
  const double t = std::sqrt(-2.0 * std::log1p(-alpha));
  return 1.0 - 2.0 * gaussian_q(t);
}

double find_root(const std::function<double(double)>& f,
                 const Bracket& bracket) {
  if (!(bracket.lo < bracket.hi) || !(bracket.tol > 0.0) ||
      bracket.max_iter < 1) {
    throw DomainError("find_root: invalid bracket");
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = f(lo);
  double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi)) {
    throw DomainError("find_root: function is NaN at a bracket end");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw BracketError("find_root: no sign change on [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  bool bisect = false;
  for (int iter = 0; iter < bracket.max_iter; ++iter) {
    const double width = hi - lo;
    const double mid = lo + 0.5 * width;
    if (width <= bracket.tol ||
        width <= 4.0 * kEps * std::max(std::abs(lo), std::abs(hi))) {
      return mid;
    }
    double x = mid;
    if (!bisect) {
      const double secant = hi - fhi * (hi - lo) / (fhi - flo);
      if (std::isfinite(secant) && secant > lo && secant < hi) x = secant;
    }
    const double fx = f(x);
    if (std::isnan(fx)) throw DomainError("find_root: function returned NaN");
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    // Fall back to bisection whenever a step fails to halve the bracket.
    bisect = (hi - lo) > 0.5 * width;
  }
  throw ConvergenceError("find_root: max_iter exceeded");
}

}  // namespace rwl1::specialfn
