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

#include "rwl1/thresholds.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include "rwl1/errors.h"
#include "rwl1/specialfn.h"

namespace rwl1::thresholds {
namespace {

using specialfn::binary_entropy;
using specialfn::erf_scaled;
using specialfn::erf_scaled_density;
using specialfn::gaussian_cdf_hazard;

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Validates tau against [0, max] with a little slack for grid rounding and
// returns it clamped.
double checked_tau(double tau, double max, const char* name) {
  const double slack = 1e-12 * (1.0 + max);
  if (!(tau >= -slack && tau <= max + slack)) {
    throw DomainError(std::string("exponent: ") + name + " outside [0, " +
                      std::to_string(max) + "]");
  }
  return std::clamp(tau, 0.0, max);
}

// Cumulant generating function of |Z|: s^2/2 + log(2 Phi(s)).
double half_normal_cgf(double s) {
  if (s >= -30.0) return 0.5 * s * s + std::log(2.0 * specialfn::gaussian_cdf(s));
  // s^2/2 + log Phi(s) = log(phi(s)/hazard(s)) + s^2/2, without the
  // cancellation of two huge terms.
  return std::log(2.0 * specialfn::kInvSqrt2Pi) - std::log(gaussian_cdf_hazard(s));
}

double block_entropy(double tau, double size) {
  if (size <= 0.0) return 0.0;
  return size * binary_entropy(std::clamp(tau / size, 0.0, 1.0));
}

// Smallest bracket [lo, hi] with f(lo) < 0 < f(hi), grown geometrically.
template <typename F>
specialfn::Bracket expand_bracket(F&& f, double lo, double hi, double tol) {
  for (int i = 0; i < 2000 && !(f(lo) < 0.0); ++i) lo *= 0.5;
  for (int i = 0; i < 2000 && !(f(hi) > 0.0); ++i) hi *= 2.0;
  if (!(f(lo) < 0.0) || !(f(hi) > 0.0)) {
    throw ConvergenceError("exponent: root bracket not found");
  }
  return {lo, hi, tol, 400};
}

// Evaluates the net exponent on the admissible tau region of a query.
class GapField {
 public:
  GapField(const ThresholdQuery& q, const DeltaCOptions& opts)
      : q_(q),
        opts_(opts),
        a1_(q.tau1_max()),
        a2_(q.tau2_max()),
        n1_(a1_ > 0.0 ? opts.grid_resolution : 0),
        n2_(a2_ > 0.0 ? opts.grid_resolution : 0),
        h1_(n1_ ? a1_ / n1_ : 0.0),
        h2_(n2_ ? a2_ / n2_ : 0.0),
        grid_((n1_ + 1) * (n2_ + 1)) {
    for (int i = 0; i <= n1_; ++i) {
      for (int j = 0; j <= n2_; ++j) grid_[index(i, j)] = gap(i * h1_, j * h2_);
    }
  }

  double gap(double tau1, double tau2) const {
    return exponents(q_, std::min(tau1, a1_), std::min(tau2, a2_)).gap;
  }

  // Largest gap over {tau : tau1 + tau2 > t0} and where it occurs. The
  // exponents are tangent to zero at their peak, so the coarse grid is only
  // a starting point for a shrinking compass search.
  std::pair<double, std::pair<double, double>> sup_above(double t0) const {
    double best = kNegInf;
    std::pair<double, double> where{0.0, 0.0};
    if (t0 >= a1_ + a2_) return {best, where};
    const double floor = std::max(t0, 0.0);

    int bi = -1;
    int bj = -1;
    double coarse = kNegInf;
    for (int i = 0; i <= n1_; ++i) {
      for (int j = 0; j <= n2_; ++j) {
        if (i * h1_ + j * h2_ < floor) continue;
        const double v = grid_[index(i, j)];
        if (v > coarse) {
          coarse = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi >= 0) {
      auto inside = [&](double t1, double t2) {
        return t1 >= 0.0 && t2 >= 0.0 && t1 <= a1_ && t2 <= a2_ && t1 + t2 >= floor;
      };
      auto [v, p] = compass(bi * h1_, bj * h2_, coarse, h1_, h2_, inside);
      if (v > best) {
        best = v;
        where = p;
      }
    }

    // The supremum over the open region may sit on the line
    // tau1 + tau2 = t0; search along it separately.
    if (t0 >= 0.0) {
      const double lo = std::max(0.0, t0 - a2_);
      const double hi = std::min(a1_, t0);
      if (lo <= hi) {
        const int n = hi > lo ? opts_.grid_resolution : 0;
        const double h = n ? (hi - lo) / n : 0.0;
        int bk = 0;
        double line_best = kNegInf;
        for (int k = 0; k <= n; ++k) {
          const double t1 = lo + k * h;
          const double v = gap(t1, t0 - t1);
          if (v > line_best) {
            line_best = v;
            bk = k;
          }
        }
        double t1 = lo + bk * h;
        for (double step = h; step > 1e-12 * (1.0 + hi);) {
          bool moved = false;
          for (double cand : {t1 - step, t1 + step}) {
            if (cand < lo || cand > hi) continue;
            const double v = gap(cand, t0 - cand);
            if (v > line_best) {
              line_best = v;
              t1 = cand;
              moved = true;
            }
          }
          if (!moved) step *= 0.25;
        }
        if (line_best > best) {
          best = line_best;
          where = {t1, t0 - t1};
        }
      }
    }
    return {best, where};
  }

 private:
  template <typename Inside>
  std::pair<double, std::pair<double, double>> compass(double t1, double t2, double v,
                                                      double s1, double s2,
                                                      Inside&& inside) const {
    const double stop = 1e-12 * (1.0 + a1_ + a2_);
    while (s1 > stop || s2 > stop) {
      bool moved = false;
      for (int d1 = -1; d1 <= 1; ++d1) {
        for (int d2 = -1; d2 <= 1; ++d2) {
          if (d1 == 0 && d2 == 0) continue;
          const double c1 = t1 + d1 * s1;
          const double c2 = t2 + d2 * s2;
          if ((d1 != 0 && s1 == 0.0) || (d2 != 0 && s2 == 0.0) || !inside(c1, c2)) continue;
          const double cv = gap(c1, c2);
          if (cv > v) {
            v = cv;
            t1 = c1;
            t2 = c2;
            moved = true;
          }
        }
      }
      if (!moved) {
        s1 *= 0.25;
        s2 *= 0.25;
      }
    }
    return {v, {t1, t2}};
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (n2_ + 1) + j;
  }

  const ThresholdQuery& q_;
  const DeltaCOptions& opts_;
  double a1_;
  double a2_;
  int n1_;
  int n2_;
  double h1_;
  double h2_;
  std::vector<double> grid_;
};

}  // namespace

ThresholdQuery ThresholdQuery::make(double gamma1, double f1, double f2,
                                    double omega, SupportCounting counting) {
  ThresholdQuery q{gamma1, 1.0 - gamma1, f1, f2, omega, counting};
  q.validate();
  return q;
}

void ThresholdQuery::validate() const {
  if (!(gamma1 > 0.0 && gamma1 < 1.0)) throw DomainError("query: gamma1 must lie in (0,1)");
  if (!(std::abs(gamma1 + gamma2 - 1.0) <= 1e-12)) {
    throw DomainError("query: gamma2 must equal 1 - gamma1");
  }
  if (!(f1 >= 0.0 && f1 <= 1.0) || !(f2 >= 0.0 && f2 <= 1.0)) {
    throw DomainError("query: f1 and f2 must lie in [0,1]");
  }
  if (!(omega >= 1.0) || !std::isfinite(omega)) throw DomainError("query: omega must be >= 1");
  const double mu = sparsity();
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("query: total sparsity must lie in (0,1)");
}

double psi_com(const ThresholdQuery& q, double tau1, double tau2) {
  tau1 = checked_tau(tau1, q.tau1_max(), "tau1");
  tau2 = checked_tau(tau2, q.tau2_max(), "tau2");
  double bits = tau1 + tau2 + block_entropy(tau1, q.tau1_max()) +
                block_entropy(tau2, q.tau2_max());
  if (q.counting == SupportCounting::kAllSupports) {
    bits += q.gamma1 * binary_entropy(q.f1) + q.gamma2 * binary_entropy(q.f2);
  }
  return bits * kLn2;
}

double external_exponent(double c, double alpha1, double alpha2, double omega,
                         double* x0_out) {
  if (x0_out) *x0_out = 0.0;
  if (!(alpha1 >= 0.0 && alpha2 >= 0.0)) throw DomainError("psi_ext: alphas must be >= 0");
  if (!(omega >= 1.0)) throw DomainError("psi_ext: omega must be >= 1");
  if (alpha1 <= 0.0 && alpha2 <= 0.0) return 0.0;
  if (!(c > 0.0)) throw DomainError("psi_ext: c must be positive");

  // g(x)/(x G(x)) decreases from +inf to 0, so the equation has one root.
  auto ratio = [](double x) { return erf_scaled_density(x) / (x * erf_scaled(x)); };
  auto f = [&](double x) {
    double v = 2.0 * c;
    if (alpha1 > 0.0) v -= alpha1 * ratio(x);
    if (alpha2 > 0.0) v -= omega * omega * alpha2 * ratio(omega * x);
    return v;
  };
  const auto bracket = expand_bracket(f, 1.0, 1.0, 0.0);
  const double x0 =
      specialfn::find_root(f, {bracket.lo, bracket.hi, 1e-15 * bracket.hi, 400});
  if (x0_out) *x0_out = x0;
  double value = c * x0 * x0;
  if (alpha1 > 0.0) value -= alpha1 * std::log(erf_scaled(x0));
  if (alpha2 > 0.0) value -= alpha2 * std::log(erf_scaled(omega * x0));
  return value;
}

double psi_ext(const ThresholdQuery& q, double tau1, double tau2,
               ExponentIntermediates* detail) {
  tau1 = checked_tau(tau1, q.tau1_max(), "tau1");
  tau2 = checked_tau(tau2, q.tau2_max(), "tau2");
  const double w = q.omega;
  const double c = (tau1 + q.gamma1 * q.f1) + w * w * (tau2 + q.gamma2 * q.f2);
  const double alpha1 = q.tau1_max() - tau1;
  const double alpha2 = q.tau2_max() - tau2;
  if (detail) {
    detail->c = c;
    detail->alpha1 = alpha1;
    detail->alpha2 = alpha2;
    detail->x0 = 0.0;
  }
  return external_exponent(c, alpha1, alpha2, w, detail ? &detail->x0 : nullptr);
}

double psi_int(const ThresholdQuery& q, double tau1, double tau2,
               ExponentIntermediates* detail) {
  tau1 = checked_tau(tau1, q.tau1_max(), "tau1");
  tau2 = checked_tau(tau2, q.tau2_max(), "tau2");
  const double t = tau1 + tau2;
  if (t <= 0.0) return 0.0;
  const double w = q.omega;
  const double b = (tau1 + w * w * tau2) / t;
  const double omega_prime = q.gamma1 * q.f1 + w * w * q.gamma2 * q.f2;
  const double p1 = tau1 / t;
  const double p2 = tau2 / t;

  auto mixture = [&](double s) {
    double v = 0.0;
    if (p1 > 0.0) v += p1 * gaussian_cdf_hazard(s);
    if (p2 > 0.0) v += p2 * w * gaussian_cdf_hazard(w * s);
    return v;
  };
  auto m_hat = [&](double s) { return -s / mixture(s); };
  const double target = t / (t * b + omega_prime);

  // m_hat rises from 0 at s = 0 toward 1/b as s -> -inf; for s > 0 it is
  // negative, so the root is unique and lies on s < 0.
  auto f = [&](double s) { return m_hat(-s) - target; };
  double hi = 40.0;
  for (int i = 0; i < 60 && !(f(hi) > 0.0); ++i) hi *= 2.0;
  if (!(f(hi) > 0.0)) throw ConvergenceError("psi_int: s* bracket not found");
  const double s = -specialfn::find_root(f, {0.0, hi, 1e-15 * hi, 400});

  const double y = s * (b - 1.0 / m_hat(s));
  double lambda_star = s * y;
  if (p1 > 0.0) lambda_star -= p1 * half_normal_cgf(s);
  if (p2 > 0.0) lambda_star -= p2 * half_normal_cgf(w * s);
  if (detail) {
    detail->b = b;
    detail->omega_prime = omega_prime;
    detail->s_star = s;
    detail->y_point = y;
    detail->lambda_star = lambda_star;
  }
  return (lambda_star + t / (2.0 * omega_prime) * y * y + kLn2) * t;
}

ExponentBreakdown exponents(const ThresholdQuery& q, double tau1, double tau2) {
  ExponentBreakdown e;
  e.tau1 = tau1;
  e.tau2 = tau2;
  e.psi_com = psi_com(q, tau1, tau2);
  e.psi_ext = psi_ext(q, tau1, tau2, &e.intermediates);
  e.psi_int = psi_int(q, tau1, tau2, &e.intermediates);
  e.gap = e.psi_com - e.psi_int - e.psi_ext;
  return e;
}

DeltaCResult delta_c(const ThresholdQuery& q, const DeltaCOptions& opts) {
  q.validate();
  if (opts.grid_resolution < 100 || !(opts.bisection_tol > 0.0)) {
    throw DomainError("delta_c: invalid options");
  }
  const GapField field(q, opts);
  const double mu = q.sparsity();
  auto accepts = [&](double delta) {
    return field.sup_above(delta - mu).first < -opts.strict_margin;
  };

  DeltaCResult result;
  double lo = mu;
  double hi = 1.0;
  if (!accepts(1.0 - opts.bisection_tol)) {
    result.delta_c = 1.0;
    result.saturated = true;
  } else {
    while (hi - lo > opts.bisection_tol) {
      const double mid = 0.5 * (lo + hi);
      if (accepts(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    result.delta_c = 0.5 * (lo + hi);
  }
  const auto [gap, where] = field.sup_above(hi - mu);
  if (gap > kNegInf) {
    result.worst = exponents(q, where.first, where.second);
  } else {
    result.worst.gap = kNegInf;
  }
  return result;
}

double weak_threshold(double delta, double tol, const DeltaCOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("weak_threshold: delta must lie in (0,1)");
  if (!(tol > 0.0)) throw DomainError("weak_threshold: tol must be positive");
  DeltaCOptions inner = opts;
  inner.bisection_tol = std::min(opts.bisection_tol, 0.25 * tol);
  // delta_c(mu) >= mu, so mu_W(delta) < delta.
  double lo = 0.0;
  double hi = delta;
  while (hi - lo > 0.25 * tol) {
    const double mid = 0.5 * (lo + hi);
    const auto r = delta_c(ThresholdQuery::make(mid, 1.0, 0.0, 1.0), inner);
    if (!r.saturated && r.delta_c <= delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Theorem3Result theorem3_check(double delta, double omega, const DeltaCOptions& opts) {
  if (!(omega >= 1.0)) throw DomainError("theorem3_check: omega must be >= 1");
  Theorem3Result r;
  r.mu_w = weak_threshold(delta, opts.bisection_tol, opts);
  r.delta_c = delta_c(ThresholdQuery::make(r.mu_w, 1.0, 0.0, omega), opts).delta_c;
  r.margin = delta - r.delta_c;
  r.pass = r.margin > 2.0 * opts.bisection_tol;
  return r;
}

RobustnessProfile RobustnessProfile::placeholder() {
  RobustnessProfile p;
  p.c_of_eps1 = [](double) { return 2.0; };
  p.kappa_star = 1.0;
  for (int i = 1; i <= 50; ++i) p.eps1_grid.push_back(0.01 * i);
  return p;
}

ZetaResult zeta_bound(double eps0, const RobustnessProfile& profile) {
  if (!(eps0 > 0.0)) throw DomainError("zeta_bound: eps0 must be positive");
  if (profile.eps1_grid.empty() || !profile.c_of_eps1) {
    throw DomainError("zeta_bound: empty robustness profile");
  }
  if (!(profile.kappa_star >= 0.0) || !std::isfinite(profile.kappa_star)) {
    throw DomainError("zeta_bound: kappa* must be finite and >= 0");
  }
  ZetaResult r;
  r.zeta = std::numeric_limits<double>::infinity();
  for (double eps1 : profile.eps1_grid) {
    if (!(eps1 > 0.0 && eps1 < 1.0)) throw DomainError("zeta_bound: eps1 must lie in (0,1)");
    const double c = profile.c_of_eps1(eps1);
    if (!(c > 1.0)) {
      throw DomainError("zeta_bound: profile has C(eps1) <= 1 at eps1 = " +
                        std::to_string(eps1));
    }
    const double psi = specialfn::gaussian_q_inv(0.5 * (1.0 - eps1) / (1.0 + eps0));
    const double tail = -std::expm1(-0.5 * psi * psi);
    const double value = 2.0 * c * (1.0 + profile.kappa_star) / (c - 1.0) * tail;
    if (value < r.zeta) {
      r.zeta = value;
      r.best_eps1 = eps1;
    }
  }
  r.overlap_lower_bound =
      r.zeta < 1.0
          ? 2.0 * specialfn::gaussian_q(std::sqrt(-2.0 * std::log1p(-r.zeta)))
          : 0.0;
  return r;
}

void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows) {
  out << "gamma1,f1,f2,omega,delta_c\n";
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.query.gamma1 << ',' << r.query.f1 << ',' << r.query.f2 << ','
        << r.query.omega << ',' << r.delta_c << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace rwl1::thresholds
