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
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "rwl1/errors.h"

namespace rwl1::thresholds {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

ThresholdQuery Reference() { return ThresholdQuery::make(0.3, 0.8, 0.1, 3.0); }

// Random query with total sparsity in (0.05, 0.6).
ThresholdQuery RandomQuery(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const double g1 = 0.05 + 0.9 * u(rng);
    const double f1 = u(rng);
    const double f2 = u(rng);
    const double mu = g1 * f1 + (1.0 - g1) * f2;
    if (mu > 0.05 && mu < 0.6) return ThresholdQuery::make(g1, f1, f2, 1.0 + 19.0 * u(rng));
  }
}

// Splits total sparsity mu across classes of size g1 and 1 - g1.
ThresholdQuery Partition(double mu, double g1, double where, double omega) {
  const double lo = std::max(0.0, (mu - (1.0 - g1)) / g1);
  const double hi = std::min(1.0, mu / g1);
  const double f1 = lo + where * (hi - lo);
  return ThresholdQuery::make(g1, f1, (mu - g1 * f1) / (1.0 - g1), omega);
}

TEST(Query, Validation) {
  EXPECT_THROW(ThresholdQuery::make(0.0, 0.5, 0.5, 1.0), DomainError);
  EXPECT_THROW(ThresholdQuery::make(0.5, 1.2, 0.5, 1.0), DomainError);
  EXPECT_THROW(ThresholdQuery::make(0.5, 0.5, 0.5, 0.9), DomainError);
  EXPECT_THROW(ThresholdQuery::make(0.5, 1.0, 1.0, 2.0), DomainError);
  EXPECT_THROW(ThresholdQuery::make(0.5, 0.0, 0.0, 2.0), DomainError);
  ThresholdQuery q = Reference();
  q.gamma2 = 0.6;
  EXPECT_THROW(q.validate(), DomainError);
  EXPECT_NEAR(Reference().sparsity(), 0.31, 1e-15);
}

TEST(PsiCom, Examples) {
  EXPECT_EQ(psi_com(ThresholdQuery::make(0.5, 1.0, 0.0, 1.0), 0.0, 0.0), 0.0);
  const auto all = ThresholdQuery::make(0.5, 0.5, 0.5, 1.0, SupportCounting::kAllSupports);
  EXPECT_NEAR(psi_com(all, 0.0, 0.0), kLn2, 1e-15);
  // mpmath transliteration.
  EXPECT_NEAR(psi_com(Reference(), 0.03, 0.2), 0.5947250555300196993, 1e-14);
  EXPECT_NEAR(psi_com(Reference(), 0.02, 0.3), 0.6959661157209517712, 1e-14);
}

TEST(PsiCom, SupportCountingAddsEntropyOfFractions) {
  const auto fixed = Reference();
  auto all = fixed;
  all.counting = SupportCounting::kAllSupports;
  const double extra = (0.3 * 0.72192809488736234787 + 0.7 * 0.46899559358928122) * kLn2;
  EXPECT_NEAR(psi_com(all, 0.03, 0.2) - psi_com(fixed, 0.03, 0.2), extra, 1e-12);
}

TEST(PsiCom, RejectsTauOutsideBounds) {
  const auto q = Reference();
  EXPECT_THROW(psi_com(q, -0.01, 0.1), DomainError);
  EXPECT_THROW(psi_com(q, 0.07, 0.1), DomainError);
  EXPECT_THROW(psi_com(q, 0.0, 0.64), DomainError);
  EXPECT_THROW(psi_ext(q, 0.07, 0.1), DomainError);
  EXPECT_THROW(psi_int(q, 0.0, 0.64), DomainError);
}

TEST(PsiExt, Examples) {
  const auto q = Reference();
  EXPECT_EQ(psi_ext(q, q.tau1_max(), q.tau2_max()), 0.0);
  double x0 = 0.0;
  EXPECT_NEAR(external_exponent(1.0, 0.5, 0.0, 1.0, &x0), 0.5737058072328783635, 1e-13);
  EXPECT_NEAR(x0, 0.46478592064624444657, 1e-11);

  ExponentIntermediates d;
  EXPECT_NEAR(psi_ext(q, 0.02, 0.3, &d), 0.37006666177994539027, 1e-13);
  EXPECT_NEAR(d.x0, 0.20277943265356481436, 1e-11);
  EXPECT_NEAR(d.c, 3.59, 1e-14);
  EXPECT_NEAR(d.alpha1, 0.04, 1e-15);
  EXPECT_NEAR(d.alpha2, 0.33, 1e-15);
}

TEST(PsiExt, IsTheMinimumOverX) {
  double x0 = 0.0;
  const double v = external_exponent(3.59, 0.04, 0.33, 3.0, &x0);
  for (double dx : {-1e-3, 1e-3, -0.05, 0.05}) {
    const double x = x0 + dx;
    const double f = 3.59 * x * x - 0.04 * std::log(std::erf(x)) - 0.33 * std::log(std::erf(3 * x));
    EXPECT_GT(f, v);
  }
}

TEST(PsiExt, SplitInvariantAtUnitOmega) {
  const auto a = ThresholdQuery::make(0.4, 0.25, 0.25, 1.0);
  const auto b = ThresholdQuery::make(0.7, 0.25, 0.25, 1.0);
  const double ref = psi_ext(a, 0.1, 0.05);
  EXPECT_NEAR(psi_ext(a, 0.05, 0.1), ref, 1e-12);
  EXPECT_NEAR(psi_ext(b, 0.15, 0.0), ref, 1e-12);
  EXPECT_NEAR(psi_ext(b, 0.0, 0.15), ref, 1e-12);
}

TEST(PsiExt, Errors) {
  EXPECT_THROW(external_exponent(1.0, -0.1, 0.0, 1.0), DomainError);
  EXPECT_THROW(external_exponent(0.0, 0.1, 0.0, 1.0), DomainError);
  EXPECT_THROW(external_exponent(1.0, 0.1, 0.0, 0.5), DomainError);
}

TEST(PsiInt, Examples) {
  const auto q = Reference();
  EXPECT_EQ(psi_int(q, 0.0, 0.0), 0.0);
  ExponentIntermediates d;
  EXPECT_NEAR(psi_int(q, 0.02, 0.3, &d), 0.38684324576991725526, 1e-12);
  EXPECT_NEAR(d.s_star, -0.47872517594414376981, 1e-10);
  EXPECT_NEAR(d.y_point, 1.3015340720981408742, 1e-10);
  EXPECT_NEAR(d.b, (0.02 + 9 * 0.3) / 0.32, 1e-13);
  EXPECT_NEAR(d.omega_prime, 0.24 + 9 * 0.07, 1e-14);
}

TEST(PsiInt, SymmetricAtUnitOmega) {
  const auto q = ThresholdQuery::make(0.5, 0.3, 0.3, 1.0);
  for (auto [t1, t2] : {std::pair{0.1, 0.25}, {0.01, 0.3}, {0.2, 0.05}}) {
    EXPECT_NEAR(psi_int(q, t1, t2), psi_int(q, t2, t1), 1e-12);
    EXPECT_NEAR(psi_int(q, t1, t2), psi_int(q, t1 + t2, 0.0), 1e-12);
  }
}

TEST(PsiInt, FarTailStaysFinite) {
  // Tiny Omega' pushes s* far into the Gaussian tail.
  const auto q = ThresholdQuery::make(0.5, 1e-4, 0.0, 1.0);
  for (double t : {0.1, 0.3, 0.49}) {
    ExponentIntermediates d;
    const double v = psi_int(q, t, 0.0, &d);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
    EXPECT_LT(d.s_star, -10.0);
  }
}

TEST(Exponents, NonnegativeOnAdmissibleGrid) {
  std::mt19937_64 rng(20240611);
  for (int n = 0; n < 10; ++n) {
    const auto q = RandomQuery(rng);
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double t1 = q.tau1_max() * i / 49.0;
        const double t2 = q.tau2_max() * j / 49.0;
        const auto e = exponents(q, t1, t2);
        ASSERT_GE(e.psi_com, 0.0);
        ASSERT_GE(e.psi_int, 0.0) << t1 << ' ' << t2;
        ASSERT_GE(e.psi_ext, 0.0) << t1 << ' ' << t2;
        ASSERT_GE(e.intermediates.alpha1, 0.0);
        ASSERT_GE(e.intermediates.alpha2, 0.0);
        ASSERT_EQ(e.gap, e.psi_com - e.psi_int - e.psi_ext);
      }
    }
  }
}

TEST(Exponents, NetExponentPeaksAtZero) {
  // The angle sums telescope to one, so the net exponent touches zero at a
  // single face dimension and is negative elsewhere.
  for (double omega : {1.0, 2.0, 10.0}) {
    const auto q = ThresholdQuery::make(0.25, 1.0, 0.0, omega);
    double best = -1.0;
    for (int j = 1; j < 4000; ++j) best = std::max(best, exponents(q, 0.0, 0.75 * j / 4000).gap);
    EXPECT_LE(best, 1e-10) << omega;
    EXPECT_GT(best, -1e-5) << omega;
  }
}

TEST(DeltaC, MatchesPeakOracle) {
  // mpmath golden-section location of the zero peak, delta_c = mu + T*.
  const struct {
    double omega;
    double expected;
  } cases[] = {{1.0, 0.582857614441}, {2.0, 0.411257825545}, {10.0, 0.266675164066}};
  for (const auto& c : cases) {
    const auto r = delta_c(ThresholdQuery::make(0.25, 1.0, 0.0, c.omega));
    EXPECT_FALSE(r.saturated);
    EXPECT_NEAR(r.delta_c, c.expected, 2e-4) << c.omega;
  }
  EXPECT_NEAR(delta_c(ThresholdQuery::make(0.1, 1.0, 0.0, 1.0)).delta_c, 0.328793505454, 2e-4);
}

TEST(DeltaC, WorstPointIsReported) {
  const auto r = delta_c(ThresholdQuery::make(0.25, 1.0, 0.0, 1.0));
  EXPECT_LT(r.worst.gap, -1e-9);
  EXPECT_NEAR(r.worst.tau2 + 0.25, r.delta_c, 2e-4);
}

TEST(DeltaC, VanishingSparsityNeedsFewMeasurements) {
  double prev = 1.0;
  for (double mu : {0.05, 0.01, 0.002}) {
    const double d = delta_c(ThresholdQuery::make(0.5, mu, mu, 1.0)).delta_c;
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 0.03);
}

TEST(DeltaC, NondecreasingInF2) {
  double prev = 0.0;
  for (double f2 : {0.05, 0.1, 0.2, 0.3, 0.4}) {
    const double d = delta_c(ThresholdQuery::make(0.3, 0.8, f2, 3.0)).delta_c;
    EXPECT_GE(d, prev) << f2;
    prev = d;
  }
}

TEST(DeltaC, PartitionInvariantAtUnitOmega) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double ref = delta_c(ThresholdQuery::make(0.5, 0.3, 0.3, 1.0)).delta_c;
  for (int i = 0; i < 5; ++i) {
    const auto q = Partition(0.3, u(rng), u(rng), 1.0);
    EXPECT_NEAR(delta_c(q).delta_c, ref, 2e-4) << q.gamma1 << ' ' << q.f1;
  }
}

TEST(DeltaC, WeightingHelpsWithPerfectSupportGuess) {
  const double mu = weak_threshold(0.555);
  const double plain = delta_c(ThresholdQuery::make(mu, 1.0, 0.0, 1.0)).delta_c;
  for (double omega : {2.0, 5.0, 10.0}) {
    EXPECT_LT(delta_c(ThresholdQuery::make(mu, 1.0, 0.0, omega)).delta_c, plain) << omega;
  }
}

TEST(DeltaC, Saturates) {
  DeltaCOptions coarse;
  coarse.bisection_tol = 0.01;
  const auto r = delta_c(ThresholdQuery::make(0.5, 0.05, 0.95, 50.0), coarse);
  EXPECT_TRUE(r.saturated);
  EXPECT_EQ(r.delta_c, 1.0);
}

TEST(DeltaC, RejectsBadOptions) {
  DeltaCOptions o;
  o.grid_resolution = 50;
  EXPECT_THROW(delta_c(Reference(), o), DomainError);
  o = {};
  o.bisection_tol = 0.0;
  EXPECT_THROW(delta_c(Reference(), o), DomainError);
}

TEST(WeakThreshold, RoundTrip) {
  for (double delta : {0.1, 0.3, 0.5555, 0.8, 0.95}) {
    const double mu = weak_threshold(delta);
    EXPECT_NEAR(delta_c(ThresholdQuery::make(mu, 1.0, 0.0, 1.0)).delta_c, delta, 2e-4) << delta;
  }
}

TEST(WeakThreshold, MatchesOracleAndExperimentScale) {
  const double mu = weak_threshold(0.5555);
  EXPECT_GE(200 * mu, 40.0);
  EXPECT_LE(200 * mu, 50.0);
  EXPECT_NEAR(weak_threshold(0.555), 0.229745456406, 2e-4);
}

TEST(WeakThreshold, MonotoneAndApproachesOne) {
  double prev = 0.0;
  for (double delta : {0.2, 0.4, 0.6, 0.9, 0.99}) {
    const double mu = weak_threshold(delta, 1e-3);
    EXPECT_GT(mu, prev);
    prev = mu;
  }
  EXPECT_GT(prev, 0.85);
  EXPECT_THROW(weak_threshold(1.0), DomainError);
  EXPECT_THROW(weak_threshold(0.0), DomainError);
}

TEST(Theorem3, PassesForLargeWeight) {
  const auto r = theorem3_check(0.555, 10.0);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.margin, 0.0);
  EXPECT_LT(r.delta_c, 0.555);
}

TEST(Theorem3, UnitWeightFailsWithZeroMargin) {
  const auto r = theorem3_check(0.555, 1.0);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.margin, 0.0, 2e-4);
}

TEST(Theorem3, MarginTable) {
  // mu_W and delta_c both from the mpmath peak oracle.
  const struct {
    double omega;
    double margin;
  } cases[] = {{2, 0.170340649196}, {5, 0.280200366746}, {10, 0.309560897507}, {20, 0.320137064338}};
  for (const auto& c : cases) {
    const auto r = theorem3_check(0.555, c.omega);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.margin, c.margin, 2e-4) << c.omega;
  }
}

TEST(Zeta, PlaceholderProfile) {
  const auto p = RobustnessProfile::placeholder();
  const auto z = zeta_bound(0.1, p);
  EXPECT_NEAR(z.zeta, 0.0629144027684195920856, 1e-13);
  EXPECT_DOUBLE_EQ(z.best_eps1, 0.01);
  EXPECT_NEAR(z.overlap_lower_bound, 0.718472170912979695, 1e-12);
  EXPECT_NEAR(zeta_bound(5e-4, p).zeta, 0.000692038955702845138525, 1e-15);
}

TEST(Zeta, PositiveAndShrinksWithEps0) {
  const auto p = RobustnessProfile::placeholder();
  double prev = 1e9;
  for (double eps0 : {0.5, 0.1, 0.01, 1e-3, 1e-6}) {
    const auto z = zeta_bound(eps0, p);
    EXPECT_GT(z.zeta, 0.0);
    EXPECT_LT(z.zeta, prev);
    EXPECT_GT(z.overlap_lower_bound, 0.0);
    EXPECT_LE(z.overlap_lower_bound, 1.0);
    prev = z.zeta;
  }
}

TEST(Zeta, VacuousBoundIsZero) {
  auto p = RobustnessProfile::placeholder();
  p.kappa_star = 1e6;
  const auto z = zeta_bound(0.1, p);
  EXPECT_GE(z.zeta, 1.0);
  EXPECT_EQ(z.overlap_lower_bound, 0.0);
}

TEST(Zeta, ProfileErrors) {
  auto p = RobustnessProfile::placeholder();
  EXPECT_THROW(zeta_bound(0.0, p), DomainError);
  p.c_of_eps1 = [](double e) { return e < 0.3 ? 2.0 : 1.0; };
  EXPECT_THROW(zeta_bound(0.1, p), DomainError);
  p = RobustnessProfile::placeholder();
  p.eps1_grid.clear();
  EXPECT_THROW(zeta_bound(0.1, p), DomainError);
  p = RobustnessProfile::placeholder();
  p.eps1_grid.push_back(1.5);
  EXPECT_THROW(zeta_bound(0.1, p), DomainError);
}

TEST(ThresholdCsv, HeaderAndRows) {
  std::ostringstream out;
  write_threshold_csv(out, {{ThresholdQuery::make(0.25, 1.0, 0.0, 10.0), 0.2666}});
  EXPECT_EQ(out.str(), "gamma1,f1,f2,omega,delta_c\n0.25,1,0,10,0.2666\n");
}

}  // namespace
}  // namespace rwl1::thresholds
