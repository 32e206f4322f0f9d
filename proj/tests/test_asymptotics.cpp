#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "growthbound/asymptotics.hpp"
#include "growthbound/lp_model.hpp"
#include "growthbound/lp_solve.hpp"
#include "oracles.hpp"

using namespace growthbound;

namespace {

const double kAlpha = 1.0 / (2.0 * (2.0 + (2.0 - std::numbers::sqrt2) * std::numbers::ln2));

// Largest violation of any full improved-LP row at q, in long double.
long double max_violation(const std::vector<double>& q) {
  const int n = static_cast<int>(q.size());
  std::vector<long double> pre(n + 1, 0);
  for (int i = 0; i < n; ++i) pre[i + 1] = pre[i] + q[i];
  long double worst = -1e300L;
  for (int k = 2; k <= n; ++k) {
    const long double lk = std::log(static_cast<long double>(k));
    worst = std::max(worst, pre[k - 1] + (1 - k) * static_cast<long double>(q[k - 1]) - k * lk / 2);
    const long double rhs = k * std::log(11.0L * k / 4) / 2;
    for (int l = 1; l <= std::min(k - 1, n - k); ++l)
      worst = std::max(worst, pre[k - 1] + (1 - l) * static_cast<long double>(q[k - 1]) -
                                  static_cast<long double>(k - l) * q[k + l - 1] - rhs);
  }
  return worst;
}

}  // namespace

TEST(ClosedForms, WilkinsonSums) {
  EXPECT_EQ(wilkinson_bound_closed_form(1).exact_sum, 0.0);
  EXPECT_NEAR(wilkinson_bound_closed_form(2).exact_sum, std::log(2.0), 1e-15);
  for (int n = 1; n <= 5000; ++n) {
    const auto w = wilkinson_bound_closed_form(n);
    ASSERT_LE(w.exact_sum, w.simplified + 1e-12) << n;
  }
  EXPECT_NEAR(wilkinson_bound_closed_form(777).exact_sum, static_cast<double>(oracle::wilkinson_sum(777)), 1e-12);
  EXPECT_NEAR(geomean_bound_closed_form(777), static_cast<double>(oracle::geomean_sum(777)), 1e-12);
}

TEST(ClosedForms, SquaredLogCurve) {
  EXPECT_EQ(theorem1_bound(1), 0.0);
  EXPECT_NEAR(constants().alpha, 0.20781, 1e-5);
  for (int n = 1; n <= 100; ++n)
    EXPECT_GE(theorem1_bound(n), wilkinson_bound_closed_form(n).exact_sum) << n;
  for (int n : {2, 17, 1000, 5000}) {
    const Rational lo = theorem1_bound_lower(n);
    const double ln = std::log(static_cast<long double>(n));
    EXPECT_LE(lo.get_d(), kAlpha * ln * ln + 0.91 * ln + 1e-12);
    EXPECT_NEAR(lo.get_d(), theorem1_bound(n), 1e-12);
  }
}

TEST(Constants, ReproducibleFromFormulas) {
  const auto c = constants();
  EXPECT_NEAR(c.alpha, kAlpha, 1e-12);
  EXPECT_EQ(c.beta, 0.41);
  EXPECT_NEAR(c.theorem1_log_coefficient, 0.91, 1e-12);
  EXPECT_NEAR(c.lambert_w_2e * std::exp(c.lambert_w_2e), 2.0 * std::numbers::e, 1e-12);
  EXPECT_NEAR(c.t_star, std::exp(c.lambert_w_2e - 1.0) - 1.0, 1e-12);
  EXPECT_NEAR(c.gamma_star, gamma_of_t(c.t_star), 1e-12);
  EXPECT_EQ(c.wilkinson_exponent, 0.25);
}

TEST(LambertW, InvertsProductLog) {
  EXPECT_EQ(lambert_w(0.0), 0.0);
  EXPECT_NEAR(lambert_w(std::numbers::e), 1.0, 1e-14);
  for (double x : {1e-6, 0.3, 1.0, 5.4, 100.0, 1e8}) {
    const double w = lambert_w(x);
    EXPECT_NEAR(w * std::exp(w), x, 1e-13 * std::max(1.0, x));
  }
  EXPECT_THROW(lambert_w(-0.1), std::domain_error);
}

TEST(GammaOfT, EndpointsAndBandRatio) {
  EXPECT_DOUBLE_EQ(gamma_of_t(0.0), 0.25);
  EXPECT_DOUBLE_EQ(gamma_of_t(1.0), 0.25);
  EXPECT_NEAR(gamma_of_t(std::numbers::sqrt2 - 1.0), kAlpha, 1e-15);
  EXPECT_THROW(gamma_of_t(-0.01), std::domain_error);
  EXPECT_THROW(gamma_of_t(1.01), std::domain_error);
}

TEST(GammaOfT, OptimumIsStationaryAndMinimal) {
  const auto opt = optimal_t();
  EXPECT_NEAR(opt.t_star, 0.4547, 1e-3);
  EXPECT_NEAR(opt.gamma_star, 0.207576, 1e-5);
  const double h = 1e-5;
  EXPECT_LT(std::fabs((gamma_of_t(opt.t_star + h) - gamma_of_t(opt.t_star - h)) / (2 * h)), 1e-6);
  for (int i = 0; i <= 100000; ++i) ASSERT_GE(gamma_of_t(i / 100000.0), opt.gamma_star - 1e-9);
  EXPECT_LT(kAlpha - opt.gamma_star, 0.00024);
  EXPECT_GT(kAlpha - opt.gamma_star, 0.0);
}

TEST(BaseCase, GridAndEnclosure) {
  const auto check = check_base_case(100.0, 1700.0, 0.1, 0.41);
  EXPECT_TRUE(check.passed);
  EXPECT_TRUE(check.enclosure_passed);
  EXPECT_EQ(check.points, 16000u);
  EXPECT_GT(check.worst_margin, 0.0);
}

TEST(BaseCase, DominantTermAndSmallArgument) {
  const double x = 1e6;
  const double lx = std::log(x);
  const double dominant = -(lx * lx / 4 + std::numbers::ln2);
  EXPECT_NEAR(base_case_lower(x), dominant, 0.01 * std::fabs(dominant));
  EXPECT_TRUE(std::isfinite(base_case_lower(std::numbers::e)));
  EXPECT_THROW(base_case_lower(1.0), std::domain_error);
}

TEST(InductiveStep, TailAndConstants) {
  const auto tail = check_g_tail(0.41, -0.08, 1700.0, 1e7, 200000);
  EXPECT_TRUE(tail.passed);
  EXPECT_TRUE(tail.enclosure_passed);
  EXPECT_GT(g_beta_y(0.41, 1700.0), -0.08);
  EXPECT_GE(g_beta_y(0.41, 1700.0), g_simplified_lower(1700.0));
  EXPECT_GT(g_simplified_lower(1700.0), -0.08);
  EXPECT_GT(induction_constant_term(0.41), 0.086);
  EXPECT_LT(std::fabs(g_beta_y(0.41, 1e9)), 1e-4);
  EXPECT_THROW(g_beta_y(0.41, 0.0), std::domain_error);
}

TEST(GrowthProfile, DiscreteMeanIdentityAndPadding) {
  const std::vector<double> q{0.0, -0.5, -0.75, -2.0, -1.0};
  const GrowthProfile p(q);
  for (int m = 1; m <= 5; ++m) {
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += q[i] - q[0];
    EXPECT_NEAR(p.F(m), mean / m, 1e-15) << m;
  }
  EXPECT_EQ(p.f(2.5), -0.75);
  EXPECT_EQ(p.f(3.0), -0.75);
  EXPECT_EQ(p.f(40.0), -1.0);
  EXPECT_NEAR(p.F(2.5), (0.0 - 0.5 + 0.5 * -0.75) / 2.5, 1e-15);
  EXPECT_NEAR(p.F(7.0), (-4.25 - 2.0) / 7.0, 1e-15);
  EXPECT_THROW(GrowthProfile({0.0, 0.5}), std::invalid_argument);
  EXPECT_NO_THROW(GrowthProfile({0.0, 0.5}, true));
  EXPECT_THROW(p.F(0.0), std::domain_error);
}

TEST(InductionCheck, ConstantProfileHolds) {
  const GrowthProfile flat(std::vector<double>(50, 0.0));
  for (double x = 1.0; std::numbers::sqrt2 * x <= 50; x += 0.25) {
    const auto c = induction_rhs_check(flat, x);
    EXPECT_TRUE(c.holds) << x;
    EXPECT_EQ(c.lhs, 0.0);
  }
  EXPECT_THROW(induction_rhs_check(flat, 40.0), std::domain_error);
  EXPECT_THROW(induction_rhs_check(flat, 0.0), std::domain_error);
}

TEST(InductionCheck, ImprovedOptimumHoldsOnGrid) {
  const auto sol = solve_float(build_improved_lp(500, {SelectorKind::Full, 4}));
  const GrowthProfile p(sol.primal);
  for (double x = 2.0; x <= 350.0; x += 0.5) EXPECT_TRUE(induction_rhs_check(p, x).holds) << x;
}

// The Wilkinson point is not feasible for the improved rows, so the
// inequality derived from them is not guaranteed and does fail.
TEST(InductionCheck, WilkinsonPointLacksThePrecondition) {
  const auto q = wilkinson_primal_point(500);
  EXPECT_FALSE(check_log_pivot_feasibility(q, PivotProgram::ImprovedLp, {SelectorKind::Full, 4}).feasible());
  const GrowthProfile p(q);
  int failures = 0;
  double first = 0.0;
  for (double x = 2.0; x <= 350.0; x += 0.5)
    if (!induction_rhs_check(p, x).holds && failures++ == 0) first = x;
  EXPECT_GT(failures, 0);
  EXPECT_GT(first, 40.0);
}

TEST(CandidateProfile, ShiftMatchesIndependentViolationScan) {
  for (double gamma : {0.0, 0.15, 0.25, 0.3}) {
    std::vector<double> q(1000);
    for (int k = 1; k <= 1000; ++k) q[k - 1] = -gamma * std::log(k) * std::log(k);
    const long double viol = max_violation(q);
    const auto cp = candidate_profile(gamma, 1000);
    EXPECT_NEAR(cp.shift, std::max(0.0, static_cast<double>(viol)), 1e-9 * (1.0 + std::fabs(viol))) << gamma;
    std::vector<double> shifted = cp.q;
    EXPECT_LE(max_violation(shifted), 1e-9) << gamma;
  }
}

TEST(CandidateProfile, FeasibilityScan) {
  EXPECT_TRUE(candidate_profile(0.0, 1000).feasible);
  EXPECT_EQ(candidate_profile(0.0, 1000).shift, 0.0);
  EXPECT_TRUE(candidate_profile(0.15, 1000).feasible);
  // Lower-order terms still dominate at this n: 0.25 needs no shift at all.
  const auto quarter = candidate_profile(0.25, 1000);
  EXPECT_TRUE(quarter.feasible);
  EXPECT_EQ(quarter.shift, 0.0);
  EXPECT_FALSE(candidate_profile(0.3, 1000).feasible);
  const double g = largest_feasible_gamma(1000, 2.0, {SelectorKind::Full, 4}, 1e-3);
  EXPECT_GT(g, 0.25);
  EXPECT_LT(g, 0.3);
}
