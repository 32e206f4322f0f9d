#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "growthbound/elimination.hpp"
#include "growthbound/lp_model.hpp"
#include "growthbound/lp_solve.hpp"
#include "oracles.hpp"

using namespace growthbound;

namespace {

const ConstraintSelector kFull{SelectorKind::Full, 4};
const ConstraintSelector kBand{SelectorKind::Band, 4};

CertifiedBound solve_and_certify(const LPInstance& lp) {
  const auto sol = solve_float(lp);
  EXPECT_EQ(sol.status, SolveStatus::Optimal);
  return certify(lp, sol);
}

}  // namespace

TEST(SolveFloat, WilkinsonHundredMatchesClosedForm) {
  const auto sol = solve_float(build_wilkinson_lp(100));
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, static_cast<double>(oracle::wilkinson_sum(100)), 1e-7);
}

TEST(SolveFloat, ImprovedFullHundredBeatsWilkinson) {
  const auto sol = solve_float(build_improved_lp(100, kFull));
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_LT(sol.objective, static_cast<double>(oracle::wilkinson_sum(100)) - 1e-3);
}

TEST(SolveFloat, OneDimensionalIsZero) {
  for (const auto& lp : {build_wilkinson_lp(1), build_improved_lp(1, kFull), build_geomean_lp(1)}) {
    const auto sol = solve_float(lp);
    EXPECT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_EQ(sol.objective, 0.0);
  }
}

TEST(SolveFloat, SolutionInvariants) {
  for (const auto& lp : {build_improved_lp(300, kBand), build_improved_lp(80, kFull), build_geomean_lp(200),
                         cumulative_transform(build_improved_lp(60, kFull))}) {
    const auto sol = solve_float(lp);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    double bmax = 0.0;
    for (const auto& r : lp.rows) bmax = std::max(bmax, std::fabs(r.rhs_float));
    EXPECT_LE(primal_infeasibility(lp, sol.primal), 1e-8 * (1.0 + bmax));
    for (double y : sol.dual) EXPECT_GE(y, -1e-10);
    EXPECT_LE(std::fabs(sol.objective - sol.dual_objective), 1e-7 * (1.0 + std::fabs(sol.objective)));
    EXPECT_EQ(sol.basis.size(), static_cast<std::size_t>(lp.n - 1));
  }
}

TEST(SolveFloat, PricingRulesAgreeAndBlandTerminates) {
  const auto lp = build_improved_lp(60, kFull);
  const auto se = solve_float(lp);
  SolverOptions bland;
  bland.pricing = PricingRule::Bland;
  const auto b = solve_float(lp, bland);
  SolverOptions dantzig;
  dantzig.pricing = PricingRule::Dantzig;
  const auto d = solve_float(lp, dantzig);
  ASSERT_EQ(b.status, SolveStatus::Optimal);
  ASSERT_EQ(d.status, SolveStatus::Optimal);
  EXPECT_NEAR(b.objective, se.objective, 1e-9);
  EXPECT_NEAR(d.objective, se.objective, 1e-9);
  EXPECT_EQ(b.bland_iterations, b.iterations);
  EXPECT_LT(b.iterations, 50L * static_cast<long>(lp.rows.size() + lp.n));
}

TEST(SolveFloat, DeterministicAcrossRuns) {
  const auto lp = build_improved_lp(250, kBand);
  const auto a = solve_float(lp);
  const auto b = solve_float(lp);
  EXPECT_EQ(a.basis, b.basis);
  EXPECT_EQ(a.primal, b.primal);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SolveFloat, IterationLimitAndUnboundedStatuses) {
  SolverOptions opts;
  opts.max_iterations = 1;
  EXPECT_EQ(solve_float(build_improved_lp(100, kFull), opts).status, SolveStatus::IterationLimit);

  auto lp = build_wilkinson_lp(5);
  lp.objective = {1, 0, 0, 0, 0};
  EXPECT_EQ(solve_float(lp).status, SolveStatus::Unbounded);
}

TEST(Certify, WilkinsonFiftyMatchesClosedForm) {
  const int n = 50;
  const auto lp = build_wilkinson_lp(n);
  const auto cert = solve_and_certify(lp);
  ASSERT_TRUE(cert.verified);
  Rational expected(0);
  for (int k = 2; k < n; ++k) expected += rhs_enclosure(RhsKind::Wilkinson, k) / Rational((k - 1) * k);
  expected += rhs_enclosure(RhsKind::Wilkinson, n) / Rational(n - 1);
  EXPECT_EQ(*cert.bound, expected);
  EXPECT_LE(std::fabs(cert.bound->get_d() - static_cast<double>(oracle::wilkinson_sum(n))), std::ldexp(1.0, -50));
  EXPECT_EQ(cert.method, CertificationMethod::BasisRefactor);
}

TEST(Certify, ImprovedBandBelowWilkinson) {
  const auto cert = solve_and_certify(build_improved_lp(200, kBand));
  ASSERT_TRUE(cert.verified);
  const auto wil = solve_and_certify(build_wilkinson_lp(200));
  ASSERT_TRUE(wil.verified);
  EXPECT_LT(*cert.bound, *wil.bound);
}

TEST(Certify, LargeInstancesUseRepairedDual) {
  const auto lp = build_improved_lp(400, kBand);
  const auto sol = solve_float(lp);
  const auto cert = certify(lp, sol);
  ASSERT_TRUE(cert.verified);
  EXPECT_EQ(cert.method, CertificationMethod::RepairedDual);
  EXPECT_GE(cert.bound->get_d(), sol.objective - 1e-6);
  EXPECT_LE(cert.bound->get_d(), sol.objective + 1e-6);
  const auto check = verify_dual(lp, cert.multipliers);
  EXPECT_TRUE(check.ok);
  EXPECT_EQ(check.bound, *cert.bound);
}

TEST(Certify, CorruptedDualIsRejected) {
  const auto lp = build_improved_lp(30, kFull);
  const auto cert = solve_and_certify(lp);
  ASSERT_TRUE(cert.verified);
  auto y = cert.multipliers;
  const auto pos = std::find_if(y.begin(), y.end(), [](const Rational& v) { return sgn(v) > 0; });
  ASSERT_NE(pos, y.end());
  *pos = -*pos;
  const auto neg = verify_dual(lp, y);
  EXPECT_FALSE(neg.ok);
  EXPECT_FALSE(neg.reason.empty());

  y = cert.multipliers;
  y[1] += Rational(1, 1000);
  EXPECT_FALSE(verify_dual(lp, y).ok);
  EXPECT_FALSE(verify_dual(lp, std::vector<Rational>(3)).ok);
}

TEST(Certify, FailedSolveNeverYieldsBound) {
  const auto lp = build_improved_lp(100, kFull);
  SolverOptions opts;
  opts.max_iterations = 1;
  const auto cert = certify(lp, solve_float(lp, opts));
  if (cert.verified) {
    // Exact repair may still reach optimality; the bound must then be the true optimum.
    EXPECT_EQ(*cert.bound, *exact_simplex(lp).bound);
  } else {
    EXPECT_FALSE(cert.bound.has_value());
  }
}

TEST(ClosedFormDual, TwoAndTen) {
  const auto two = wilkinson_closed_form_dual(2, WilkinsonObjective::HeadTail);
  ASSERT_TRUE(two.verified);
  EXPECT_EQ(two.multipliers, (std::vector<Rational>{0, 1}));
  EXPECT_EQ(*two.bound, rhs_enclosure(RhsKind::Wilkinson, 2));
  EXPECT_EQ(two.method, CertificationMethod::ClosedForm);

  const auto ten = wilkinson_closed_form_dual(10, WilkinsonObjective::HeadTail);
  ASSERT_TRUE(ten.verified);
  EXPECT_NEAR(ten.bound->get_d(), static_cast<double>(oracle::wilkinson_sum(10)), 1e-15);
  EXPECT_GE(*ten.bound, oracle::wilkinson_sum_lower(10));

  const auto geo = wilkinson_closed_form_dual(10, WilkinsonObjective::GeoMean);
  ASSERT_TRUE(geo.verified);
  EXPECT_NEAR(geo.bound->get_d(), static_cast<double>(oracle::geomean_sum(10)), 1e-15);
  EXPECT_THROW(wilkinson_closed_form_dual(1, WilkinsonObjective::HeadTail), std::invalid_argument);
}

TEST(WilkinsonPrimalPoint, SmallCasesAndTightness) {
  EXPECT_EQ(wilkinson_primal_point(1), std::vector<double>{0.0});
  const auto two = wilkinson_primal_point(2);
  EXPECT_NEAR(two[1], -std::log(2.0), 1e-15);
  const auto q = wilkinson_primal_point(100);
  EXPECT_NEAR(q.front() - q.back(), static_cast<double>(oracle::wilkinson_sum(100)), 1e-10);
  const auto lp = build_wilkinson_lp(100);
  const auto ps = prefix_sums(q);
  for (const auto& r : lp.rows) EXPECT_NEAR(row_activity(r, q, ps), r.rhs_float, 1e-9);
}

TEST(ExactSimplex, WilkinsonTwentyEqualsClosedForm) {
  const auto exact = exact_simplex(build_wilkinson_lp(20));
  ASSERT_TRUE(exact.verified);
  EXPECT_EQ(*exact.bound, *wilkinson_closed_form_dual(20, WilkinsonObjective::HeadTail).bound);
  EXPECT_EQ(exact.method, CertificationMethod::ExactSimplex);
}

TEST(ExactSimplex, ImprovedTwentyBelowWilkinsonAndGuards) {
  const auto wil = exact_simplex(build_wilkinson_lp(20));
  const auto imp = exact_simplex(build_improved_lp(20, kFull));
  ASSERT_TRUE(imp.verified);
  EXPECT_LE(*imp.bound, *wil.bound);
  const auto one = exact_simplex(build_wilkinson_lp(1));
  ASSERT_TRUE(one.verified);
  EXPECT_EQ(*one.bound, 0);
  ExactSimplexOptions tiny;
  tiny.max_rows = 10;
  EXPECT_THROW(exact_simplex(build_improved_lp(20, kFull), tiny), std::length_error);
}

TEST(ExactSimplex, AgreesWithCertifiedFloatSolveOnEverySelector) {
  for (int n : {2, 5, 12, 20})
    for (auto kind : {SelectorKind::Full, SelectorKind::WilkinsonOnly, SelectorKind::Band, SelectorKind::Diagonal,
                      SelectorKind::BandDiagonal, SelectorKind::Theorem1}) {
      const auto lp = build_improved_lp(n, {kind, 4});
      const auto exact = exact_simplex(lp);
      const auto cert = solve_and_certify(lp);
      ASSERT_TRUE(exact.verified);
      ASSERT_TRUE(cert.verified);
      EXPECT_EQ(*exact.bound, *cert.bound) << n << " " << to_string(kind);
    }
  for (int n : {5, 15}) {
    const auto lp = build_geomean_lp(n);
    EXPECT_EQ(*exact_simplex(lp).bound, *solve_and_certify(lp).bound);
  }
}

TEST(ExactSimplex, PrimalIsFeasibleAndTight) {
  const auto lp = build_improved_lp(15, kFull);
  const auto res = exact_simplex_solve(lp);
  ASSERT_TRUE(res.certificate.verified);
  Rational obj(0);
  for (int j = 0; j < lp.n; ++j) obj += lp.objective[j] * res.primal[j];
  EXPECT_EQ(obj, *res.certificate.bound);
  for (const auto& r : lp.rows) {
    Rational act(0);
    for (const auto& [v, c] : r.coefficients()) act += res.primal[v] * c;
    EXPECT_LE(act, r.rhs_upper);
  }
}

TEST(WeakDuality, CertifiedBoundsDominateFeasiblePoints) {
  const auto cert = solve_and_certify(build_wilkinson_lp(60));
  const auto q = wilkinson_primal_point(60);
  EXPECT_GE(cert.bound->get_d(), q.front() - q.back() - 1e-12);

  std::vector<Rational> bounds(13);
  for (int n = 2; n <= 12; ++n) bounds[n] = *solve_and_certify(build_improved_lp(n, kFull)).bound;
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 11;
    const auto a = oracle::random_rational_matrix(rng, n, n);
    if (oracle::bareiss_det(a) == 0) continue;
    const auto trace = eliminate(a, PivotStrategy::Complete);
    EXPECT_TRUE(oracle::log_at_most(growth_factor(trace), bounds[n])) << n;
  }
}

TEST(WeakDuality, WilkinsonMatrixCompleteGrowthBelowBound) {
  const auto trace = eliminate(wilkinson_matrix<Rational>(100), PivotStrategy::Complete);
  const auto cert = solve_and_certify(build_improved_lp(100, kBand));
  ASSERT_TRUE(cert.verified);
  EXPECT_TRUE(oracle::log_at_most(growth_factor(trace), *cert.bound));
}
