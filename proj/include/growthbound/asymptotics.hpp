#pragma once

#include <cstddef>
#include <vector>

#include "growthbound/lp_model.hpp"
#include "growthbound/scalar.hpp"

namespace growthbound {

/// Principal branch of the Lambert W function for x >= 0, by Newton's method
/// on w e^w = x.
double lambert_w(double x);

struct ConstantsTable {
  double alpha = 0.0;        // 1 / (2 (2 + (2 - sqrt2) ln 2))
  double beta = 0.41;        // ln n coefficient in the induction
  double theorem1_log_coefficient = 0.91;  // beta + 1/2
  double gamma_star = 0.0;   // min over t in [0, 1] of gamma_of_t
  double t_star = 0.0;       // exp(W(2e) - 1) - 1
  double lambert_w_2e = 0.0;
  double wilkinson_exponent = 0.25;
};

ConstantsTable constants();

struct WilkinsonClosedForm {
  double exact_sum = 0.0;   // (1/2)(ln n + sum_{k=2}^n ln k / (k-1))
  double simplified = 0.0;  // ln(2 sqrt(n) n^(ln n / 4))
};

WilkinsonClosedForm wilkinson_bound_closed_form(int n);
/// (1/2) sum_{k=2}^n ln k / (k-1).
double geomean_bound_closed_form(int n);

/// alpha ln^2 n + 0.91 ln n.
double theorem1_bound(double n);
/// Rational lower enclosure of theorem1_bound(n), by directed rounding.
Rational theorem1_bound_lower(int n);

/// 1 / (4 (1 + (1 - t) ln(1 + t))) on [0, 1].
double gamma_of_t(double t);

struct OptimalT {
  double t_star = 0.0;
  double gamma_star = 0.0;
};
OptimalT optimal_t();

/// Lower bound on F(x) implied by the Wilkinson and geometric-mean bounds:
///   -(1/x)((ln x + 1/x)^2/4 + (ln x + 1/x)/2 + ln 2) - (ln^2 x / 4 + ln 2).
double base_case_lower(double x);

/// The O(ln^2 y / y) remainder of the inductive step.
double g_beta_y(double beta, double y);
/// The beta-linear constant left over after the ln^2 y and ln y terms cancel.
double induction_constant_term(double beta);
/// -(3/2) ln^2 y / y - 6 ln y / y - 3 / y - 1 / y^2, a lower bound for g(0.41, y).
double g_simplified_lower(double y);

/// Outcome of a dense grid sweep, optionally tightened to a whole-interval
/// statement with monotone enclosures between neighbouring grid points.
struct GridCheck {
  bool passed = false;
  bool enclosure_passed = false;
  std::size_t points = 0;
  double worst_margin = 0.0;
  double worst_at = 0.0;
};

/// base_case_lower(x) + alpha ln^2 x + beta ln x > 0 on the grid lo + step i in (lo, hi].
GridCheck check_base_case(double lo = 100.0, double hi = 1700.0, double step = 0.1, double beta = 0.41);
/// g(beta, y) > floor on a geometric grid over (lo, hi].
GridCheck check_g_tail(double beta = 0.41, double floor = -0.08, double lo = 1700.0, double hi = 1e7,
                       std::size_t points = 200000);

/// q_1..q_n with f(x) = q_ceil(x) - q_1 and F(x) = (1/x) int_0^x f, padded by
/// q_k = q_n for k > n.
class GrowthProfile {
 public:
  explicit GrowthProfile(std::vector<double> q, bool allow_positive = false);

  int n() const { return static_cast<int>(q_.size()); }
  const std::vector<double>& q() const { return q_; }
  double f(double x) const;
  double F(double x) const;

 private:
  double offset(long k) const;  // q_k - q_1 with padding
  double offset_sum(long m) const;  // sum_{k=1}^m (q_k - q_1)

  std::vector<double> q_;
  std::vector<double> prefix_;  // prefix_[m] = sum_{k<=m} (q_k - q_1)
};

struct InductionCheck {
  bool holds = false;
  double lhs = 0.0;          // F(ceil x)
  double rhs_discrete = 0.0;  // first line, from the (ceil x, ceil(sqrt2 x) - ceil x) row
  double rhs_relaxed = 0.0;   // second line
};

/// Both lines of the inequality bounding F(ceil x) by the (k, l) =
/// (ceil x, ceil(sqrt2 x) - ceil x) row. Needs 0 < x and sqrt2 x <= n.
InductionCheck induction_rhs_check(const GrowthProfile& profile, double x, double tol = 1e-9);

struct CandidateProfile {
  std::vector<double> q;
  double gamma = 0.0;
  double shift = 0.0;  // added to q_k for k >= 2
  bool feasible = false;
  FeasibilityReport report;
};

/// q_k = -gamma ln^2 k + s (k >= 2), with the least s in [0, max_shift] that
/// makes every improved-LP row (for `selector`) hold. Every row sees the shift
/// with coefficient -1, so the least shift is the largest violation.
CandidateProfile candidate_profile(double gamma, int n, double max_shift = 2.0,
                                   ConstraintSelector selector = {SelectorKind::Full, 4});

/// Largest gamma (to `resolution`) whose candidate profile is feasible at n.
double largest_feasible_gamma(int n, double max_shift = 2.0, ConstraintSelector selector = {SelectorKind::Full, 4},
                              double resolution = 1e-4);

}  // namespace growthbound
