#include "growthbound/asymptotics.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace growthbound {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLn2 = std::numbers::ln2;

double alpha_value() { return 1.0 / (2.0 * (2.0 + (2.0 - kSqrt2) * kLn2)); }

double theorem1_margin(double x, double beta) {
  const double l = std::log(x);
  return base_case_lower(x) + alpha_value() * l * l + beta * l;
}

}  // namespace

double lambert_w(double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("lambert_w needs a finite x >= 0");
  if (x == 0.0) return 0.0;
  double w = x < std::numbers::e ? std::log1p(x) : std::log(x) - std::log(std::log(x));
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double r = w * ew - x;
    const double step = r / (ew * (w + 1.0));
    w -= step;
    if (std::fabs(step) <= 1e-16 * (1.0 + std::fabs(w)) || std::fabs(r) <= 1e-14 * x) break;
  }
  return w;
}

ConstantsTable constants() {
  ConstantsTable c;
  c.alpha = alpha_value();
  const auto opt = optimal_t();
  c.t_star = opt.t_star;
  c.gamma_star = opt.gamma_star;
  c.lambert_w_2e = lambert_w(2.0 * std::numbers::e);
  return c;
}

WilkinsonClosedForm wilkinson_bound_closed_form(int n) {
  if (n < 1) throw std::invalid_argument("closed form needs n >= 1");
  WilkinsonClosedForm out;
  const double ln_n = std::log(static_cast<double>(n));
  out.exact_sum = 0.5 * ln_n + geomean_bound_closed_form(n);
  out.simplified = kLn2 + 0.5 * ln_n + 0.25 * ln_n * ln_n;
  return out;
}

double geomean_bound_closed_form(int n) {
  if (n < 1) throw std::invalid_argument("closed form needs n >= 1");
  double s = 0.0;
  for (int k = 2; k <= n; ++k) s += std::log(static_cast<double>(k)) / (k - 1);
  return 0.5 * s;
}

double theorem1_bound(double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("theorem bound needs n >= 1");
  const double l = std::log(n);
  return alpha_value() * l * l + 0.91 * l;
}

Rational theorem1_bound_lower(int n) {
  if (n < 1) throw std::invalid_argument("theorem bound needs n >= 1");
  constexpr mpfr_prec_t prec = 256;
  mpfr_t den, alpha, l, t, acc;
  mpfr_inits2(prec, den, alpha, l, t, acc, static_cast<mpfr_ptr>(nullptr));
  // alpha rounded down: every step of the denominator rounds up.
  mpfr_sqrt_ui(t, 2, MPFR_RNDD);
  mpfr_ui_sub(den, 2, t, MPFR_RNDU);
  mpfr_const_log2(t, MPFR_RNDU);
  mpfr_mul(den, den, t, MPFR_RNDU);
  mpfr_add_ui(den, den, 2, MPFR_RNDU);
  mpfr_mul_ui(den, den, 2, MPFR_RNDU);
  mpfr_ui_div(alpha, 1, den, MPFR_RNDD);
  // ln n >= 0, so lower bounds multiply.
  mpfr_set_ui(l, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_log(l, l, MPFR_RNDD);
  mpfr_sqr(acc, l, MPFR_RNDD);
  mpfr_mul(acc, acc, alpha, MPFR_RNDD);
  mpfr_mul_ui(t, l, 91, MPFR_RNDD);
  mpfr_div_ui(t, t, 100, MPFR_RNDD);
  mpfr_add(acc, acc, t, MPFR_RNDD);
  Rational out;
  mpfr_get_q(out.get_mpq_t(), acc);
  mpfr_clears(den, alpha, l, t, acc, static_cast<mpfr_ptr>(nullptr));
  return out;
}

double gamma_of_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("gamma_of_t needs t in [0, 1]");
  return 1.0 / (4.0 * (1.0 + (1.0 - t) * std::log1p(t)));
}

OptimalT optimal_t() {
  const double w = lambert_w(2.0 * std::numbers::e);
  OptimalT out;
  out.t_star = std::exp(w - 1.0) - 1.0;
  out.gamma_star = gamma_of_t(out.t_star);
  return out;
}

double base_case_lower(double x) {
  if (!(x > 1.0)) throw std::domain_error("base case bound needs x > 1");
  const double l = std::log(x) + 1.0 / x;
  const double lx = std::log(x);
  return -(1.0 / x) * (l * l / 4.0 + l / 2.0 + kLn2) - (lx * lx / 4.0 + kLn2);
}

double g_beta_y(double beta, double y) {
  if (!(y > 0.0)) throw std::domain_error("g needs y > 0");
  const double d = 2.0 + (2.0 - kSqrt2) * kLn2;
  const double l = std::log(y);
  const double t1 = -(2.0 + kSqrt2) / d * l * l / y;
  const double t2 = -((4.0 + 2.0 * kSqrt2) * beta + (5.0 + 3.0 * kSqrt2) * kLn2 / d) * l / y;
  const double t3 = ((11.0 + 7.0 * kSqrt2) * kLn2 * kLn2 / (4.0 * d) - (5.0 + 3.0 * kSqrt2) * beta * kLn2 -
                     (kSqrt2 + 1.0) * kLn2 / 2.0) /
                    y;
  const double t4 = -kSqrt2 / d / (y * y);
  return t1 + t2 + t3 + t4;
}

double induction_constant_term(double beta) {
  const double d = 2.0 + (2.0 - kSqrt2) * kLn2;
  const double l114 = std::log(11.0 / 4.0);
  const double lin = ((kSqrt2 - 1.0) * kLn2 + kSqrt2) / kSqrt2 * beta;
  const double c = ((2.0 - kSqrt2) * kLn2 * kLn2 - 4.0 * (2.0 - kSqrt2) * (l114 - 1.0) * kLn2 - 8.0 * l114) / (8.0 * d);
  return lin + c;
}

double g_simplified_lower(double y) {
  if (!(y > 0.0)) throw std::domain_error("g bound needs y > 0");
  const double l = std::log(y);
  return -1.5 * l * l / y - 6.0 * l / y - 3.0 / y - 1.0 / (y * y);
}

GridCheck check_base_case(double lo, double hi, double step, double beta) {
  if (!(lo > 1.0) || !(hi > lo) || !(step > 0.0)) throw std::invalid_argument("bad base-case grid");
  GridCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const long count = static_cast<long>(std::llround((hi - lo) / step));
  bool enclosed = true;
  double prev_x = lo;
  double prev_lower = base_case_lower(lo);
  for (long i = 1; i <= count; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    const double m = theorem1_margin(x, beta);
    ++out.points;
    if (m < out.worst_margin) {
      out.worst_margin = m;
      out.worst_at = x;
    }
    // Both sides decrease in x; on [prev_x, x] the bound is at least its
    // right-end value and the target at most its left-end value.
    const double lower = base_case_lower(x);
    const double lp = std::log(prev_x);
    if (lower > prev_lower || lower + alpha_value() * lp * lp + beta * lp <= 0.0) enclosed = false;
    prev_x = x;
    prev_lower = lower;
  }
  out.passed = out.worst_margin > 0.0;
  out.enclosure_passed = out.passed && enclosed;
  return out;
}

GridCheck check_g_tail(double beta, double floor, double lo, double hi, std::size_t points) {
  if (!(hi > lo) || !(lo > 0.0) || points < 2) throw std::invalid_argument("bad g grid");
  GridCheck out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  const double ratio = std::log(hi / lo) / static_cast<double>(points);
  bool increasing = true;
  double prev = g_beta_y(beta, lo);
  for (std::size_t i = 1; i <= points; ++i) {
    const double y = i == points ? hi : lo * std::exp(ratio * static_cast<double>(i));
    const double g = g_beta_y(beta, y);
    const double m = g - floor;
    ++out.points;
    if (m < out.worst_margin) {
      out.worst_margin = m;
      out.worst_at = y;
    }
    if (g < prev) increasing = false;
    prev = g;
  }
  out.passed = out.worst_margin > 0.0;
  // An increasing g on the grid is bounded below by its value at the left end.
  out.enclosure_passed = out.passed && increasing && g_beta_y(beta, lo) > floor;
  return out;
}

GrowthProfile::GrowthProfile(std::vector<double> q, bool allow_positive) : q_(std::move(q)) {
  if (q_.empty()) throw std::invalid_argument("growth profile needs at least one entry");
  prefix_.assign(q_.size() + 1, 0.0);
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const double off = q_[k] - q_[0];
    if (!allow_positive && off > 1e-9 * (1.0 + std::fabs(q_[0])))
      throw std::invalid_argument("growth profile needs q_k <= q_1 for every k");
    prefix_[k + 1] = prefix_[k] + off;
  }
}

double GrowthProfile::offset(long k) const {
  const long idx = std::min<long>(k, n()) - 1;
  return q_[idx] - q_[0];
}

double GrowthProfile::offset_sum(long m) const {
  if (m <= n()) return prefix_[m];
  return prefix_[n()] + static_cast<double>(m - n()) * (q_.back() - q_[0]);
}

double GrowthProfile::f(double x) const {
  if (!(x > 0.0)) throw std::domain_error("f needs x > 0");
  return offset(static_cast<long>(std::ceil(x)));
}

double GrowthProfile::F(double x) const {
  if (!(x > 0.0)) throw std::domain_error("F needs x > 0");
  const double fl = std::floor(x);
  const long m = static_cast<long>(fl);
  const double frac = x - fl;
  const double partial = frac > 0.0 ? frac * f(x) : 0.0;
  return (offset_sum(m) + partial) / x;
}

InductionCheck induction_rhs_check(const GrowthProfile& profile, double x, double tol) {
  if (!(x > 0.0)) throw std::domain_error("induction check needs x > 0");
  if (kSqrt2 * x > profile.n()) throw std::domain_error("induction check needs sqrt2 x <= n");
  InductionCheck out;
  const double kc = std::ceil(x);
  const double mc = std::ceil(kSqrt2 * x);
  const double fx = profile.f(x);
  const double fs = profile.f(kSqrt2 * x);
  out.lhs = profile.F(kc);
  out.rhs_discrete = std::log(11.0 * kc / 4.0) / 2.0 + (2.0 * kc - mc) / kc * fs + (mc - kc) / kc * fx;
  out.rhs_relaxed = std::log(11.0 * x / 4.0) / 2.0 + 1.0 / (2.0 * x) + (kSqrt2 - 1.0 - kSqrt2 / x) * (kSqrt2 * fs + fx);
  const double slack = tol * (1.0 + std::fabs(out.lhs));
  out.holds = out.lhs <= out.rhs_discrete + slack && out.lhs <= out.rhs_relaxed + slack;
  return out;
}

CandidateProfile candidate_profile(double gamma, int n, double max_shift, ConstraintSelector selector) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("candidate profile needs gamma >= 0");
  if (n < 1) throw std::invalid_argument("candidate profile needs n >= 1");
  CandidateProfile out;
  out.gamma = gamma;
  out.q.resize(n);
  for (int k = 1; k <= n; ++k) {
    const double l = std::log(static_cast<double>(k));
    out.q[k - 1] = -gamma * l * l;
  }
  const auto base = check_log_pivot_feasibility(out.q, PivotProgram::ImprovedLp, selector, 0.0);
  double shift = std::max(0.0, -base.min_slack);
  if (shift > 0.0) shift = std::nextafter(shift * (1.0 + 1e-12), std::numeric_limits<double>::infinity());
  out.shift = shift;
  for (int k = 2; k <= n; ++k) out.q[k - 1] += shift;
  out.report = check_log_pivot_feasibility(out.q, PivotProgram::ImprovedLp, selector);
  out.feasible = shift <= max_shift && out.report.feasible();
  return out;
}

double largest_feasible_gamma(int n, double max_shift, ConstraintSelector selector, double resolution) {
  double lo = 0.0;
  double hi = 0.25;
  while (candidate_profile(hi, n, max_shift, selector).feasible) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) return lo;
  }
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (candidate_profile(mid, n, max_shift, selector).feasible) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace growthbound
