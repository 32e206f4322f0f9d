#include <cmath>
#include <sstream>
#include <string>

#include "growthbound/lp_solve.hpp"
#include "lp_reduced.hpp"

namespace growthbound {

std::string_view to_string(CertificationMethod m) {
  switch (m) {
    case CertificationMethod::BasisRefactor: return "basis-refactor";
    case CertificationMethod::RepairedDual: return "repaired-dual";
    case CertificationMethod::ClosedForm: return "closed-form";
    case CertificationMethod::ExactSimplex: return "exact-simplex";
  }
  return "?";
}

DualCheck verify_dual(const LPInstance& lp, std::span<const Rational> y) {
  DualCheck out;
  if (y.size() != lp.rows.size()) {
    out.reason = "multiplier count " + std::to_string(y.size()) + " differs from row count " +
                 std::to_string(lp.rows.size());
    return out;
  }
  for (std::size_t r = 0; r < y.size(); ++r)
    if (sgn(y[r]) < 0) {
      out.reason = "negative multiplier on row (" + std::to_string(lp.rows[r].k) + ", " +
                   std::to_string(lp.rows[r].ell) + ")";
      return out;
    }
  const auto aty = transpose_product(lp, y);
  for (int j = 0; j < lp.n; ++j)
    if (aty[j] != lp.objective[j]) {
      out.reason = "combined rows differ from the objective at variable " + std::to_string(j + 1);
      return out;
    }
  Rational bound(0);
  for (std::size_t r = 0; r < y.size(); ++r)
    if (sgn(y[r]) != 0) bound += y[r] * lp.rows[r].rhs_upper;
  out.ok = true;
  out.bound = std::move(bound);
  return out;
}

namespace {

// Solves W^T z = r over the Wilkinson rows k = 2..n, with r in q coordinates.
// Column j reads sum_{k>j} z_k - (j-1) z_j = r_j; column 1 is implied when
// the entries of r sum to zero.
std::vector<Rational> wilkinson_transpose_solve(std::span<const Rational> r) {
  const int n = static_cast<int>(r.size());
  std::vector<Rational> z(n + 1, Rational(0));
  Rational tail(0);
  for (int j = n; j >= 2; --j) {
    z[j] = (tail - r[j - 1]) / (j - 1);
    tail += z[j];
  }
  return z;
}

std::vector<Rational> q_objective(const LPInstance& lp) {
  if (lp.form == LpForm::QForm) return lp.objective;
  return detail::cumulative_to_q(lp.objective);
}

Rational round_to_grid(double v, int bits) {
  if (!(v > 0.0)) return Rational(0);
  Integer z;
  mpz_set_d(z.get_mpz_t(), std::nearbyint(std::ldexp(v, bits)));
  Rational out(z);
  mpq_div_2exp(out.get_mpq_t(), out.get_mpq_t(), static_cast<unsigned long>(bits));
  return out;
}

CertifiedBound repaired_dual(const LPInstance& lp, const PrimalDualSolution& sol, int bits) {
  CertifiedBound out;
  out.method = CertificationMethod::RepairedDual;
  const int n = lp.n;
  std::vector<long> wrow(n + 1, -1);
  for (std::size_t r = 0; r < lp.rows.size(); ++r)
    if (lp.rows[r].ell == 0 && wrow[lp.rows[r].k] < 0) wrow[lp.rows[r].k] = static_cast<long>(r);
  for (int k = 2; k <= n; ++k)
    if (wrow[k] < 0) {
      out.diagnostics = "repair needs every Wilkinson row";
      return out;
    }

  std::vector<Rational> y(lp.rows.size());
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = round_to_grid(sol.dual[r], bits);

  auto residual = transpose_product(lp, y);
  for (int j = 0; j < n; ++j) residual[j] = lp.objective[j] - residual[j];
  if (lp.form == LpForm::CumulativeForm) residual = detail::cumulative_to_q(residual);
  const auto z = wilkinson_transpose_solve(residual);
  for (int k = 2; k <= n; ++k) y[wrow[k]] += z[k];

  // Mix with the Wilkinson-basis dual until every multiplier is nonnegative.
  Rational eps(0);
  std::vector<Rational> w;
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (sgn(y[r]) >= 0) continue;
    if (w.empty()) {
      const auto wz = wilkinson_transpose_solve(q_objective(lp));
      w.assign(y.size(), Rational(0));
      for (int k = 2; k <= n; ++k) w[wrow[k]] = wz[k];
    }
    const Rational need = -y[r] / (w[r] - y[r]);
    if (need > eps) eps = need;
  }
  if (sgn(eps) > 0) {
    Rational step(1);
    while (step / 2 >= eps) step /= 2;
    eps = step;
    for (std::size_t r = 0; r < y.size(); ++r) y[r] = (1 - eps) * y[r] + eps * w[r];
    std::ostringstream msg;
    msg << "mixed with the Wilkinson dual at weight 2^" << -static_cast<long>(mpz_sizeinbase(eps.get_den_mpz_t(), 2) - 1);
    out.diagnostics = msg.str();
  }
  const auto check = verify_dual(lp, y);
  if (!check.ok) {
    out.diagnostics = "repaired dual rejected: " + check.reason;
    return out;
  }
  out.multipliers = std::move(y);
  out.bound = check.bound;
  out.verified = true;
  return out;
}

}  // namespace

CertifiedBound certify(const LPInstance& lp, const PrimalDualSolution& sol, const CertifyOptions& opts) {
  CertifiedBound out;
  if (sol.status != SolveStatus::Optimal) {
    out.diagnostics = "solution status is " + std::string(to_string(sol.status));
    return out;
  }
  if (sol.dual.size() != lp.rows.size()) {
    out.diagnostics = "dual vector does not match the instance";
    return out;
  }
  std::string notes;
  if (lp.n - 1 <= opts.exact_dimension_limit) {
    try {
      ExactSimplexOptions eo;
      eo.max_pivots = opts.max_exact_pivots;
      auto res = exact_simplex_solve(lp, eo, sol.basis);
      res.certificate.method = CertificationMethod::BasisRefactor;
      if (res.pivots > 0) res.certificate.diagnostics = std::to_string(res.pivots) + " exact repair pivots";
      if (res.certificate.verified) return res.certificate;
      notes = res.certificate.diagnostics + "; ";
    } catch (const std::exception& e) {
      notes = std::string("exact refactor failed: ") + e.what() + "; ";
    }
  }
  out = repaired_dual(lp, sol, opts.rounding_bits);
  if (!notes.empty()) out.diagnostics = notes + out.diagnostics;
  return out;
}

CertifiedBound wilkinson_closed_form_dual(int n, WilkinsonObjective objective, int precision_bits) {
  if (n < 2) throw std::invalid_argument("closed-form dual needs n >= 2");
  const LPInstance lp = objective == WilkinsonObjective::HeadTail ? build_wilkinson_lp(n, precision_bits)
                                                                  : build_geomean_lp(n, {}, precision_bits);
  std::vector<Rational> y(lp.rows.size(), Rational(0));
  for (int k = 2; k <= n; ++k) y[k - 1] = Rational(1, static_cast<long>(k - 1) * k);
  if (objective == WilkinsonObjective::HeadTail) y[n - 1] = Rational(1, n - 1);
  for (auto& v : y) v.canonicalize();
  CertifiedBound out;
  out.method = CertificationMethod::ClosedForm;
  const auto check = verify_dual(lp, y);
  out.multipliers = std::move(y);
  out.verified = check.ok;
  if (check.ok) out.bound = check.bound;
  else out.diagnostics = check.reason;
  return out;
}

std::vector<double> wilkinson_primal_point(int n) {
  if (n < 1) throw std::invalid_argument("primal point needs n >= 1");
  std::vector<double> q(n, 0.0);
  double s = 0.0;
  for (int k = 2; k <= n; ++k) {
    q[k - 1] = (s - 0.5 * k * std::log(static_cast<double>(k))) / (k - 1);
    s += q[k - 1];
  }
  return q;
}

}  // namespace growthbound
