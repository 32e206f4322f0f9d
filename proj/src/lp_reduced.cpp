#include "lp_reduced.hpp"

#include <stdexcept>
#include <string>

namespace growthbound::detail {

ReducedLP reduce(const LPInstance& lp) {
  const LPInstance cum_storage = lp.form == LpForm::QForm ? cumulative_transform(lp) : LPInstance{};
  const LPInstance& cum = lp.form == LpForm::QForm ? cum_storage : lp;

  ReducedLP out;
  out.n = lp.n;
  out.m = lp.n - 1;
  out.rows.reserve(cum.rows.size());
  out.rhs_float.reserve(cum.rows.size());
  out.wilkinson_rows.assign(out.m, -1);
  for (std::size_t r = 0; r < cum.rows.size(); ++r) {
    const auto& row = cum.rows[r];
    ReducedRow rr;
    for (const auto& [var, coef] : row.coefficients()) {
      if (var == 0) continue;
      if (rr.nnz == 4) throw std::invalid_argument("row (" + std::to_string(row.k) + ", " + std::to_string(row.ell) +
                                                   ") has more than four cumulative nonzeros");
      rr.idx[rr.nnz] = var - 1;
      rr.val[rr.nnz] = coef;
      ++rr.nnz;
    }
    out.rows.push_back(rr);
    out.rhs_float.push_back(row.rhs_float);
    if (row.ell == 0 && row.k >= 2 && out.wilkinson_rows[row.k - 2] < 0) out.wilkinson_rows[row.k - 2] = static_cast<int>(r);
  }

  // Gauge direction in cumulative coordinates is (1, 2, ..., n).
  Rational gauge(0);
  for (int j = 0; j < lp.n; ++j) gauge += cum.objective[j] * (j + 1);
  out.shift_invariant = sgn(gauge) == 0;
  out.objective.assign(cum.objective.begin() + 1, cum.objective.end());
  out.objective_float.reserve(out.m);
  for (const auto& c : out.objective) out.objective_float.push_back(c.get_d());
  return out;
}

std::vector<Rational> cumulative_to_q(std::span<const Rational> v) {
  std::vector<Rational> out(v.size());
  Rational run(0);
  for (std::size_t j = v.size(); j-- > 0;) {
    run += v[j];
    out[j] = run;
  }
  return out;
}

}  // namespace growthbound::detail
