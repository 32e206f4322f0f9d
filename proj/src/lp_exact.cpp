#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "growthbound/lp_solve.hpp"
#include "lp_reduced.hpp"

namespace growthbound {

namespace {

// Bland's-rule simplex on the dual program with an explicit rational basis
// inverse. Binv = M^{-1} where column p of M is basic row basis[p].
class ExactEngine {
 public:
  ExactEngine(const detail::ReducedLP& red, const LPInstance& lp) : red_(red), m_(red.m) {
    rhs_.reserve(lp.rows.size());
    for (const auto& r : lp.rows) rhs_.push_back(r.rhs_upper);
  }

  bool start(const std::vector<int>& basis) {
    if (static_cast<int>(basis.size()) != m_) return false;
    where_.assign(red_.rows.size(), -1);
    for (int p = 0; p < m_; ++p) {
      const int r = basis[p];
      if (r < 0 || r >= static_cast<int>(red_.rows.size()) || where_[r] >= 0) return false;
      where_[r] = p;
    }
    basis_ = basis;
    if (!invert()) return false;
    y_.assign(m_, Rational(0));
    for (int p = 0; p < m_; ++p)
      for (int j = 0; j < m_; ++j)
        if (sgn(red_.objective[j]) != 0) y_[p] += inv(p, j) * red_.objective[j];
    for (const auto& v : y_)
      if (sgn(v) < 0) return false;
    x_.assign(m_, Rational(0));
    for (int p = 0; p < m_; ++p) {
      const Rational& b = rhs_[basis_[p]];
      if (sgn(b) == 0) continue;
      for (int j = 0; j < m_; ++j)
        if (sgn(inv(p, j)) != 0) x_[j] += inv(p, j) * b;
    }
    return true;
  }

  long optimise(long max_pivots) {
    long pivots = 0;
    const int rows = static_cast<int>(red_.rows.size());
    std::vector<Rational> alpha(m_);
    for (;;) {
      int enter = -1;
      Rational d_enter;
      for (int r = 0; r < rows && enter < 0; ++r) {
        if (where_[r] >= 0 || red_.rows[r].nnz == 0) continue;
        Rational d = rhs_[r] - activity(r);
        if (sgn(d) < 0) {
          enter = r;
          d_enter = std::move(d);
        }
      }
      if (enter < 0) return pivots;
      if (pivots >= max_pivots) throw SolverError("exact simplex exceeded its pivot limit");

      const auto& row = red_.rows[enter];
      for (int p = 0; p < m_; ++p) {
        alpha[p] = 0;
        for (int t = 0; t < row.nnz; ++t)
          if (sgn(inv(p, row.idx[t])) != 0) alpha[p] += inv(p, row.idx[t]) * row.val[t];
      }
      int leave = -1;
      Rational best;
      for (int p = 0; p < m_; ++p) {
        if (sgn(alpha[p]) <= 0) continue;
        Rational ratio = y_[p] / alpha[p];
        if (leave < 0 || ratio < best || (ratio == best && basis_[p] < basis_[leave])) {
          best = std::move(ratio);
          leave = p;
        }
      }
      if (leave < 0) throw SolverError("primal program is infeasible");

      for (int p = 0; p < m_; ++p)
        if (sgn(alpha[p]) != 0) y_[p] -= best * alpha[p];
      y_[leave] = best;
      const Rational step = d_enter / alpha[leave];
      for (int j = 0; j < m_; ++j)
        if (sgn(inv(leave, j)) != 0) x_[j] += step * inv(leave, j);

      const Rational piv = alpha[leave];
      for (int j = 0; j < m_; ++j)
        if (sgn(inv(leave, j)) != 0) inv(leave, j) /= piv;
      for (int p = 0; p < m_; ++p) {
        if (p == leave || sgn(alpha[p]) == 0) continue;
        for (int j = 0; j < m_; ++j)
          if (sgn(inv(leave, j)) != 0) inv(p, j) -= alpha[p] * inv(leave, j);
      }
      where_[basis_[leave]] = -1;
      basis_[leave] = enter;
      where_[enter] = leave;
      ++pivots;
    }
  }

  const std::vector<int>& basis() const { return basis_; }
  const std::vector<Rational>& reduced_primal() const { return x_; }

  std::vector<Rational> multipliers() const {
    std::vector<Rational> y(red_.rows.size(), Rational(0));
    for (int p = 0; p < m_; ++p) y[basis_[p]] = y_[p];
    return y;
  }

 private:
  Rational& inv(int p, int j) { return inv_[static_cast<std::size_t>(p) * m_ + j]; }
  const Rational& inv(int p, int j) const { return inv_[static_cast<std::size_t>(p) * m_ + j]; }

  Rational activity(int r) const {
    const auto& row = red_.rows[r];
    Rational acc(0);
    for (int t = 0; t < row.nnz; ++t) acc += x_[row.idx[t]] * row.val[t];
    return acc;
  }

  // Gauss-Jordan on [M | I].
  bool invert() {
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<Rational> a(mm * mm, Rational(0));
    for (int p = 0; p < m_; ++p) {
      const auto& row = red_.rows[basis_[p]];
      for (int t = 0; t < row.nnz; ++t) a[row.idx[t] * mm + p] = row.val[t];
    }
    inv_.assign(mm * mm, Rational(0));
    for (std::size_t i = 0; i < mm; ++i) inv_[i * mm + i] = 1;
    for (std::size_t c = 0; c < mm; ++c) {
      std::size_t piv = c;
      while (piv < mm && sgn(a[piv * mm + c]) == 0) ++piv;
      if (piv == mm) return false;
      if (piv != c)
        for (std::size_t j = 0; j < mm; ++j) {
          std::swap(a[piv * mm + j], a[c * mm + j]);
          std::swap(inv_[piv * mm + j], inv_[c * mm + j]);
        }
      const Rational d = a[c * mm + c];
      for (std::size_t j = 0; j < mm; ++j) {
        if (sgn(a[c * mm + j]) != 0) a[c * mm + j] /= d;
        if (sgn(inv_[c * mm + j]) != 0) inv_[c * mm + j] /= d;
      }
      for (std::size_t i = 0; i < mm; ++i) {
        if (i == c || sgn(a[i * mm + c]) == 0) continue;
        const Rational f = a[i * mm + c];
        for (std::size_t j = 0; j < mm; ++j) {
          if (sgn(a[c * mm + j]) != 0) a[i * mm + j] -= f * a[c * mm + j];
          if (sgn(inv_[c * mm + j]) != 0) inv_[i * mm + j] -= f * inv_[c * mm + j];
        }
      }
    }
    return true;
  }

  const detail::ReducedLP& red_;
  int m_;
  std::vector<Rational> rhs_;
  std::vector<int> basis_;
  std::vector<int> where_;
  std::vector<Rational> inv_;
  std::vector<Rational> y_;
  std::vector<Rational> x_;
};

}  // namespace

ExactSimplexResult exact_simplex_solve(const LPInstance& lp, const ExactSimplexOptions& opts,
                                       std::span<const int> warm_basis) {
  if (lp.rows.size() > opts.max_rows)
    throw std::length_error("exact simplex is limited to " + std::to_string(opts.max_rows) + " rows");
  ExactSimplexResult res;
  res.certificate.method = CertificationMethod::ExactSimplex;
  if (lp.n == 1) {
    res.primal.assign(1, Rational(0));
    res.certificate.multipliers.assign(lp.rows.size(), Rational(0));
  } else {
    const auto red = detail::reduce(lp);
    if (!red.shift_invariant) throw SolverError("objective is unbounded along the shift direction");
    ExactEngine engine(red, lp);
    bool started = false;
    if (!warm_basis.empty()) started = engine.start(std::vector<int>(warm_basis.begin(), warm_basis.end()));
    if (!started) {
      for (int r : red.wilkinson_rows)
        if (r < 0) throw SolverError("instance lacks a Wilkinson row, no starting basis");
      if (!engine.start(red.wilkinson_rows))
        throw SolverError("objective is not dual feasible at the Wilkinson basis");
    }
    res.pivots = engine.optimise(opts.max_pivots);
    res.basis = engine.basis();
    res.primal = detail::expand_primal<Rational>(lp, std::span<const Rational>(engine.reduced_primal()));
    res.certificate.multipliers = engine.multipliers();
  }
  const auto check = verify_dual(lp, res.certificate.multipliers);
  res.certificate.verified = check.ok;
  if (check.ok) res.certificate.bound = check.bound;
  else res.certificate.diagnostics = check.reason;
  return res;
}

CertifiedBound exact_simplex(const LPInstance& lp, const ExactSimplexOptions& opts) {
  return exact_simplex_solve(lp, opts).certificate;
}

}  // namespace growthbound
