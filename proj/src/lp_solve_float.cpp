#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "growthbound/lp_solve.hpp"
#include "lp_reduced.hpp"

namespace growthbound {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

namespace {

using Vec = Eigen::VectorXd;

// Simplex on  min b.y  s.t.  A^T y = c, y >= 0, whose basic solutions are the
// vertices of  max c.x  s.t.  A x <= b.  M = A_B^T holds the basic rows as
// columns; y_B = M^{-1} c and x = M^{-T} b_B.
class DualProgramSimplex {
 public:
  DualProgramSimplex(const detail::ReducedLP& red, const SolverOptions& opts)
      : red_(red), opts_(opts), m_(red.m), rows_(static_cast<int>(red.rows.size())) {}

  PrimalDualSolution run() {
    PrimalDualSolution sol;
    basis_ = red_.wilkinson_rows;
    for (int r : basis_)
      if (r < 0) throw SolverError("instance lacks a Wilkinson row, no starting basis");
    where_.assign(rows_, -1);
    for (int p = 0; p < m_; ++p) where_[basis_[p]] = p;
    weights_.assign(rows_, 1.0);
    refactor();
    for (int p = 0; p < m_; ++p)
      if (y_[p] < -1e-9) throw SolverError("objective is not dual feasible at the Wilkinson basis");

    const long limit = opts_.max_iterations > 0 ? opts_.max_iterations : 50L * (rows_ + m_) + 1000;
    double best_obj = dual_objective();
    int stall = 0;
    bool bland = opts_.pricing == PricingRule::Bland;
    std::vector<double> d(rows_, 0.0);

    for (;;) {
      price(d);
      const int enter = choose_entering(d, bland);
      if (enter < 0) {
        sol.status = SolveStatus::Optimal;
        break;
      }
      if (iterations_ >= limit) {
        sol.status = SolveStatus::IterationLimit;
        break;
      }
      Vec alpha = ftran_row(enter);
      const int p = ratio_test(alpha, bland);
      if (p < 0) {
        sol.status = SolveStatus::Infeasible;
        break;
      }
      pivot(enter, p, alpha, d[enter]);
      ++iterations_;
      if (bland) ++bland_iterations_;

      const double obj = dual_objective();
      if (obj < best_obj - 1e-12 * (1.0 + std::fabs(best_obj))) {
        best_obj = obj;
        stall = 0;
        if (opts_.pricing != PricingRule::Bland) bland = false;
      } else if (++stall >= opts_.stall_window) {
        bland = true;
      }
    }

    if (!etas_.empty()) refactor();
    sol.iterations = iterations_;
    sol.bland_iterations = bland_iterations_;
    sol.refactorizations = refactorizations_;
    sol.basis = basis_;
    sol.dual.assign(rows_, 0.0);
    for (int p = 0; p < m_; ++p) sol.dual[basis_[p]] = y_[p];
    reduced_primal_.assign(x_.data(), x_.data() + m_);
    return sol;
  }

  const std::vector<double>& reduced_primal() const { return reduced_primal_; }

 private:
  struct Eta {
    int p;
    double pivot;
    std::vector<std::pair<int, double>> entries;  // i != p
  };

  double dual_objective() const {
    double s = 0.0;
    for (int p = 0; p < m_; ++p) s += red_.rhs_float[basis_[p]] * y_[p];
    return s;
  }

  void refactor() {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m_) * 4);
    for (int p = 0; p < m_; ++p) {
      const auto& row = red_.rows[basis_[p]];
      for (int t = 0; t < row.nnz; ++t) trips.emplace_back(row.idx[t], p, static_cast<double>(row.val[t]));
    }
    Eigen::SparseMatrix<double> mat(m_, m_);
    mat.setFromTriplets(trips.begin(), trips.end());
    mat.makeCompressed();
    lu_.compute(mat);
    if (lu_.info() != Eigen::Success) throw SolverError("basis factorisation failed: " + lu_.lastErrorMessage());
    etas_.clear();
    ++refactorizations_;

    Vec c(m_);
    for (int j = 0; j < m_; ++j) c[j] = red_.objective_float[j];
    y_ = lu_.solve(c);
    Vec bb(m_);
    for (int p = 0; p < m_; ++p) bb[p] = red_.rhs_float[basis_[p]];
    x_ = lu_.transpose().solve(bb);
  }

  Vec ftran(Vec v) const {
    v = lu_.solve(v).eval();
    for (const auto& e : etas_) {
      const double vp = v[e.p] / e.pivot;
      v[e.p] = vp;
      if (vp != 0.0)
        for (const auto& [i, a] : e.entries) v[i] -= a * vp;
    }
    return v;
  }

  Vec btran(Vec v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->p];
      for (const auto& [i, a] : it->entries) s -= a * v[i];
      v[it->p] = s / it->pivot;
    }
    return lu_.transpose().solve(v).eval();
  }

  Vec ftran_row(int r) const {
    Vec a = Vec::Zero(m_);
    const auto& row = red_.rows[r];
    for (int t = 0; t < row.nnz; ++t) a[row.idx[t]] = static_cast<double>(row.val[t]);
    return ftran(std::move(a));
  }

  void price(std::vector<double>& d) const {
    for (int r = 0; r < rows_; ++r) d[r] = where_[r] >= 0 ? 0.0 : red_.rhs_float[r] - red_.rows[r].dot(x_);
  }

  double tolerance(int r) const { return opts_.optimality_tol * (1.0 + std::fabs(red_.rhs_float[r])); }

  int choose_entering(const std::vector<double>& d, bool bland) const {
    int best = -1;
    double best_score = 0.0;
    for (int r = 0; r < rows_; ++r) {
      if (where_[r] >= 0 || red_.rows[r].nnz == 0 || d[r] >= -tolerance(r)) continue;
      if (bland) return r;
      const double score =
          opts_.pricing == PricingRule::Dantzig ? -d[r] : d[r] * d[r] / weights_[r];
      if (score > best_score) {
        best_score = score;
        best = r;
      }
    }
    return best;
  }

  // Harris two-pass ratio test over positions with alpha_p > 0.
  int ratio_test(const Vec& alpha, bool bland) const {
    const double amax = alpha.cwiseAbs().maxCoeff();
    const double ptol = std::max(opts_.pivot_tol, 1e-11 * amax);
    if (bland) {
      double min_ratio = std::numeric_limits<double>::infinity();
      for (int p = 0; p < m_; ++p)
        if (alpha[p] > ptol) min_ratio = std::min(min_ratio, std::max(y_[p], 0.0) / alpha[p]);
      if (!std::isfinite(min_ratio)) return -1;
      const double cut = min_ratio + 1e-14 * (1.0 + min_ratio);
      int best = -1;
      for (int p = 0; p < m_; ++p)
        if (alpha[p] > ptol && std::max(y_[p], 0.0) / alpha[p] <= cut && (best < 0 || basis_[p] < basis_[best]))
          best = p;
      return best;
    }
    const double delta = 1e-12;
    double theta_max = std::numeric_limits<double>::infinity();
    for (int p = 0; p < m_; ++p)
      if (alpha[p] > ptol) theta_max = std::min(theta_max, (std::max(y_[p], 0.0) + delta) / alpha[p]);
    if (!std::isfinite(theta_max)) return -1;
    int best = -1;
    for (int p = 0; p < m_; ++p) {
      if (alpha[p] <= ptol) continue;
      if (std::max(y_[p], 0.0) / alpha[p] <= theta_max && (best < 0 || alpha[p] > alpha[best])) best = p;
    }
    return best;
  }

  void pivot(int enter, int p, const Vec& alpha, double d_enter) {
    const double ap = alpha[p];
    const double theta = std::max(y_[p], 0.0) / ap;
    const Vec rho = btran(Vec::Unit(m_, p));

    if (opts_.pricing == PricingRule::SteepestEdge) {
      const Vec tau = btran(alpha);
      const double gamma_q = weights_[enter];
      for (int r = 0; r < rows_; ++r) {
        if (where_[r] >= 0 || r == enter) continue;
        const auto& row = red_.rows[r];
        const double apr = row.dot(rho);
        if (apr == 0.0) continue;
        const double ratio = apr / ap;
        const double w = weights_[r] - 2.0 * ratio * row.dot(tau) + ratio * ratio * gamma_q;
        weights_[r] = std::max(w, 1.0 + ratio * ratio);
      }
      weights_[basis_[p]] = std::max(gamma_q / (ap * ap), 1.0);
    }

    for (int i = 0; i < m_; ++i) y_[i] -= theta * alpha[i];
    y_[p] = theta;
    x_ += (d_enter / ap) * rho;

    where_[basis_[p]] = -1;
    basis_[p] = enter;
    where_[enter] = p;

    Eta e{p, ap, {}};
    for (int i = 0; i < m_; ++i)
      if (i != p && alpha[i] != 0.0) e.entries.emplace_back(i, alpha[i]);
    etas_.push_back(std::move(e));
    if (static_cast<int>(etas_.size()) >= opts_.refactor_interval) refactor();
  }

  const detail::ReducedLP& red_;
  const SolverOptions& opts_;
  int m_;
  int rows_;
  std::vector<int> basis_;
  std::vector<int> where_;
  std::vector<double> weights_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  Vec y_;
  Vec x_;
  long iterations_ = 0;
  long bland_iterations_ = 0;
  int refactorizations_ = 0;
  std::vector<double> reduced_primal_;
};

}  // namespace

double primal_infeasibility(const LPInstance& lp, std::span<const double> x) {
  const auto ps = prefix_sums(x);
  double worst = 0.0;
  for (const auto& r : lp.rows) worst = std::max(worst, row_activity(r, x, ps) - r.rhs_float);
  return worst;
}

PrimalDualSolution solve_float(const LPInstance& lp, const SolverOptions& opts) {
  PrimalDualSolution sol;
  sol.form = lp.form;
  if (lp.n == 1) {
    sol.primal.assign(1, 0.0);
    sol.dual.assign(lp.rows.size(), 0.0);
    return sol;
  }
  const auto red = detail::reduce(lp);
  if (!red.shift_invariant) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }
  DualProgramSimplex engine(red, opts);
  sol = engine.run();
  sol.form = lp.form;
  const auto& xr = engine.reduced_primal();
  sol.primal = detail::expand_primal<double>(lp, std::span<const double>(xr));
  sol.objective = 0.0;
  for (int j = 0; j < lp.n; ++j) sol.objective += lp.objective[j].get_d() * sol.primal[j];
  sol.dual_objective = 0.0;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) sol.dual_objective += sol.dual[r] * lp.rows[r].rhs_float;
  return sol;
}

}  // namespace growthbound
