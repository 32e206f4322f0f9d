#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "growthbound/lp_model.hpp"

namespace growthbound {

enum class SolveStatus { Optimal, Unbounded, Infeasible, IterationLimit };
std::string_view to_string(SolveStatus s);

enum class PricingRule { SteepestEdge, Dantzig, Bland };

struct SolverOptions {
  PricingRule pricing = PricingRule::SteepestEdge;
  long max_iterations = 0;  // 0: automatic, scaled with the instance
  int refactor_interval = 64;
  int stall_window = 50;  // non-improving pivots before switching to Bland's rule
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
};

/// Floating-point optimum of max c.x subject to A x <= b (binary64 rhs).
///
/// `primal` is in the instance's own variables, gauged so that the first
/// variable is 0. `dual[r]` is the nonnegative multiplier of row r, and
/// `basis` lists the basic rows.
struct PrimalDualSolution {
  LpForm form = LpForm::QForm;
  SolveStatus status = SolveStatus::Optimal;
  std::vector<double> primal;
  std::vector<double> dual;
  double objective = 0.0;       // c . primal
  double dual_objective = 0.0;  // b . dual
  std::vector<int> basis;
  long iterations = 0;
  long bland_iterations = 0;
  int refactorizations = 0;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Primal simplex on the dual program, over the gauge-reduced cumulative form,
/// warm-started from the Wilkinson basis. Ties go to the lowest index.
PrimalDualSolution solve_float(const LPInstance& lp, const SolverOptions& opts = {});

/// Max primal violation max_r (a_r.x - b_r)_+ against rhs_float.
double primal_infeasibility(const LPInstance& lp, std::span<const double> x);

enum class CertificationMethod { BasisRefactor, RepairedDual, ClosedForm, ExactSimplex };
std::string_view to_string(CertificationMethod m);

/// An upper bound on the LP optimum (with the true transcendental right-hand
/// sides), proved by weak duality in exact arithmetic. `bound` is present only
/// when `verified` is true.
struct CertifiedBound {
  std::optional<Rational> bound;
  std::vector<Rational> multipliers;  // one per row
  bool verified = false;
  CertificationMethod method = CertificationMethod::BasisRefactor;
  std::string diagnostics;
};

struct DualCheck {
  bool ok = false;
  Rational bound;
  std::string reason;
};

/// Independent checker: y >= 0, A^T y = c exactly, bound = sum y_r rhs_upper_r.
DualCheck verify_dual(const LPInstance& lp, std::span<const Rational> y);

struct CertifyOptions {
  /// Bases up to this dimension are re-solved exactly and, if needed, pivoted
  /// to exact optimality; larger ones use the repaired rounded dual.
  int exact_dimension_limit = 160;
  long max_exact_pivots = 20000;
  int rounding_bits = 60;
};

/// Exact dual certificate from a floating-point solve. Never emits an
/// unverified bound: on failure `verified` is false and `bound` empty.
CertifiedBound certify(const LPInstance& lp, const PrimalDualSolution& sol, const CertifyOptions& opts = {});

enum class WilkinsonObjective { HeadTail, GeoMean };

/// Explicit nonnegative Wilkinson-row multipliers: 1/((k-1)k), with the last
/// one 1/(n-1) for the head-tail objective.
CertifiedBound wilkinson_closed_form_dual(int n, WilkinsonObjective objective,
                                          int precision_bits = kDefaultPrecisionBits);

/// The point making every Wilkinson row tight: q_1 = 0,
/// q_k = (S_{k-1} - (k/2) ln k) / (k-1).
std::vector<double> wilkinson_primal_point(int n);

struct ExactSimplexOptions {
  std::size_t max_rows = 50000;
  long max_pivots = 200000;
};

struct ExactSimplexResult {
  CertifiedBound certificate;
  std::vector<Rational> primal;  // instance variables, first one 0
  std::vector<int> basis;
  long pivots = 0;
};

/// Exact optimum with rhs_upper, by Bland's-rule simplex in rationals.
/// `warm_basis`, when dual-feasible, replaces the Wilkinson starting basis.
ExactSimplexResult exact_simplex_solve(const LPInstance& lp, const ExactSimplexOptions& opts = {},
                                       std::span<const int> warm_basis = {});
CertifiedBound exact_simplex(const LPInstance& lp, const ExactSimplexOptions& opts = {});

}  // namespace growthbound
