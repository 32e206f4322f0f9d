#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "growthbound/scalar.hpp"

namespace growthbound {

/// Variables are either the log-pivots q_1..q_n or their running sums
/// Q(k) = q_1 + ... + q_k.
enum class LpForm { QForm, CumulativeForm };

/// The two transcendental right-hand sides: (k/2) ln k and (k/2) ln(11k/4).
enum class RhsKind { Wilkinson, Improved };

enum class ProgramKind { Wilkinson, GeoMean, Improved };

enum class SelectorKind { Full, WilkinsonOnly, Band, Diagonal, BandDiagonal, Theorem1 };

/// Which long-range (k, l) rows accompany the Wilkinson rows.
///   band:     k + l in [sqrt2 k - 1, sqrt2 k + C]
///   diagonal: k + l = n
///   theorem1: k + l = ceil(sqrt2 k)
struct ConstraintSelector {
  SelectorKind kind = SelectorKind::Full;
  int band_width = 4;

  bool includes(int n, int k, int l) const;
  void validate() const;
};

std::string_view to_string(LpForm f);
std::string_view to_string(ProgramKind p);
std::string_view to_string(SelectorKind s);
ProgramKind parse_program(std::string_view token);
SelectorKind parse_selector(std::string_view token);

struct Term {
  int var = 0;  // 0-based variable index
  std::int64_t coef = 0;
  friend bool operator==(const Term&, const Term&) = default;
};

/// One "row . x <= rhs" constraint. In q-form, rows carry a prefix of +1
/// coefficients on variables [0, prefix) plus explicit terms; in cumulative
/// form the prefix is empty and there are at most four terms.
struct ConstraintRow {
  int k = 1;
  int ell = 0;  // 0 for Wilkinson rows
  int prefix = 0;
  std::vector<Term> terms;
  RhsKind rhs_kind = RhsKind::Wilkinson;
  Rational rhs_upper;
  double rhs_float = 0.0;

  /// Materialised coefficient map with zero entries dropped.
  std::map<int, std::int64_t> coefficients() const;
  std::size_t nonzeros() const { return coefficients().size(); }
};

struct LPInstance {
  int n = 1;
  LpForm form = LpForm::QForm;
  ProgramKind program = ProgramKind::Wilkinson;
  ConstraintSelector selector{SelectorKind::WilkinsonOnly, 4};
  int precision_bits = 60;
  std::vector<ConstraintRow> rows;
  std::vector<Rational> objective;  // dense, maximised

  /// Index of row (k, l), or -1.
  long find_row(int k, int l) const;
};

inline constexpr int kDefaultPrecisionBits = 60;

/// Rational r with 0 <= r - value <= 2^-bits max(1, value), where value is
/// (k/2) ln k or (k/2) ln(11k/4). Nested in bits: more bits never give a
/// larger enclosure.
Rational rhs_enclosure(RhsKind kind, int k, int precision_bits = kDefaultPrecisionBits);
/// Rational r with 0 <= value - r <= 2^-bits max(1, value).
Rational rhs_lower_enclosure(RhsKind kind, int k, int precision_bits = kDefaultPrecisionBits);
/// Correctly rounded binary64 value.
double rhs_nearest(RhsKind kind, int k);

LPInstance build_wilkinson_lp(int n, int precision_bits = kDefaultPrecisionBits);
/// Weighted geometric-mean objective (sum w) q_1 - sum w_k q_k; default w_k = 1/n.
LPInstance build_geomean_lp(int n, const std::vector<Rational>& weights = {},
                            int precision_bits = kDefaultPrecisionBits);
LPInstance build_improved_lp(int n, ConstraintSelector selector, int precision_bits = kDefaultPrecisionBits);
LPInstance build_program(ProgramKind program, int n, ConstraintSelector selector,
                         int precision_bits = kDefaultPrecisionBits);

/// Long-range (k, l) pairs selected for dimension n, ordered by k then l.
std::vector<std::pair<int, int>> selected_pairs(int n, ConstraintSelector selector);

/// Q(k) = sum_{i <= k} q_i. The optimum is unchanged; every row ends up with at
/// most four nonzeros.
LPInstance cumulative_transform(const LPInstance& lp);

/// row . x using a precomputed prefix-sum array (prefix_sums[i] = x_0 + ... + x_{i-1}).
double row_activity(const ConstraintRow& row, std::span<const double> x, std::span<const double> prefix_sums);
std::vector<double> prefix_sums(std::span<const double> x);

/// Exact per-variable column sums A^T y for a multiplier vector over rows.
std::vector<Rational> transpose_product(const LPInstance& lp, std::span<const Rational> y);

/// Objective and constraint maps agree, row by row.
bool equivalent(const LPInstance& a, const LPInstance& b);

/// Plain-text export: one JSON metadata line, then one line per row
///   "k l : c*var c*var ... <= p/q".
void write_lp(std::ostream& out, const LPInstance& lp);
LPInstance read_lp(std::istream& in);

enum class PivotProgram { WilkinsonOpt, ImprovedOpt, ImprovedLp };

struct ConstraintViolation {
  int k = 0;
  int ell = 0;
  double slack = 0.0;  // rhs - lhs in log space; negative when violated
};

struct FeasibilityReport {
  std::vector<ConstraintViolation> violations;
  std::size_t constraints_checked = 0;
  double min_slack = 0.0;
  bool feasible() const { return violations.empty(); }
};

/// Evaluates every constraint of the chosen pivot program (Wilkinson rows plus,
/// for the improved programs, the (k, l) rows picked by `selector`) in log
/// space. `log_pivots[k-1]` is ln p_k. A constraint counts as violated when
/// its slack is below -tol (1 + |rhs|).
FeasibilityReport check_log_pivot_feasibility(std::span<const double> log_pivots, PivotProgram program,
                                              ConstraintSelector selector = {}, double tol = 1e-10);
FeasibilityReport check_pivot_feasibility(std::span<const double> pivots, PivotProgram program,
                                          ConstraintSelector selector = {}, double tol = 1e-10);

}  // namespace growthbound
