#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "growthbound/lp_model.hpp"
#include "growthbound/lp_solve.hpp"
#include "json.hpp"

namespace growthbound {

/// Worker count: GROWTHBOUND_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_cap();

struct BoundRequest {
  int n = 1;
  ProgramKind program = ProgramKind::Improved;
  ConstraintSelector selector{SelectorKind::Band, 4};
  bool certify = false;
  int precision_bits = kDefaultPrecisionBits;
};

struct BoundReport {
  int n = 1;
  ProgramKind program = ProgramKind::Improved;
  ConstraintSelector selector;
  int precision_bits = kDefaultPrecisionBits;
  std::string status;
  double float_objective = 0.0;
  std::optional<Rational> certified_bound;
  std::string certification_method;
  std::string certification_notes;
  double wilkinson_closed_form = 0.0;
  double theorem1_value = 0.0;
  double build_seconds = 0.0;
  double solve_seconds = 0.0;
  double certify_seconds = 0.0;
  long iterations = 0;
  std::size_t rows = 0;
};

struct BoundRun {
  BoundReport report;
  LPInstance lp;
  PrimalDualSolution solution;
  std::optional<CertifiedBound> certificate;
};

/// Builds, solves and (optionally) certifies one program.
BoundRun run_bound(const BoundRequest& request);

nlohmann::json to_json(const BoundReport& report);

nlohmann::json certificate_json(const LPInstance& lp, const CertifiedBound& cert);

struct CertificateCheck {
  bool ok = false;
  std::optional<Rational> bound;
  std::string reason;
};

/// Rebuilds the instance named in the certificate and re-verifies the
/// multipliers from scratch.
CertificateCheck check_certificate(const nlohmann::json& cert);

/// Roughly geometric sample of [1, nmax] with at most `points` distinct values,
/// always containing 1 and nmax.
std::vector<int> geometric_sample(int nmax, int points);

struct GrowthRow {
  int n = 0;
  double wilkinson = 0.0;
  double improved = 0.0;
  double theorem1 = 0.0;
  bool certified = false;
  std::optional<Rational> certified_bound;
};

std::vector<GrowthRow> figure_growth(const std::vector<int>& ns, ConstraintSelector selector, bool certify,
                                     int threads = thread_cap());
void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows);
void write_growth_svg(std::ostream& out, const std::vector<GrowthRow>& rows);

struct ActiveConstraintRecord {
  int n = 0;
  double tolerance = 0.0;
  std::vector<std::pair<int, int>> active;  // (k, l), l = 0 for Wilkinson rows
  std::size_t wilkinson_active = 0;

  double wilkinson_fraction() const {
    return active.empty() ? 0.0 : static_cast<double>(wilkinson_active) / static_cast<double>(active.size());
  }
};

/// Rows with slack <= rel_tol (1 + |rhs|) at a floating-point primal point.
ActiveConstraintRecord active_constraints(const LPInstance& lp, const std::vector<double>& primal,
                                          double rel_tol = 1e-7);
/// Rows with exactly zero slack at an exact primal point (rhs_upper).
ActiveConstraintRecord active_constraints_exact(const LPInstance& lp, const std::vector<Rational>& primal);

/// Active points plus the reference lines k + l = sqrt2 k and k + l = n.
void write_active_csv(std::ostream& out, const ActiveConstraintRecord& rec);
void write_active_svg(std::ostream& out, const ActiveConstraintRecord& rec);

struct AppendixADemo {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> x_true;
  std::vector<double> x_partial;
  std::vector<double> x_complete;
  bool exact_matches = false;  // rational solve reproduces x exactly
  double rel_error_partial = 0.0;
  double rel_error_complete = 0.0;
  double growth_partial = 0.0;
  double growth_complete = 0.0;
  double condition_2 = 0.0;
};

/// Wilkinson matrix, seeded random x in [-1, 1]^n, b = A x; binary64 and exact
/// solves under partial and complete pivoting.
AppendixADemo run_appendix_a(int n, std::uint64_t seed);
void write_appendix_a_text(std::ostream& out, const AppendixADemo& demo);
nlohmann::json to_json(const AppendixADemo& demo);

nlohmann::json constants_json();

}  // namespace growthbound
