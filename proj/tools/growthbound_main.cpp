#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "growthbound/asymptotics.hpp"
#include "growthbound/det_bounds.hpp"
#include "growthbound/elimination.hpp"
#include "growthbound/lp_model.hpp"
#include "growthbound/lp_solve.hpp"
#include "growthbound/matrix_io.hpp"
#include "growthbound/report.hpp"

namespace gb = growthbound;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kSolverFailed = 3 };

struct Options {
  int n = 100;
  int nmax = 5000;
  int points = 40;
  std::string program = "improved";
  std::string selector = "band";
  int band_width = 4;
  bool certify = false;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  int precision_bits = gb::kDefaultPrecisionBits;
  std::string check_file;
  std::string matrix_file;
  std::string strategy = "complete";
  bool json = false;
  bool timings = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes to --out when given, stdout otherwise.
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot open " + path + " for writing");
  fn(f);
}

gb::ConstraintSelector selector_of(const Options& o) {
  gb::ConstraintSelector s{gb::parse_selector(o.selector), o.band_width};
  s.validate();
  return s;
}

std::string format_or(const Options& o, const std::string& fallback) { return o.format.empty() ? fallback : o.format; }

void require_format(const std::string& fmt, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (fmt == a) return;
  throw UsageError("unsupported --format " + fmt + " for this command");
}

gb::BoundRequest request_of(const Options& o) {
  if (o.n < 1) throw UsageError("--n must be >= 1");
  gb::BoundRequest req;
  req.n = o.n;
  req.program = gb::parse_program(o.program);
  req.selector = selector_of(o);
  req.certify = o.certify;
  req.precision_bits = o.precision_bits;
  return req;
}

int cmd_bound(const Options& o) {
  const auto fmt = format_or(o, "text");
  require_format(fmt, {"text", "json"});
  const auto run = gb::run_bound(request_of(o));
  if (run.solution.status != gb::SolveStatus::Optimal) {
    std::cerr << "solver stopped: " << run.report.status << "\n";
    return kSolverFailed;
  }
  auto j = gb::to_json(run.report);
  if (!o.timings) j.erase("timings");
  if (fmt == "json") {
    emit(o.out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
  } else {
    emit(o.out, [&](std::ostream& os) {
      const auto& r = run.report;
      os << std::setprecision(12);
      os << "n = " << r.n << ", program = " << gb::to_string(r.program)
         << ", selector = " << gb::to_string(r.selector.kind) << "\n";
      os << "LP optimum (log scale): " << r.float_objective << "\n";
      os << "growth bound e^opt:     " << std::exp(r.float_objective) << "\n";
      os << "Wilkinson closed form:  " << r.wilkinson_closed_form << "\n";
      os << "alpha ln^2 n + 0.91 ln n: " << r.theorem1_value << "\n";
      if (o.certify) {
        if (r.certified_bound) {
          os << "certified bound:        " << r.certified_bound->get_d() << " (" << r.certification_method << ")\n";
          os << "certified growth bound: " << std::exp(r.certified_bound->get_d()) << "\n";
        } else {
          os << "certification failed: " << r.certification_notes << "\n";
        }
      }
      if (o.timings)
        os << "build " << r.build_seconds << " s, solve " << r.solve_seconds << " s, certify " << r.certify_seconds
           << " s\n";
    });
  }
  if (o.certify && run.certificate && !o.out.empty()) {
    const std::string cert_path = o.out + ".cert.json";
    emit(cert_path, [&](std::ostream& os) { os << gb::certificate_json(run.lp, *run.certificate).dump(1) << "\n"; });
  }
  if (o.certify && !run.report.certified_bound) return kVerifyFailed;
  return kOk;
}

int cmd_certify(const Options& o) {
  if (!o.check_file.empty()) {
    std::ifstream f(o.check_file);
    if (!f) throw UsageError("cannot read " + o.check_file);
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "certificate is not valid JSON: " << e.what() << "\n";
      return kVerifyFailed;
    }
    const auto check = gb::check_certificate(j);
    if (!check.ok) {
      std::cout << "REJECTED: " << check.reason << "\n";
      return kVerifyFailed;
    }
    std::cout << std::setprecision(15) << "VERIFIED: bound " << gb::format_rational(*check.bound) << " ~ "
              << check.bound->get_d() << "\n";
    return kOk;
  }
  auto req = request_of(o);
  req.certify = true;
  const auto run = gb::run_bound(req);
  if (run.solution.status != gb::SolveStatus::Optimal) {
    std::cerr << "solver stopped: " << run.report.status << "\n";
    return kSolverFailed;
  }
  emit(o.out, [&](std::ostream& os) { os << gb::certificate_json(run.lp, *run.certificate).dump(1) << "\n"; });
  if (!run.certificate->verified) {
    std::cerr << "certification failed: " << run.certificate->diagnostics << "\n";
    return kVerifyFailed;
  }
  return kOk;
}

template <class T>
void print_trace(std::ostream& os, const gb::Matrix<T>& a, gb::PivotStrategy strategy, const std::string& fmt) {
  const auto trace = gb::eliminate(a, strategy);
  const auto pivots = trace.pivots_ascending();
  const double growth = gb::growth_factor_value(trace);
  if (fmt == "json") {
    nlohmann::json j;
    j["n"] = trace.n;
    j["strategy"] = std::string(gb::to_string(strategy));
    j["pivots"] = pivots;
    j["growth_factor"] = growth;
    j["log_growth_factor"] = std::log(growth);
    os << j.dump(2) << "\n";
    return;
  }
  os << "n = " << trace.n << ", strategy = " << gb::to_string(strategy) << "\n" << std::setprecision(12);
  for (std::size_t k = trace.n; k >= 1; --k) os << "p_" << k << " = " << pivots[k - 1] << "\n";
  os << "growth factor = " << growth << " (ln " << std::log(growth) << ")\n";
}

int cmd_ge_run(const Options& o) {
  if (o.matrix_file.empty()) throw UsageError("ge run needs --matrix-file");
  const auto fmt = format_or(o, "text");
  require_format(fmt, {"text", "json"});
  const auto strategy = gb::parse_pivot_strategy(o.strategy);
  const auto m = gb::read_matrix_file(o.matrix_file);
  emit(o.out, [&](std::ostream& os) { std::visit([&](const auto& a) { print_trace(os, a, strategy, fmt); }, m); });
  return kOk;
}

int cmd_figure_growth(const Options& o) {
  if (o.nmax < 2) throw UsageError("--nmax must be >= 2");
  const auto fmt = format_or(o, "csv");
  require_format(fmt, {"csv", "svg"});
  const auto ns = gb::geometric_sample(o.nmax, o.points);
  const auto rows = gb::figure_growth(ns, selector_of(o), o.certify);
  emit(o.out, [&](std::ostream& os) {
    if (fmt == "svg") gb::write_growth_svg(os, rows);
    else gb::write_growth_csv(os, rows);
  });
  if (o.certify)
    for (const auto& r : rows)
      if (!r.certified) return kVerifyFailed;
  return kOk;
}

int cmd_figure_active(const Options& o) {
  const auto fmt = format_or(o, "csv");
  require_format(fmt, {"csv", "svg"});
  auto req = request_of(o);
  req.program = gb::ProgramKind::Improved;
  req.certify = false;
  const auto run = gb::run_bound(req);
  if (run.solution.status != gb::SolveStatus::Optimal) return kSolverFailed;
  const auto rec = gb::active_constraints(run.lp, run.solution.primal);
  emit(o.out, [&](std::ostream& os) {
    if (fmt == "svg") gb::write_active_svg(os, rec);
    else gb::write_active_csv(os, rec);
  });
  std::cerr << rec.active.size() << " active rows, " << rec.wilkinson_active << " of them Wilkinson rows\n";
  return kOk;
}

int cmd_demo(const Options& o) {
  const auto fmt = format_or(o, "text");
  require_format(fmt, {"text", "json"});
  if (o.n < 2) throw UsageError("--n must be >= 2");
  const auto demo = gb::run_appendix_a(o.n, o.seed);
  emit(o.out, [&](std::ostream& os) {
    if (fmt == "json") os << gb::to_json(demo).dump(2) << "\n";
    else gb::write_appendix_a_text(os, demo);
  });
  return kOk;
}

int cmd_constants(const Options& o) {
  const auto j = gb::constants_json();
  emit(o.out, [&](std::ostream& os) {
    if (o.json || o.format == "json") {
      os << j.dump(2) << "\n";
      return;
    }
    os << std::setprecision(12);
    for (const auto& [name, v] : j.items()) os << std::left << std::setw(26) << name << v["value"].get<double>() << "\n";
  });
  return kOk;
}

struct Check {
  std::string name;
  bool ok;
};

int cmd_selftest() {
  std::vector<Check> checks;
  {
    const auto lp = gb::build_wilkinson_lp(30);
    const auto sol = gb::solve_float(lp);
    checks.push_back({"wilkinson LP n=30 matches closed form",
                      std::fabs(sol.objective - gb::wilkinson_bound_closed_form(30).exact_sum) < 1e-9});
    const auto cert = gb::certify(lp, sol);
    const auto cf = gb::wilkinson_closed_form_dual(30, gb::WilkinsonObjective::HeadTail);
    checks.push_back({"certified bound equals closed-form dual", cert.verified && cert.bound == cf.bound});
  }
  {
    const auto lp = gb::build_improved_lp(200, {gb::SelectorKind::Band, 4});
    const auto cert = gb::certify(lp, gb::solve_float(lp));
    const auto wil = gb::wilkinson_closed_form_dual(200, gb::WilkinsonObjective::HeadTail);
    checks.push_back({"improved band n=200 certified below Wilkinson", cert.verified && *cert.bound < *wil.bound});
  }
  {
    const auto trace = gb::eliminate(gb::wilkinson_matrix<gb::Rational>(20), gb::PivotStrategy::Partial);
    checks.push_back({"partial pivoting growth 2^19 on wilkinson_matrix(20)", gb::growth_factor(trace) == 524288});
  }
  {
    const auto c = gb::constants();
    checks.push_back({"alpha", std::fabs(c.alpha - 0.20781) < 1e-5});
    checks.push_back({"gamma star", std::fabs(c.gamma_star - 0.207576) < 1e-5});
  }
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << "\n";
    all = all && c.ok;
  }
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified upper bounds on the complete-pivoting growth factor"};
  app.require_subcommand(1);
  Options o;

  auto add_lp_flags = [&o](CLI::App* c) {
    c->add_option("--n", o.n, "dimension");
    c->add_option("--program", o.program, "wilkinson, geomean or improved");
    c->add_option("--selector", o.selector, "full, wilkinson-only, band, diagonal, band+diagonal, theorem1");
    c->add_option("--band-width", o.band_width, "band constant C");
    c->add_option("--precision-bits", o.precision_bits, "rhs enclosure precision");
  };
  auto add_io_flags = [&o](CLI::App* c) {
    c->add_option("--out", o.out, "output file (stdout when omitted)");
    c->add_option("--format", o.format, "json, csv, svg or text");
  };

  auto* bound = app.add_subcommand("bound", "solve one program and report the bound");
  add_lp_flags(bound);
  add_io_flags(bound);
  bound->add_flag("--certify", o.certify, "certify the bound in exact arithmetic");
  bound->add_flag("--timings", o.timings, "include wall-clock timings");

  auto* cert = app.add_subcommand("certify", "write or check a dual certificate");
  add_lp_flags(cert);
  add_io_flags(cert);
  cert->add_option("--check", o.check_file, "re-verify a certificate file")->check(CLI::ExistingFile);

  auto* ge = app.add_subcommand("ge", "Gaussian elimination");
  ge->require_subcommand(1);
  auto* ge_run = ge->add_subcommand("run", "eliminate a matrix file");
  ge_run->add_option("--matrix-file", o.matrix_file, "matrix file")->required()->check(CLI::ExistingFile);
  ge_run->add_option("--strategy", o.strategy, "complete, partial or none");
  add_io_flags(ge_run);

  auto* fig = app.add_subcommand("figure", "figure data");
  fig->require_subcommand(1);
  auto* fig_growth = fig->add_subcommand("growth-bounds", "bounds against n");
  fig_growth->add_option("--nmax", o.nmax, "largest n");
  fig_growth->add_option("--points", o.points, "sample count");
  fig_growth->add_option("--selector", o.selector, "constraint selector");
  fig_growth->add_option("--band-width", o.band_width, "band constant C");
  fig_growth->add_flag("--certify", o.certify, "certify every point");
  add_io_flags(fig_growth);
  auto* fig_active = fig->add_subcommand("active-constraints", "active (k, l) rows at the optimum");
  fig_active->add_option("--n", o.n, "dimension");
  fig_active->add_option("--selector", o.selector, "constraint selector");
  fig_active->add_option("--band-width", o.band_width, "band constant C");
  add_io_flags(fig_active);

  auto* demo = app.add_subcommand("demo", "demonstrations");
  demo->require_subcommand(1);
  auto* demo_a = demo->add_subcommand("appendix-a", "partial versus complete pivoting on the Wilkinson matrix");
  demo_a->add_option("--n", o.n, "dimension");
  demo_a->add_option("--seed", o.seed, "random seed");
  add_io_flags(demo_a);

  auto* consts = app.add_subcommand("constants", "constants and their formulas");
  consts->add_flag("--json", o.json, "JSON output");
  add_io_flags(consts);

  auto* selftest = app.add_subcommand("selftest", "quick consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*bound) return cmd_bound(o);
    if (*cert) return cmd_certify(o);
    if (*ge_run) return cmd_ge_run(o);
    if (*fig_growth) return cmd_figure_growth(o);
    if (*fig_active) return cmd_figure_active(o);
    if (*demo_a) return cmd_demo(o);
    if (*consts) return cmd_constants(o);
    if (*selftest) return cmd_selftest();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gb::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailed;
  }
  return kUsage;
}
