#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "growthbound/asymptotics.hpp"
#include "growthbound/report.hpp"
#include "oracles.hpp"

using namespace growthbound;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(GROWTHBOUND_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("growthbound_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(BoundReport, WilkinsonProgramMatchesClosedForm) {
  BoundRequest req;
  req.n = 100;
  req.program = ProgramKind::Wilkinson;
  const auto run = run_bound(req);
  EXPECT_EQ(run.report.status, "optimal");
  EXPECT_NEAR(run.report.float_objective, run.report.wilkinson_closed_form, 1e-7);
  EXPECT_NEAR(run.report.theorem1_value, theorem1_bound(100), 1e-15);
  const auto j = to_json(run.report);
  EXPECT_EQ(j["program"], "wilkinson");
  EXPECT_EQ(j["n"], 100);
  EXPECT_TRUE(j["certified_bound"].is_null());
}

TEST(BoundReport, OneDimensionalIsZero) {
  BoundRequest req;
  req.n = 1;
  req.certify = true;
  const auto run = run_bound(req);
  EXPECT_EQ(run.report.float_objective, 0.0);
  ASSERT_TRUE(run.report.certified_bound.has_value());
  EXPECT_EQ(*run.report.certified_bound, 0);
}

TEST(BoundReport, CertifiedThousandRoundTripsThroughCertificate) {
  BoundRequest req;
  req.n = 1000;
  req.certify = true;
  const auto run = run_bound(req);
  const auto& r = run.report;
  ASSERT_TRUE(r.certified_bound.has_value());
  EXPECT_GE(r.certified_bound->get_d(), r.float_objective - 1e-6);
  EXPECT_LE(r.certified_bound->get_d(), r.wilkinson_closed_form);

  auto cert = certificate_json(run.lp, *run.certificate);
  EXPECT_TRUE(cert["self_check"].get<bool>());
  const auto text = cert.dump();
  const auto check = check_certificate(nlohmann::json::parse(text));
  ASSERT_TRUE(check.ok) << check.reason;
  EXPECT_EQ(*check.bound, *r.certified_bound);

  auto tampered = cert;
  tampered["multipliers"][0]["y"] = format_rational(parse_rational(tampered["multipliers"][0]["y"].get<std::string>()) * 2);
  EXPECT_FALSE(check_certificate(tampered).ok);
  auto wrong_bound = cert;
  wrong_bound["bound"] = "1/3";
  EXPECT_FALSE(check_certificate(wrong_bound).ok);
  auto wrong_row = cert;
  wrong_row["multipliers"][0]["k"] = 999999;
  EXPECT_FALSE(check_certificate(wrong_row).ok);
  EXPECT_FALSE(check_certificate(nlohmann::json::object()).ok);
}

TEST(FigureGrowth, SamplingAndRows) {
  const auto two = geometric_sample(2, 40);
  EXPECT_EQ(two, (std::vector<int>{1, 2}));
  const auto ns = geometric_sample(3000, 40);
  EXPECT_EQ(ns.front(), 1);
  EXPECT_EQ(ns.back(), 3000);
  EXPECT_LE(ns.size(), 40u);
  EXPECT_TRUE(std::is_sorted(ns.begin(), ns.end()));
  EXPECT_THROW(geometric_sample(1, 10), std::invalid_argument);

  const auto rows = figure_growth(geometric_sample(400, 12), {SelectorKind::Band, 4}, false, 2);
  for (const auto& r : rows) {
    EXPECT_LE(r.improved, r.wilkinson + 1e-9) << r.n;
    EXPECT_NEAR(r.wilkinson, static_cast<double>(oracle::wilkinson_sum(r.n)), 1e-9);
  }
  std::ostringstream a;
  std::ostringstream b;
  write_growth_csv(a, rows);
  write_growth_csv(b, figure_growth(geometric_sample(400, 12), {SelectorKind::Band, 4}, false, 1));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().rfind("n,wilkinson_log_bound,improved_log_bound,theorem1_log_bound,certified\n", 0), 0u);
  std::ostringstream svg;
  write_growth_svg(svg, rows);
  EXPECT_NE(svg.str().find("<polyline"), std::string::npos);
}

TEST(FigureGrowth, CertifiedSweep) {
  const auto rows = figure_growth({1, 2, 30, 250}, {SelectorKind::Band, 4}, true, 2);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.certified) << r.n;
    EXPECT_GE(r.certified_bound->get_d(), r.improved - 1e-6);
  }
}

TEST(ActiveConstraints, ThreeDimensionalByHand) {
  const auto lp = build_improved_lp(3, {SelectorKind::Full, 4});
  const auto exact = exact_simplex_solve(lp);
  const auto rec = active_constraints_exact(lp, exact.primal);
  EXPECT_EQ(rec.active, (std::vector<std::pair<int, int>>{{2, 0}, {3, 0}}));
  EXPECT_EQ(rec.wilkinson_active, 2u);
  EXPECT_EQ(rec.tolerance, 0.0);
  const auto fl = active_constraints(lp, solve_float(lp).primal);
  EXPECT_EQ(fl.active, rec.active);
}

TEST(ActiveConstraints, ListedRowsBelongToInstance) {
  BoundRequest req;
  req.n = 600;
  const auto run = run_bound(req);
  const auto rec = active_constraints(run.lp, run.solution.primal);
  EXPECT_GE(rec.active.size(), static_cast<std::size_t>(req.n - 1));
  for (const auto& [k, l] : rec.active) EXPECT_GE(run.lp.find_row(k, l), 0);
  std::ostringstream csv;
  write_active_csv(csv, rec);
  EXPECT_NE(csv.str().find("sqrt2_line"), std::string::npos);
  EXPECT_NE(csv.str().find("diagonal_line"), std::string::npos);
}

TEST(ActiveConstraints, FewWilkinsonRowsActiveAtFiveThousand) {
  BoundRequest req;
  req.n = 5000;
  const auto run = run_bound(req);
  const auto rec = active_constraints(run.lp, run.solution.primal);
  EXPECT_LT(rec.wilkinson_fraction(), 0.05);
  const double s2 = std::numbers::sqrt2;
  for (const auto& [k, l] : rec.active)
    if (l > 0) EXPECT_LE(std::fabs(k + l - s2 * k), 5.0);
}

TEST(PartialPivotingDemo, HundredAndFive) {
  const auto big = run_appendix_a(100, 1);
  EXPECT_GT(big.rel_error_partial, 1e-2);
  EXPECT_LT(big.rel_error_complete, 1e-10);
  EXPECT_GE(big.condition_2, 40.0);
  EXPECT_LE(big.condition_2, 50.0);
  EXPECT_EQ(big.growth_partial, std::ldexp(1.0, 99));

  const auto small = run_appendix_a(5, 1);
  EXPECT_LT(small.rel_error_partial, 1e-12);
  EXPECT_LT(small.rel_error_complete, 1e-12);
  EXPECT_EQ(small.growth_partial, 16.0);
  EXPECT_THROW(run_appendix_a(1, 1), std::invalid_argument);
}

TEST(PartialPivotingDemo, SeededOutputIsReproducible) {
  std::ostringstream a;
  std::ostringstream b;
  write_appendix_a_text(a, run_appendix_a(100, 7));
  write_appendix_a_text(b, run_appendix_a(100, 7));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(to_json(run_appendix_a(40, 7)).dump(), to_json(run_appendix_a(40, 7)).dump());
  EXPECT_NE(to_json(run_appendix_a(40, 7)).dump(), to_json(run_appendix_a(40, 8)).dump());
}

TEST(ConstantsJson, CarriesValuesAndFormulas) {
  const auto j = constants_json();
  for (const char* key : {"alpha", "beta", "gamma_star", "t_star", "wilkinson_exponent", "entropy_factor_max",
                          "two_case_factor_max"}) {
    ASSERT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j[key].contains("formula"));
    EXPECT_TRUE(j[key]["value"].is_number());
  }
}

TEST(ThreadCap, ReadsEnvironment) {
  setenv("GROWTHBOUND_THREADS", "3", 1);
  EXPECT_EQ(thread_cap(), 3);
  setenv("GROWTHBOUND_THREADS", "zero", 1);
  EXPECT_GE(thread_cap(), 1);
  unsetenv("GROWTHBOUND_THREADS");
  EXPECT_GE(thread_cap(), 1);
}

TEST(Cli, BoundCommands) {
  const auto wil = run_cli("bound --n 100 --program wilkinson --format json");
  ASSERT_EQ(wil.code, 0);
  const auto j = nlohmann::json::parse(wil.out);
  EXPECT_NEAR(j["float_objective"].get<double>(), static_cast<double>(oracle::wilkinson_sum(100)), 1e-7);
  EXPECT_FALSE(j.contains("timings"));

  const auto one = run_cli("bound --n 1 --program improved");
  EXPECT_EQ(one.code, 0);
  EXPECT_NE(one.out.find("LP optimum (log scale): 0"), std::string::npos);
}

TEST(Cli, CertificateWriteAndCheck) {
  const auto dir = scratch_dir();
  const auto report = dir / "bound.json";
  const auto r = run_cli("bound --n 1000 --program improved --selector band --certify --format json --out " +
                         report.string());
  ASSERT_EQ(r.code, 0);
  const auto cert = fs::path(report.string() + ".cert.json");
  ASSERT_TRUE(fs::exists(cert));
  EXPECT_EQ(run_cli("certify --check " + cert.string()).code, 0);

  auto j = nlohmann::json::parse(slurp(cert));
  j["bound"] = "0";
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << j.dump();
  EXPECT_EQ(run_cli("certify --check " + bad.string()).code, 1);
  std::ofstream(dir / "junk.json") << "{ not json";
  EXPECT_EQ(run_cli("certify --check " + (dir / "junk.json").string()).code, 1);

  const auto direct = run_cli("certify --n 40 --selector full");
  ASSERT_EQ(direct.code, 0);
  EXPECT_TRUE(check_certificate(nlohmann::json::parse(direct.out)).ok);
  fs::remove_all(dir);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("bound --n nope").code, 2);
  EXPECT_EQ(run_cli("bound --n 10 --selector sideways").code, 2);
  EXPECT_EQ(run_cli("bound --n 0").code, 2);
  EXPECT_EQ(run_cli("bound --n 10 --format svg").code, 2);
  EXPECT_EQ(run_cli("figure growth-bounds --nmax 1").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
}

TEST(Cli, GeRunOnMatrixFile) {
  const auto dir = scratch_dir();
  const auto file = dir / "w3.txt";
  std::ofstream(file) << "3 3 rational-real\n1 0 1\n-1 1 1\n-1 -1 1\n";
  const auto r = run_cli("ge run --matrix-file " + file.string() + " --strategy partial --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["growth_factor"].get<double>(), 4.0);
  EXPECT_EQ(j["pivots"], (std::vector<double>{4, 1, 1}));
  EXPECT_EQ(run_cli("ge run --matrix-file " + (dir / "missing.txt").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, FiguresAreDeterministic) {
  const auto a = run_cli("figure growth-bounds --nmax 200 --points 10");
  const auto b = run_cli("figure growth-bounds --nmax 200 --points 10");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto two = run_cli("figure growth-bounds --nmax 2");
  ASSERT_EQ(two.code, 0);
  EXPECT_EQ(std::count(two.out.begin(), two.out.end(), '\n'), 3);
  const auto act = run_cli("figure active-constraints --n 150 --format svg");
  ASSERT_EQ(act.code, 0);
  EXPECT_NE(act.out.find("<circle"), std::string::npos);
}

TEST(Cli, DemoConstantsSelftest) {
  const auto demo = run_cli("demo appendix-a --n 100 --seed 1 --format json");
  ASSERT_EQ(demo.code, 0);
  const auto j = nlohmann::json::parse(demo.out);
  EXPECT_GT(j["relative_error_partial"].get<double>(), 1e-2);
  EXPECT_EQ(run_cli("demo appendix-a --n 100 --seed 1 --format json").out, demo.out);
  const auto c = run_cli("constants --json");
  ASSERT_EQ(c.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(c.out)["alpha"]["value"].get<double>(), 0.20781, 1e-5);
  const auto st = run_cli("selftest");
  EXPECT_EQ(st.code, 0);
  EXPECT_EQ(st.out.find("FAIL"), std::string::npos);
}
