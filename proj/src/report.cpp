#include "growthbound/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "growthbound/asymptotics.hpp"
#include "growthbound/det_bounds.hpp"
#include "growthbound/elimination.hpp"

namespace growthbound {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::setprecision(digits) << std::fixed << v;
  return os.str();
}

double rel_error(const std::vector<double>& approx, const std::vector<double>& exact) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    num += (approx[i] - exact[i]) * (approx[i] - exact[i]);
    den += exact[i] * exact[i];
  }
  return std::sqrt(num / den);
}

// Scales data onto an SVG viewport with a fixed margin.
struct Axes {
  double x0, x1, y0, y1;
  double width = 640, height = 420, margin = 50;
  double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
  double py(double y) const { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); }
};

void svg_header(std::ostream& out, const Axes& ax, const std::string& title, const std::string& xlabel,
                const std::string& ylabel) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ax.width << "\" height=\"" << ax.height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << ax.width / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  out << "<line x1=\"" << ax.margin << "\" y1=\"" << ax.height - ax.margin << "\" x2=\"" << ax.width - ax.margin
      << "\" y2=\"" << ax.height - ax.margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ax.margin << "\" y1=\"" << ax.margin << "\" x2=\"" << ax.margin << "\" y2=\""
      << ax.height - ax.margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << ax.width / 2 << "\" y=\"" << ax.height - 12 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << ax.height / 2 << "\" transform=\"rotate(-90 14 " << ax.height / 2
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  out << "<text x=\"" << ax.margin << "\" y=\"" << ax.height - ax.margin + 16 << "\" text-anchor=\"middle\">"
      << fixed(ax.x0, 0) << "</text>\n";
  out << "<text x=\"" << ax.width - ax.margin << "\" y=\"" << ax.height - ax.margin + 16
      << "\" text-anchor=\"middle\">" << fixed(ax.x1, 0) << "</text>\n";
  out << "<text x=\"" << ax.margin - 4 << "\" y=\"" << ax.height - ax.margin << "\" text-anchor=\"end\">"
      << fixed(ax.y0, 2) << "</text>\n";
  out << "<text x=\"" << ax.margin - 4 << "\" y=\"" << ax.margin + 4 << "\" text-anchor=\"end\">" << fixed(ax.y1, 2)
      << "</text>\n";
}

std::map<std::pair<int, int>, std::size_t> row_index(const LPInstance& lp) {
  std::map<std::pair<int, int>, std::size_t> idx;
  for (std::size_t r = 0; r < lp.rows.size(); ++r) idx.emplace(std::make_pair(lp.rows[r].k, lp.rows[r].ell), r);
  return idx;
}

}  // namespace

int thread_cap() {
  if (const char* env = std::getenv("GROWTHBOUND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 1024L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BoundRun run_bound(const BoundRequest& req) {
  BoundRun run;
  auto& rep = run.report;
  rep.n = req.n;
  rep.program = req.program;
  rep.selector = req.selector;
  rep.precision_bits = req.precision_bits;

  auto t0 = Clock::now();
  run.lp = build_program(req.program, req.n, req.selector, req.precision_bits);
  rep.build_seconds = seconds_since(t0);
  rep.rows = run.lp.rows.size();

  t0 = Clock::now();
  run.solution = solve_float(run.lp);
  rep.solve_seconds = seconds_since(t0);
  rep.status = std::string(to_string(run.solution.status));
  rep.float_objective = run.solution.objective;
  rep.iterations = run.solution.iterations;

  rep.wilkinson_closed_form = wilkinson_bound_closed_form(req.n).exact_sum;
  rep.theorem1_value = theorem1_bound(req.n);

  if (req.certify) {
    t0 = Clock::now();
    run.certificate = certify(run.lp, run.solution);
    rep.certify_seconds = seconds_since(t0);
    rep.certification_method = std::string(to_string(run.certificate->method));
    rep.certification_notes = run.certificate->diagnostics;
    if (run.certificate->verified) rep.certified_bound = run.certificate->bound;
  }
  return run;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["program"] = std::string(to_string(r.program));
  j["selector"] = std::string(to_string(r.selector.kind));
  j["band_width"] = r.selector.band_width;
  j["precision_bits"] = r.precision_bits;
  j["status"] = r.status;
  j["float_objective"] = r.float_objective;
  j["float_growth_bound"] = std::exp(r.float_objective);
  if (r.certified_bound) {
    j["certified_bound"] = format_rational(*r.certified_bound);
    j["certified_bound_value"] = r.certified_bound->get_d();
  } else {
    j["certified_bound"] = nullptr;
  }
  if (!r.certification_method.empty()) j["certification_method"] = r.certification_method;
  if (!r.certification_notes.empty()) j["certification_notes"] = r.certification_notes;
  j["wilkinson_closed_form"] = r.wilkinson_closed_form;
  j["theorem1_value"] = r.theorem1_value;
  j["rows"] = r.rows;
  j["iterations"] = r.iterations;
  j["timings"] = {{"build", r.build_seconds}, {"solve", r.solve_seconds}, {"certify", r.certify_seconds}};
  return j;
}

nlohmann::json certificate_json(const LPInstance& lp, const CertifiedBound& cert) {
  nlohmann::json j;
  j["n"] = lp.n;
  j["program"] = std::string(to_string(lp.program));
  j["selector"] = std::string(to_string(lp.selector.kind));
  j["band_width"] = lp.selector.band_width;
  j["precision_bits"] = lp.precision_bits;
  j["form"] = std::string(to_string(lp.form));
  j["method"] = std::string(to_string(cert.method));
  auto mult = nlohmann::json::array();
  for (std::size_t r = 0; r < cert.multipliers.size() && r < lp.rows.size(); ++r)
    if (sgn(cert.multipliers[r]) != 0)
      mult.push_back({{"k", lp.rows[r].k}, {"l", lp.rows[r].ell}, {"y", format_rational(cert.multipliers[r])}});
  j["multipliers"] = mult;
  j["bound"] = cert.bound ? nlohmann::json(format_rational(*cert.bound)) : nlohmann::json(nullptr);
  const auto check = verify_dual(lp, cert.multipliers);
  j["self_check"] = check.ok && cert.bound && check.bound == *cert.bound;
  return j;
}

CertificateCheck check_certificate(const nlohmann::json& cert) {
  CertificateCheck out;
  try {
    const int n = cert.at("n").get<int>();
    const auto program = parse_program(cert.at("program").get<std::string>());
    ConstraintSelector sel{parse_selector(cert.at("selector").get<std::string>()), cert.value("band_width", 4)};
    const int bits = cert.value("precision_bits", kDefaultPrecisionBits);
    LPInstance lp = build_program(program, n, sel, bits);
    if (cert.value("form", std::string("q")) == "cumulative") lp = cumulative_transform(lp);
    const auto idx = row_index(lp);
    std::vector<Rational> y(lp.rows.size(), Rational(0));
    for (const auto& m : cert.at("multipliers")) {
      const auto key = std::make_pair(m.at("k").get<int>(), m.at("l").get<int>());
      const auto it = idx.find(key);
      if (it == idx.end()) {
        out.reason = "multiplier for a row (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                     ") the instance does not contain";
        return out;
      }
      y[it->second] = parse_rational(m.at("y").get<std::string>());
    }
    const auto check = verify_dual(lp, y);
    if (!check.ok) {
      out.reason = check.reason;
      return out;
    }
    if (cert.at("bound").is_null() || parse_rational(cert.at("bound").get<std::string>()) != check.bound) {
      out.reason = "stated bound differs from the bound the multipliers prove";
      return out;
    }
    out.ok = true;
    out.bound = check.bound;
  } catch (const std::exception& e) {
    out.reason = std::string("malformed certificate: ") + e.what();
  }
  return out;
}

std::vector<int> geometric_sample(int nmax, int points) {
  if (nmax < 2) throw std::invalid_argument("sampling needs nmax >= 2");
  if (points < 2) points = 2;
  std::vector<int> ns;
  const double span = std::log(static_cast<double>(nmax));
  for (int i = 0; i < points; ++i) {
    const double v = std::exp(span * i / (points - 1));
    ns.push_back(std::clamp(static_cast<int>(std::lround(v)), 1, nmax));
  }
  ns.back() = nmax;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

std::vector<GrowthRow> figure_growth(const std::vector<int>& ns, ConstraintSelector selector, bool certify_rows,
                                     int threads) {
  std::vector<GrowthRow> rows(ns.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  // Largest instances first so the slowest solves start early.
  std::vector<std::size_t> order(ns.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= order.size()) return;
      const std::size_t i = order[slot];
      try {
        BoundRequest req;
        req.n = ns[i];
        req.program = ProgramKind::Improved;
        req.selector = selector;
        req.certify = certify_rows;
        const auto run = run_bound(req);
        auto& row = rows[i];
        row.n = ns[i];
        row.wilkinson = run.report.wilkinson_closed_form;
        row.improved = run.report.float_objective;
        row.theorem1 = run.report.theorem1_value;
        row.certified = run.report.certified_bound.has_value();
        row.certified_bound = run.report.certified_bound;
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(ns.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return rows;
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows) {
  out << "n,wilkinson_log_bound,improved_log_bound,theorem1_log_bound,certified\n";
  out << std::setprecision(12);
  for (const auto& r : rows)
    out << r.n << ',' << r.wilkinson << ',' << r.improved << ',' << r.theorem1 << ',' << (r.certified ? 1 : 0) << '\n';
}

void write_growth_svg(std::ostream& out, const std::vector<GrowthRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("nothing to plot");
  Axes ax{static_cast<double>(rows.front().n), static_cast<double>(rows.back().n), 0.0, 0.0};
  for (const auto& r : rows) ax.y1 = std::max({ax.y1, r.wilkinson, r.improved, r.theorem1});
  if (ax.x1 <= ax.x0) ax.x1 = ax.x0 + 1;
  if (ax.y1 <= ax.y0) ax.y1 = 1;
  svg_header(out, ax, "log growth-factor bounds", "n", "log bound");
  const std::pair<const char*, double GrowthRow::*> series[] = {
      {"#1f77b4", &GrowthRow::wilkinson}, {"#d62728", &GrowthRow::improved}, {"#2ca02c", &GrowthRow::theorem1}};
  const char* names[] = {"Wilkinson", "improved LP", "alpha ln^2 n + 0.91 ln n"};
  for (int s = 0; s < 3; ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << series[s].first << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows) out << fixed(ax.px(r.n), 2) << ',' << fixed(ax.py(r.*series[s].second), 2) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << ax.margin + 10 << "\" y=\"" << ax.margin + 16 * s << "\" fill=\"" << series[s].first
        << "\">" << names[s] << "</text>\n";
  }
  out << "</svg>\n";
}

ActiveConstraintRecord active_constraints(const LPInstance& lp, const std::vector<double>& primal, double rel_tol) {
  ActiveConstraintRecord rec;
  rec.n = lp.n;
  rec.tolerance = rel_tol;
  const auto ps = prefix_sums(primal);
  for (const auto& r : lp.rows) {
    if (r.k == 1) continue;
    const double slack = r.rhs_float - row_activity(r, primal, ps);
    if (slack <= rel_tol * (1.0 + std::fabs(r.rhs_float))) {
      rec.active.emplace_back(r.k, r.ell);
      if (r.ell == 0) ++rec.wilkinson_active;
    }
  }
  return rec;
}

ActiveConstraintRecord active_constraints_exact(const LPInstance& lp, const std::vector<Rational>& primal) {
  ActiveConstraintRecord rec;
  rec.n = lp.n;
  std::vector<Rational> ps(primal.size() + 1, Rational(0));
  for (std::size_t i = 0; i < primal.size(); ++i) ps[i + 1] = ps[i] + primal[i];
  for (const auto& r : lp.rows) {
    if (r.k == 1) continue;
    Rational act = r.prefix > 0 ? ps[r.prefix] : Rational(0);
    for (const auto& t : r.terms) act += primal[t.var] * t.coef;
    if (act == r.rhs_upper) {
      rec.active.emplace_back(r.k, r.ell);
      if (r.ell == 0) ++rec.wilkinson_active;
    }
  }
  return rec;
}

void write_active_csv(std::ostream& out, const ActiveConstraintRecord& rec) {
  out << "series,k,l\n";
  for (const auto& [k, l] : rec.active) out << "active," << k << ',' << l << '\n';
  out << std::setprecision(10);
  for (int k = 1; k <= rec.n; ++k) {
    const double l = (std::numbers::sqrt2 - 1.0) * k;
    if (k + l > rec.n) break;
    out << "sqrt2_line," << k << ',' << l << '\n';
  }
  for (int k = (rec.n + 1) / 2; k <= rec.n; ++k) out << "diagonal_line," << k << ',' << rec.n - k << '\n';
}

void write_active_svg(std::ostream& out, const ActiveConstraintRecord& rec) {
  Axes ax{0.0, static_cast<double>(std::max(rec.n, 2)), 0.0, static_cast<double>(std::max(rec.n / 2, 1))};
  svg_header(out, ax, "active constraints (k, l), n = " + std::to_string(rec.n), "k", "l");
  const double n = rec.n;
  out << "<polygon points=\"" << fixed(ax.px(0), 2) << ',' << fixed(ax.py(0), 2) << ' ' << fixed(ax.px(n / 2), 2)
      << ',' << fixed(ax.py(n / 2), 2) << ' ' << fixed(ax.px(n), 2) << ',' << fixed(ax.py(0), 2)
      << "\" fill=\"#eeeeee\"/>\n";
  const double kmax = n / std::numbers::sqrt2;
  out << "<line x1=\"" << fixed(ax.px(0), 2) << "\" y1=\"" << fixed(ax.py(0), 2) << "\" x2=\"" << fixed(ax.px(kmax), 2)
      << "\" y2=\"" << fixed(ax.py((std::numbers::sqrt2 - 1) * kmax), 2) << "\" stroke=\"red\"/>\n";
  out << "<line x1=\"" << fixed(ax.px(n / 2), 2) << "\" y1=\"" << fixed(ax.py(n / 2), 2) << "\" x2=\""
      << fixed(ax.px(n), 2) << "\" y2=\"" << fixed(ax.py(0), 2) << "\" stroke=\"purple\"/>\n";
  for (const auto& [k, l] : rec.active)
    out << "<circle cx=\"" << fixed(ax.px(k), 2) << "\" cy=\"" << fixed(ax.py(l), 2) << "\" r=\"1.2\"/>\n";
  out << "</svg>\n";
}

AppendixADemo run_appendix_a(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("demo needs n >= 2");
  AppendixADemo demo;
  demo.n = n;
  demo.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  demo.x_true.resize(n);
  for (auto& v : demo.x_true) v = dist(rng);

  const auto a_exact = wilkinson_matrix<Rational>(n);
  std::vector<Rational> x_exact(n);
  for (int i = 0; i < n; ++i) x_exact[i] = Rational(demo.x_true[i]);
  const auto b_exact = a_exact * x_exact;
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = b_exact[i].get_d();

  const auto a = wilkinson_matrix<double>(n);
  demo.x_partial = solve_linear_system(a, b, PivotStrategy::Partial);
  demo.x_complete = solve_linear_system(a, b, PivotStrategy::Complete);
  demo.rel_error_partial = rel_error(demo.x_partial, demo.x_true);
  demo.rel_error_complete = rel_error(demo.x_complete, demo.x_true);
  demo.exact_matches = solve_linear_system(a_exact, b_exact, PivotStrategy::Complete) == x_exact;
  demo.growth_partial = growth_factor_value(eliminate(a, PivotStrategy::Partial));
  demo.growth_complete = growth_factor_value(eliminate(a, PivotStrategy::Complete));
  demo.condition_2 = condition_number_2(a);
  return demo;
}

void write_appendix_a_text(std::ostream& out, const AppendixADemo& d) {
  out << "Wilkinson matrix, n = " << d.n << ", seed = " << d.seed << "\n";
  out << "cond_2(A) = " << fixed(d.condition_2, 4) << "\n";
  out << "growth factor: partial = " << std::setprecision(6) << std::scientific << d.growth_partial
      << ", complete = " << d.growth_complete << std::defaultfloat << "\n\n";
  out << std::setw(6) << "i" << std::setw(22) << "x" << std::setw(22) << "partial" << std::setw(22) << "complete"
      << "\n";
  const int mid = d.n / 2;
  const int lo = std::max(0, mid - 4);
  const int hi = std::min(d.n, mid + 4);
  out << std::setprecision(15);
  for (int i = lo; i < hi; ++i)
    out << std::setw(6) << i + 1 << std::setw(22) << d.x_true[i] << std::setw(22) << d.x_partial[i] << std::setw(22)
        << d.x_complete[i] << "\n";
  out << std::setprecision(6) << std::scientific;
  out << "\nrelative error (2-norm): partial = " << d.rel_error_partial << ", complete = " << d.rel_error_complete
      << "\n";
  out << std::defaultfloat;
  out << "exact rational solve reproduces x: " << (d.exact_matches ? "yes" : "no") << "\n";
}

nlohmann::json to_json(const AppendixADemo& d) {
  nlohmann::json j;
  j["n"] = d.n;
  j["seed"] = d.seed;
  j["condition_2"] = d.condition_2;
  j["growth_partial"] = d.growth_partial;
  j["growth_complete"] = d.growth_complete;
  j["relative_error_partial"] = d.rel_error_partial;
  j["relative_error_complete"] = d.rel_error_complete;
  j["exact_matches"] = d.exact_matches;
  const int mid = d.n / 2;
  auto rows = nlohmann::json::array();
  for (int i = std::max(0, mid - 4); i < std::min(d.n, mid + 4); ++i)
    rows.push_back({{"i", i + 1}, {"x", d.x_true[i]}, {"partial", d.x_partial[i]}, {"complete", d.x_complete[i]}});
  j["middle_elements"] = rows;
  return j;
}

nlohmann::json constants_json() {
  const auto c = constants();
  const auto ent = maximize_on_unit_interval(entropy_factor);
  const auto two = maximize_on_unit_interval(two_case_factor);
  nlohmann::json j;
  j["alpha"] = {{"value", c.alpha}, {"formula", "1/(2(2+(2-sqrt(2)) ln 2))"}};
  j["beta"] = {{"value", c.beta}, {"formula", "ln n coefficient of the induction"}};
  j["theorem1_log_coefficient"] = {{"value", c.theorem1_log_coefficient}, {"formula", "beta + 1/2"}};
  j["t_star"] = {{"value", c.t_star}, {"formula", "exp(W(2e) - 1) - 1"}};
  j["gamma_star"] = {{"value", c.gamma_star}, {"formula", "1/(4(1+(1-t*) ln(1+t*)))"}};
  j["lambert_w_2e"] = {{"value", c.lambert_w_2e}, {"formula", "W(2e), Newton on w e^w = 2e"}};
  j["wilkinson_exponent"] = {{"value", c.wilkinson_exponent}, {"formula", "1/4"}};
  j["alpha_minus_gamma_star"] = {{"value", c.alpha - c.gamma_star}, {"formula", "alpha - gamma_star"}};
  j["entropy_factor_max"] = {{"value", ent.value},
                             {"argmax", ent.argmax},
                             {"formula", "max_t (1/t)^(t/2) (1/(1-t))^((1-t)/2)"}};
  j["two_case_factor_max"] = {{"value", two.value},
                              {"argmax", two.argmax},
                              {"formula", "max_t (1 + (2/sqrt(11))^(1/(1-t)))^t"}};
  return j;
}

}  // namespace growthbound
