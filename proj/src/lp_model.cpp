#include "growthbound/lp_model.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace growthbound {

namespace {

// floor(sqrt(2) k), exactly.
long floor_sqrt2_times(long k) {
  const long target = 2 * k * k;
  long r = static_cast<long>(std::sqrt(static_cast<double>(target)));
  while (r * r > target) --r;
  while ((r + 1) * (r + 1) <= target) ++r;
  return r;
}

class MpfrValue {
 public:
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~MpfrValue() { mpfr_clear(v_); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

mpfr_prec_t working_precision(int bits) { return std::max(bits, 200) + 64; }

// (k/2) ln k or (k/2) ln(11k/4), rounded in direction `rnd` at every step.
// Every factor is positive, so directed rounding composes.
void evaluate_rhs(mpfr_ptr out, RhsKind kind, int k, mpfr_rnd_t rnd) {
  mpfr_set_si(out, k, rnd);
  if (kind == RhsKind::Improved) {
    mpfr_mul_si(out, out, 11, rnd);
    mpfr_div_si(out, out, 4, rnd);
  }
  mpfr_log(out, out, rnd);
  mpfr_mul_si(out, out, k, rnd);
  mpfr_div_2ui(out, out, 1, rnd);
}

// Round v onto the grid 2^-(bits+1) 2^floor(log2 max(1, v)) in direction `up`.
Rational snap_to_grid(mpfr_ptr v, int bits, bool up) {
  if (mpfr_zero_p(v)) return Rational(0);
  long e = 0;
  if (mpfr_cmp_ui(v, 1) >= 0) e = mpfr_get_exp(v) - 1;
  const long scale = static_cast<long>(bits) + 1 - e;
  mpfr_mul_2si(v, v, scale, MPFR_RNDN);  // exact
  if (up) mpfr_ceil(v, v);
  else mpfr_floor(v, v);
  Integer z;
  mpfr_get_z(z.get_mpz_t(), v, MPFR_RNDN);
  Rational r(z);
  if (scale >= 0) {
    mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(scale));
  } else {
    mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-scale));
  }
  r.canonicalize();
  return r;
}

void check_bits(int bits) {
  if (bits < 8 || bits > 4096) throw std::invalid_argument("precision bits must lie in [8, 4096]");
}

struct RhsCache {
  std::vector<Rational> upper;
  std::vector<double> nearest;
};

RhsCache rhs_table(RhsKind kind, int n, int bits) {
  RhsCache c;
  c.upper.resize(n + 1);
  c.nearest.resize(n + 1);
  for (int k = 1; k <= n; ++k) {
    c.upper[k] = rhs_enclosure(kind, k, bits);
    c.nearest[k] = rhs_nearest(kind, k);
  }
  return c;
}

ConstraintRow q_row(int k, int ell, int a, int m, int b) {
  // sum_{i<=k} q_i - a q_k - b q_m
  ConstraintRow r;
  r.k = k;
  r.ell = ell;
  r.prefix = k;
  r.terms.push_back({k - 1, -static_cast<std::int64_t>(a)});
  if (b != 0) r.terms.push_back({m - 1, -static_cast<std::int64_t>(b)});
  r.rhs_kind = ell == 0 ? RhsKind::Wilkinson : RhsKind::Improved;
  return r;
}

LPInstance base_instance(int n, int bits) {
  if (n < 1) throw std::invalid_argument("LP dimension must be at least 1");
  check_bits(bits);
  LPInstance lp;
  lp.n = n;
  lp.precision_bits = bits;
  const auto w = rhs_table(RhsKind::Wilkinson, n, bits);
  lp.rows.reserve(n);
  for (int k = 1; k <= n; ++k) {
    auto r = q_row(k, 0, k, k, 0);
    r.rhs_upper = w.upper[k];
    r.rhs_float = w.nearest[k];
    lp.rows.push_back(std::move(r));
  }
  lp.objective.assign(n, Rational(0));
  return lp;
}

void set_head_tail(LPInstance& lp) {
  if (lp.n >= 2) {
    lp.objective[0] = 1;
    lp.objective[lp.n - 1] = -1;
  }
}

const char* var_prefix(LpForm f) { return f == LpForm::QForm ? "q" : "Q"; }

}  // namespace

bool ConstraintSelector::includes(int n, int k, int l) const {
  if (k < 2 || k > n - 1 || l < 1 || l > std::min(k - 1, n - k)) return false;
  const long m = static_cast<long>(k) + l;
  const long r = floor_sqrt2_times(k);
  const bool band = m >= r && m <= r + band_width;
  const bool diag = m == n;
  switch (kind) {
    case SelectorKind::Full: return true;
    case SelectorKind::WilkinsonOnly: return false;
    case SelectorKind::Band: return band;
    case SelectorKind::Diagonal: return diag;
    case SelectorKind::BandDiagonal: return band || diag;
    case SelectorKind::Theorem1: return m == r + 1;
  }
  return false;
}

void ConstraintSelector::validate() const {
  if (band_width < 0) throw std::invalid_argument("band width must be nonnegative");
}

std::string_view to_string(LpForm f) { return f == LpForm::QForm ? "q" : "cumulative"; }

std::string_view to_string(ProgramKind p) {
  switch (p) {
    case ProgramKind::Wilkinson: return "wilkinson";
    case ProgramKind::GeoMean: return "geomean";
    case ProgramKind::Improved: return "improved";
  }
  return "?";
}

std::string_view to_string(SelectorKind s) {
  switch (s) {
    case SelectorKind::Full: return "full";
    case SelectorKind::WilkinsonOnly: return "wilkinson-only";
    case SelectorKind::Band: return "band";
    case SelectorKind::Diagonal: return "diagonal";
    case SelectorKind::BandDiagonal: return "band+diagonal";
    case SelectorKind::Theorem1: return "theorem1";
  }
  return "?";
}

ProgramKind parse_program(std::string_view token) {
  if (token == "wilkinson") return ProgramKind::Wilkinson;
  if (token == "geomean") return ProgramKind::GeoMean;
  if (token == "improved") return ProgramKind::Improved;
  throw std::invalid_argument("unknown program '" + std::string(token) + "'");
}

SelectorKind parse_selector(std::string_view token) {
  for (auto s : {SelectorKind::Full, SelectorKind::WilkinsonOnly, SelectorKind::Band, SelectorKind::Diagonal,
                 SelectorKind::BandDiagonal, SelectorKind::Theorem1})
    if (token == to_string(s)) return s;
  if (token == "band-diagonal") return SelectorKind::BandDiagonal;
  throw std::invalid_argument("unknown selector '" + std::string(token) + "'");
}

std::map<int, std::int64_t> ConstraintRow::coefficients() const {
  std::map<int, std::int64_t> out;
  for (int i = 0; i < prefix; ++i) out[i] += 1;
  for (const auto& t : terms) out[t.var] += t.coef;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

long LPInstance::find_row(int k, int l) const {
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].k == k && rows[i].ell == l) return static_cast<long>(i);
  return -1;
}

Rational rhs_enclosure(RhsKind kind, int k, int precision_bits) {
  if (k < 1) throw std::invalid_argument("rhs enclosure needs k >= 1");
  check_bits(precision_bits);
  MpfrValue v(working_precision(precision_bits));
  evaluate_rhs(v.get(), kind, k, MPFR_RNDU);
  return snap_to_grid(v.get(), precision_bits, true);
}

Rational rhs_lower_enclosure(RhsKind kind, int k, int precision_bits) {
  if (k < 1) throw std::invalid_argument("rhs enclosure needs k >= 1");
  check_bits(precision_bits);
  MpfrValue v(working_precision(precision_bits));
  evaluate_rhs(v.get(), kind, k, MPFR_RNDD);
  return snap_to_grid(v.get(), precision_bits, false);
}

double rhs_nearest(RhsKind kind, int k) {
  if (k < 1) throw std::invalid_argument("rhs value needs k >= 1");
  MpfrValue v(256);
  evaluate_rhs(v.get(), kind, k, MPFR_RNDN);
  return mpfr_get_d(v.get(), MPFR_RNDN);
}

LPInstance build_wilkinson_lp(int n, int precision_bits) {
  auto lp = base_instance(n, precision_bits);
  lp.program = ProgramKind::Wilkinson;
  set_head_tail(lp);
  return lp;
}

LPInstance build_geomean_lp(int n, const std::vector<Rational>& weights, int precision_bits) {
  auto lp = base_instance(n, precision_bits);
  lp.program = ProgramKind::GeoMean;
  std::vector<Rational> w = weights;
  if (w.empty()) w.assign(n, Rational(1, n));
  if (static_cast<int>(w.size()) != n) throw std::invalid_argument("weight vector length must equal n");
  Rational total(0);
  for (const auto& x : w) {
    if (sgn(x) < 0) throw std::invalid_argument("weights must be nonnegative");
    total += x;
  }
  for (int k = 0; k < n; ++k) lp.objective[k] = -w[k];
  lp.objective[0] += total;
  return lp;
}

std::vector<std::pair<int, int>> selected_pairs(int n, ConstraintSelector selector) {
  selector.validate();
  std::vector<std::pair<int, int>> out;
  for (int k = 2; k <= n - 1; ++k) {
    const int lmax = std::min(k - 1, n - k);
    int lo = 1;
    int hi = lmax;
    if (selector.kind == SelectorKind::WilkinsonOnly) break;
    if (selector.kind == SelectorKind::Band || selector.kind == SelectorKind::Theorem1) {
      const long r = floor_sqrt2_times(k);
      const long first = selector.kind == SelectorKind::Band ? r : r + 1;
      const long last = selector.kind == SelectorKind::Band ? r + selector.band_width : r + 1;
      lo = static_cast<int>(std::max<long>(1, first - k));
      hi = static_cast<int>(std::min<long>(lmax, last - k));
    } else if (selector.kind == SelectorKind::Diagonal) {
      lo = hi = n - k;
    }
    for (int l = lo; l <= hi; ++l)
      if (selector.includes(n, k, l)) out.emplace_back(k, l);
  }
  return out;
}

LPInstance build_improved_lp(int n, ConstraintSelector selector, int precision_bits) {
  auto lp = base_instance(n, precision_bits);
  lp.program = ProgramKind::Improved;
  lp.selector = selector;
  set_head_tail(lp);
  const auto pairs = selected_pairs(n, selector);
  if (!pairs.empty()) {
    const auto imp = rhs_table(RhsKind::Improved, n, precision_bits);
    lp.rows.reserve(lp.rows.size() + pairs.size());
    for (const auto& [k, l] : pairs) {
      auto r = q_row(k, l, l, k + l, k - l);
      r.rhs_upper = imp.upper[k];
      r.rhs_float = imp.nearest[k];
      lp.rows.push_back(std::move(r));
    }
  }
  return lp;
}

LPInstance build_program(ProgramKind program, int n, ConstraintSelector selector, int precision_bits) {
  switch (program) {
    case ProgramKind::Wilkinson: return build_wilkinson_lp(n, precision_bits);
    case ProgramKind::GeoMean: return build_geomean_lp(n, {}, precision_bits);
    case ProgramKind::Improved: return build_improved_lp(n, selector, precision_bits);
  }
  throw std::invalid_argument("unknown program");
}

LPInstance cumulative_transform(const LPInstance& lp) {
  if (lp.form != LpForm::QForm) throw std::invalid_argument("instance is already in cumulative form");
  LPInstance out;
  out.n = lp.n;
  out.form = LpForm::CumulativeForm;
  out.program = lp.program;
  out.selector = lp.selector;
  out.precision_bits = lp.precision_bits;
  out.rows.reserve(lp.rows.size());
  for (const auto& r : lp.rows) {
    // q_j = Q_j - Q_{j-1}; a prefix of length P is Q_P.
    std::map<int, std::int64_t> c;
    if (r.prefix > 0) c[r.prefix - 1] += 1;
    for (const auto& t : r.terms) {
      c[t.var] += t.coef;
      if (t.var > 0) c[t.var - 1] -= t.coef;
    }
    ConstraintRow nr;
    nr.k = r.k;
    nr.ell = r.ell;
    nr.rhs_kind = r.rhs_kind;
    nr.rhs_upper = r.rhs_upper;
    nr.rhs_float = r.rhs_float;
    for (const auto& [v, coef] : c)
      if (coef != 0) nr.terms.push_back({v, coef});
    out.rows.push_back(std::move(nr));
  }
  out.objective.assign(lp.n, Rational(0));
  for (int j = 0; j < lp.n; ++j)
    out.objective[j] = j + 1 < lp.n ? lp.objective[j] - lp.objective[j + 1] : lp.objective[j];
  return out;
}

std::vector<double> prefix_sums(std::span<const double> x) {
  std::vector<double> s(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) s[i + 1] = s[i] + x[i];
  return s;
}

double row_activity(const ConstraintRow& row, std::span<const double> x, std::span<const double> ps) {
  double acc = row.prefix > 0 ? ps[row.prefix] : 0.0;
  for (const auto& t : row.terms) acc += static_cast<double>(t.coef) * x[t.var];
  return acc;
}

std::vector<Rational> transpose_product(const LPInstance& lp, std::span<const Rational> y) {
  if (y.size() != lp.rows.size()) throw std::invalid_argument("multiplier count differs from row count");
  std::vector<Rational> diff(lp.n + 1, Rational(0));
  std::vector<Rational> out(lp.n, Rational(0));
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (sgn(y[i]) == 0) continue;
    const auto& r = lp.rows[i];
    if (r.prefix > 0) {
      diff[0] += y[i];
      diff[r.prefix] -= y[i];
    }
    for (const auto& t : r.terms) out[t.var] += y[i] * t.coef;
  }
  Rational run(0);
  for (int j = 0; j < lp.n; ++j) {
    run += diff[j];
    out[j] += run;
  }
  return out;
}

bool equivalent(const LPInstance& a, const LPInstance& b) {
  if (a.n != b.n || a.form != b.form || a.rows.size() != b.rows.size() || a.objective != b.objective) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& ra = a.rows[i];
    const auto& rb = b.rows[i];
    if (ra.k != rb.k || ra.ell != rb.ell || ra.rhs_upper != rb.rhs_upper) return false;
    if (ra.coefficients() != rb.coefficients()) return false;
  }
  return true;
}

void write_lp(std::ostream& out, const LPInstance& lp) {
  nlohmann::json meta;
  meta["n"] = lp.n;
  meta["form"] = std::string(to_string(lp.form));
  meta["program"] = std::string(to_string(lp.program));
  meta["selector"] = std::string(to_string(lp.selector.kind));
  meta["band_width"] = lp.selector.band_width;
  meta["precision_bits"] = lp.precision_bits;
  meta["rows"] = lp.rows.size();
  auto obj = nlohmann::json::object();
  for (int j = 0; j < lp.n; ++j)
    if (sgn(lp.objective[j]) != 0) obj[var_prefix(lp.form) + std::to_string(j + 1)] = format_rational(lp.objective[j]);
  meta["objective"] = obj;
  out << meta.dump() << '\n';
  const char* pre = var_prefix(lp.form);
  for (const auto& r : lp.rows) {
    out << r.k << ' ' << r.ell << " :";
    for (const auto& [v, c] : r.coefficients()) out << ' ' << c << '*' << pre << (v + 1);
    out << " <= " << format_rational(r.rhs_upper) << '\n';
  }
}

LPInstance read_lp(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("LP file is empty");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad LP header: ") + e.what());
  }
  LPInstance lp;
  try {
    lp.n = meta.at("n").get<int>();
    const auto form = meta.at("form").get<std::string>();
    if (form == "q") lp.form = LpForm::QForm;
    else if (form == "cumulative") lp.form = LpForm::CumulativeForm;
    else throw std::invalid_argument("unknown LP form '" + form + "'");
    lp.program = parse_program(meta.at("program").get<std::string>());
    lp.selector.kind = parse_selector(meta.at("selector").get<std::string>());
    lp.selector.band_width = meta.value("band_width", 4);
    lp.precision_bits = meta.value("precision_bits", kDefaultPrecisionBits);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad LP header: ") + e.what());
  }
  if (lp.n < 1) throw std::invalid_argument("LP dimension must be at least 1");
  const std::string pre = var_prefix(lp.form);
  auto parse_var = [&](const std::string& name) {
    if (name.rfind(pre, 0) != 0) throw std::invalid_argument("unexpected variable '" + name + "'");
    const int idx = std::stoi(name.substr(pre.size()));
    if (idx < 1 || idx > lp.n) throw std::invalid_argument("variable index out of range: " + name);
    return idx - 1;
  };
  lp.objective.assign(lp.n, Rational(0));
  for (const auto& [name, val] : meta.at("objective").items())
    lp.objective[parse_var(name)] = parse_rational(val.get<std::string>());

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ConstraintRow r;
    std::string colon;
    if (!(ls >> r.k >> r.ell >> colon) || colon != ":") throw std::invalid_argument("bad LP row: " + line);
    std::string tok;
    bool have_rhs = false;
    while (ls >> tok) {
      if (tok == "<=") {
        std::string rhs;
        if (!(ls >> rhs)) throw std::invalid_argument("missing right-hand side: " + line);
        r.rhs_upper = parse_rational(rhs);
        have_rhs = true;
        break;
      }
      const auto star = tok.find('*');
      if (star == std::string::npos) throw std::invalid_argument("bad term '" + tok + "'");
      r.terms.push_back({parse_var(tok.substr(star + 1)), std::stoll(tok.substr(0, star))});
    }
    if (!have_rhs) throw std::invalid_argument("missing right-hand side: " + line);
    if (r.k < 1 || r.k > lp.n || r.ell < 0) throw std::invalid_argument("bad row provenance: " + line);
    r.rhs_kind = r.ell == 0 ? RhsKind::Wilkinson : RhsKind::Improved;
    r.rhs_float = rhs_nearest(r.rhs_kind, r.k);
    lp.rows.push_back(std::move(r));
  }
  return lp;
}

FeasibilityReport check_log_pivot_feasibility(std::span<const double> lp_, PivotProgram program,
                                              ConstraintSelector selector, double tol) {
  const int n = static_cast<int>(lp_.size());
  FeasibilityReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  if (n == 0) return rep;
  const auto ps = prefix_sums(lp_);
  auto q = [&](int k) { return lp_[k - 1]; };
  auto record = [&](int k, int l, double lhs, double rhs) {
    const double slack = rhs - lhs;
    ++rep.constraints_checked;
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < -tol * (1.0 + std::fabs(rhs))) rep.violations.push_back({k, l, slack});
  };
  for (int k = 1; k <= n; ++k) {
    const double kk = k;
    record(k, 0, ps[k], 0.5 * kk * std::log(kk) + kk * q(k));
  }
  if (program == PivotProgram::WilkinsonOpt) return rep;
  for (const auto& [k, l] : selected_pairs(n, selector)) {
    const double kk = k;
    const double ll = l;
    double rhs = 0.0;
    if (program == PivotProgram::ImprovedOpt) {
      const double a = q(k);
      const double b = q(k + l);
      const double log_sum = std::max(a, b) + std::log1p(std::exp(-std::fabs(a - b)));
      rhs = kk * std::log(kk) - 0.5 * (kk - ll) * std::log(kk - ll) - 0.5 * ll * std::log(ll) + (kk - ll) * b +
            ll * log_sum;
    } else {
      rhs = 0.5 * kk * std::log(11.0 * kk / 4.0) + (kk - ll) * q(k + l) + ll * q(k);
    }
    record(k, l, ps[k], rhs);
  }
  return rep;
}

FeasibilityReport check_pivot_feasibility(std::span<const double> pivots, PivotProgram program,
                                          ConstraintSelector selector, double tol) {
  std::vector<double> logs(pivots.size());
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    if (!(pivots[i] > 0.0)) throw std::invalid_argument("pivots must be positive");
    logs[i] = std::log(pivots[i]);
  }
  return check_log_pivot_feasibility(logs, program, selector, tol);
}

}  // namespace growthbound
