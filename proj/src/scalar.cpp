#include "growthbound/scalar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace growthbound {

std::string_view to_string(ScalarMode mode) {
  switch (mode) {
    case ScalarMode::RationalReal: return "rational-real";
    case ScalarMode::RationalComplex: return "rational-complex";
    case ScalarMode::Binary64Real: return "binary64-real";
    case ScalarMode::Binary64Complex: return "binary64-complex";
  }
  return "unknown";
}

ScalarMode parse_scalar_mode(std::string_view token) {
  if (token == "rational-real" || token == "rational") return ScalarMode::RationalReal;
  if (token == "rational-complex") return ScalarMode::RationalComplex;
  if (token == "binary64-real" || token == "binary64") return ScalarMode::Binary64Real;
  if (token == "binary64-complex") return ScalarMode::Binary64Complex;
  throw std::invalid_argument("unknown scalar mode: " + std::string(token));
}

namespace {

Rational parse_decimal(std::string_view text) {
  std::string s(text);
  std::string exp_part;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    exp_part = s.substr(e + 1);
    s.resize(e);
  }
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("malformed number: " + std::string(text));
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++scale;
    } else {
      throw std::invalid_argument("malformed number: " + std::string(text));
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed number: " + std::string(text));
  if (!exp_part.empty()) scale -= std::stol(exp_part);
  Rational q{Integer(digits)};
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  if (scale > 0) q /= ten_pow;
  if (scale < 0) q *= ten_pow;
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational q;
  try {
    q = Rational(Integer(std::string(text.substr(0, slash))),
                 Integer(std::string(text.substr(slash + 1))));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational: " + std::string(text));
  }
  if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) { return q.get_str(); }

Rational exact_rational(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational expansion");
  Rational q(v);  // mpq_set_d is exact
  return q;
}

double round_to_mantissa(double v, int bits) {
  if (bits >= 53 || v == 0.0 || !std::isfinite(v)) return v;
  int e = 0;
  const double m = std::frexp(v, &e);  // v = m * 2^e, 0.5 <= |m| < 1
  return std::ldexp(std::nearbyint(std::ldexp(m, bits)), e - bits);
}

}  // namespace growthbound
