#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <string_view>

namespace growthbound {

using Rational = mpq_class;
using Integer = mpz_class;

/// Gaussian rational: a pair of exact rationals.
struct RationalComplex {
  Rational re;
  Rational im;

  RationalComplex() = default;
  RationalComplex(Rational r) : re(std::move(r)) {}  // NOLINT(implicit)
  RationalComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  RationalComplex(long v) : re(v) {}  // NOLINT(implicit)
  RationalComplex(int v) : re(v) {}   // NOLINT(implicit)

  RationalComplex conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

  RationalComplex& operator+=(const RationalComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  RationalComplex& operator-=(const RationalComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  RationalComplex& operator*=(const RationalComplex& o) {
    Rational r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  RationalComplex& operator/=(const RationalComplex& o) {
    const Rational d = o.norm2();
    Rational r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }

  friend RationalComplex operator+(RationalComplex a, const RationalComplex& b) { return a += b; }
  friend RationalComplex operator-(RationalComplex a, const RationalComplex& b) { return a -= b; }
  friend RationalComplex operator*(RationalComplex a, const RationalComplex& b) { return a *= b; }
  friend RationalComplex operator/(RationalComplex a, const RationalComplex& b) { return a /= b; }
  friend RationalComplex operator-(const RationalComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const RationalComplex& a, const RationalComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend std::ostream& operator<<(std::ostream& os, const RationalComplex& z) {
    return os << z.re << ',' << z.im;
  }
};

enum class ScalarMode { RationalReal, RationalComplex, Binary64Real, Binary64Complex };

std::string_view to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view token);

/// Per-scalar behaviour used by the elimination engine.
///
/// `Magnitude` is the ordered type pivots are compared in. For the
/// rational-complex mode it is the squared modulus so comparisons stay exact;
/// `kSquaredMagnitude` flags that case.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  using Magnitude = Rational;
  static constexpr bool kExact = true;
  static constexpr bool kSquaredMagnitude = false;
  static constexpr ScalarMode kMode = ScalarMode::RationalReal;
  static Magnitude magnitude(const Rational& x) { return abs(x); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static double to_double(const Magnitude& m) { return m.get_d(); }
  static std::complex<double> to_complex(const Rational& x) { return {x.get_d(), 0.0}; }
};

template <>
struct ScalarTraits<RationalComplex> {
  using Magnitude = Rational;
  static constexpr bool kExact = true;
  static constexpr bool kSquaredMagnitude = true;
  static constexpr ScalarMode kMode = ScalarMode::RationalComplex;
  static Magnitude magnitude(const RationalComplex& x) { return x.norm2(); }
  static bool is_zero(const RationalComplex& x) { return x.is_zero(); }
  static double to_double(const Magnitude& m) { return std::sqrt(m.get_d()); }
  static std::complex<double> to_complex(const RationalComplex& x) {
    return {x.re.get_d(), x.im.get_d()};
  }
};

template <>
struct ScalarTraits<double> {
  using Magnitude = double;
  static constexpr bool kExact = false;
  static constexpr bool kSquaredMagnitude = false;
  static constexpr ScalarMode kMode = ScalarMode::Binary64Real;
  static Magnitude magnitude(double x) { return std::fabs(x); }
  static bool is_zero(double x) { return x == 0.0; }
  static double to_double(Magnitude m) { return m; }
  static std::complex<double> to_complex(double x) { return {x, 0.0}; }
};

template <>
struct ScalarTraits<std::complex<double>> {
  using Magnitude = double;
  static constexpr bool kExact = false;
  static constexpr bool kSquaredMagnitude = false;
  static constexpr ScalarMode kMode = ScalarMode::Binary64Complex;
  static Magnitude magnitude(const std::complex<double>& x) { return std::abs(x); }
  static bool is_zero(const std::complex<double>& x) { return x == std::complex<double>{}; }
  static double to_double(Magnitude m) { return m; }
  static std::complex<double> to_complex(const std::complex<double>& x) { return x; }
};

template <class T>
concept ExactScalar = ScalarTraits<T>::kExact;

/// Parses "p/q", "p", or a decimal literal such as "-0.25" into an exact rational.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& q);

/// Exact binary expansion of a finite double.
Rational exact_rational(double v);

/// Rounds `v` to `bits` significant bits (round-half-even). bits >= 53 is identity.
double round_to_mantissa(double v, int bits);

}  // namespace growthbound
