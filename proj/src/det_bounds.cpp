#include "growthbound/det_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace growthbound {

namespace {

inline double cj(double v) { return v; }
inline std::complex<double> cj(std::complex<double> v) { return std::conj(v); }
inline double abs2(double v) { return v * v; }
inline double abs2(std::complex<double> v) { return std::norm(v); }

template <class S>
SingularSpectrum jacobi_singular_values(const Matrix<S>& a) {
  if (!a.square()) throw DimensionMismatch("singular values are computed for square matrices");
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  std::vector<std::vector<S>> col(n, std::vector<S>(m));
  double frob2 = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      col[j][i] = a(i, j);
      frob2 += abs2(a(i, j));
    }

  SingularSpectrum out;
  out.values.assign(n, 0.0);
  if (frob2 == 0.0) return out;

  const double rel_tol = std::max(1e-15, static_cast<double>(n) * std::numeric_limits<double>::epsilon());
  const double frob = std::sqrt(frob2);
  bool converged = false;
  double residual = 0.0;
  for (int sweep = 1; sweep <= kMaxJacobiSweeps && !converged; ++sweep) {
    out.sweeps = sweep;
    double off = 0.0;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto& ap = col[p];
        auto& aq = col[q];
        double alpha = 0.0;
        double beta = 0.0;
        S gamma{};
        for (std::size_t k = 0; k < m; ++k) {
          alpha += abs2(ap[k]);
          beta += abs2(aq[k]);
          gamma += cj(ap[k]) * aq[k];
        }
        const double g = std::abs(gamma);
        off += g * g;
        if (g == 0.0 || g <= rel_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const S phase = gamma / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const S u = ap[k];
          const S v = aq[k] * cj(phase);
          ap[k] = c * u - s * v;
          aq[k] = (s * u + c * v) * phase;
        }
      }
    }
    residual = std::sqrt(off) / frob;
    converged = !rotated;
  }
  out.residual = residual;
  if (!converged && residual >= 1e-13 * frob)
    throw NonConvergenceError("Jacobi iteration did not converge in " + std::to_string(kMaxJacobiSweeps) +
                                  " sweeps",
                              residual);

  for (std::size_t j = 0; j < n; ++j) {
    double s2 = 0.0;
    for (const auto& v : col[j]) s2 += abs2(v);
    out.values[j] = std::sqrt(s2);
  }
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  return out;
}

template <class T>
Rational exact_column_norms2(const Matrix<T>& a) {
  Rational prod(1);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Rational s(0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if constexpr (std::is_same_v<T, Rational>) {
        s += a(i, j) * a(i, j);
      } else {
        s += a(i, j).norm2();
      }
    }
    prod *= s;
  }
  return prod;
}

template <class T>
double column_norm_product(const Matrix<T>& a) {
  double prod = 1.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += abs2(a(i, j));
    prod *= std::sqrt(s);
  }
  return prod;
}

template <class T>
std::size_t rational_rank(Matrix<T> w) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < w.cols() && rank < w.rows(); ++c) {
    std::size_t piv = rank;
    while (piv < w.rows() && ScalarTraits<T>::is_zero(w(piv, c))) ++piv;
    if (piv == w.rows()) continue;
    for (std::size_t j = 0; j < w.cols(); ++j) std::swap(w(rank, j), w(piv, j));
    for (std::size_t i = rank + 1; i < w.rows(); ++i) {
      if (ScalarTraits<T>::is_zero(w(i, c))) continue;
      const T f = w(i, c) / w(rank, c);
      for (std::size_t j = c; j < w.cols(); ++j) w(i, j) -= f * w(rank, j);
    }
    ++rank;
  }
  return rank;
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

SingularSpectrum singular_values(const Matrix<double>& a) { return jacobi_singular_values(a); }
SingularSpectrum singular_values(const Matrix<std::complex<double>>& a) { return jacobi_singular_values(a); }
SingularSpectrum singular_values(const Matrix<Rational>& a) { return jacobi_singular_values(to_double(a)); }
SingularSpectrum singular_values(const Matrix<RationalComplex>& a) {
  return jacobi_singular_values(to_complex_double(a));
}

double condition_number_2(const Matrix<double>& a) {
  const auto s = singular_values(a);
  if (s.values.back() == 0.0) return std::numeric_limits<double>::infinity();
  return s.values.front() / s.values.back();
}

double hadamard_bound(const Matrix<double>& a) { return column_norm_product(a); }
double hadamard_bound(const Matrix<std::complex<double>>& a) { return column_norm_product(a); }
double hadamard_bound(const Matrix<Rational>& a) { return column_norm_product(to_double(a)); }
Rational hadamard_bound_squared(const Matrix<Rational>& a) { return exact_column_norms2(a); }
Rational hadamard_bound_squared(const Matrix<RationalComplex>& a) { return exact_column_norms2(a); }

double sv_det_bound(const SingularSpectrum& a, const SingularSpectrum& b) {
  const std::size_t n = a.values.size();
  if (b.values.size() != n) throw DimensionMismatch("spectra of different lengths");
  double prod = 1.0;
  for (std::size_t i = 0; i < n; ++i) prod *= a.values[i] + b.values[n - 1 - i];
  return prod;
}

double sv_det_bound(const Matrix<std::complex<double>>& a, const Matrix<std::complex<double>>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || !a.square())
    throw DimensionMismatch("singular-value bound needs two square matrices of one shape");
  return sv_det_bound(singular_values(a), singular_values(b));
}

double log_lowrank_hadamard_rhs(std::size_t n, std::size_t l, double c) {
  if (n == 0 || l > n) throw std::out_of_range("low-rank bound needs 0 <= l <= n, n >= 1");
  if (!(c >= 0.0)) throw std::invalid_argument("low-rank bound needs C >= 0");
  const double nn = static_cast<double>(n);
  const double nl = static_cast<double>(n - l);
  const double ll = static_cast<double>(l);
  return xlogx(nn) - 0.5 * xlogx(nl) - 0.5 * xlogx(ll) + ll * std::log1p(c);
}

double lowrank_hadamard_rhs(std::size_t n, std::size_t l, double c) {
  return std::exp(log_lowrank_hadamard_rhs(n, l, c));
}

double log_longrange_pivot_rhs(std::size_t k, std::size_t l, double p_k, double p_k_plus_l) {
  if (l == 0 || l >= k) throw std::out_of_range("long-range bound needs 0 < l < k");
  if (!(p_k > 0.0) || !(p_k_plus_l > 0.0)) throw std::invalid_argument("pivots must be positive");
  const double kk = static_cast<double>(k);
  const double ll = static_cast<double>(l);
  return kk * std::log(p_k_plus_l) + xlogx(kk) - 0.5 * xlogx(kk - ll) - 0.5 * xlogx(ll) +
         ll * std::log1p(p_k / p_k_plus_l);
}

double longrange_pivot_rhs(std::size_t k, std::size_t l, double p_k, double p_k_plus_l) {
  return std::exp(log_longrange_pivot_rhs(k, l, p_k, p_k_plus_l));
}

Rational real_inner(const Matrix<Rational>& x, const Matrix<Rational>& y) {
  Rational acc(0);
  for (std::size_t i = 0; i < x.data().size(); ++i) acc += x.data()[i] * y.data()[i];
  return acc;
}

Rational real_inner(const Matrix<RationalComplex>& x, const Matrix<RationalComplex>& y) {
  Rational acc(0);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const auto& a = x.data()[i];
    const auto& b = y.data()[i];
    acc += a.re * b.re + a.im * b.im;
  }
  return acc;
}

double real_inner(const Matrix<double>& x, const Matrix<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) acc += x.data()[i] * y.data()[i];
  return acc;
}

double real_inner(const Matrix<std::complex<double>>& x, const Matrix<std::complex<double>>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) acc += (x.data()[i] * std::conj(y.data()[i])).real();
  return acc;
}

std::size_t exact_rank(const Matrix<Rational>& a) { return rational_rank(a); }
std::size_t exact_rank(const Matrix<RationalComplex>& a) { return rational_rank(a); }

std::size_t numerical_rank(const Matrix<double>& a, double rel_tol) {
  const auto s = singular_values(a);
  if (s.values.empty() || s.values.front() == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(s.values.begin(), s.values.end(),
                                                [&](double v) { return v > rel_tol * s.values.front(); }));
}

UnitIntervalMax maximize_on_unit_interval(const std::function<double(double)>& f, int grid_points) {
  UnitIntervalMax best{0.0, -std::numeric_limits<double>::infinity()};
  int best_i = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double t = (i + 0.5) / grid_points;
    const double v = f(t);
    if (v > best.value) {
      best = {t, v};
      best_i = i;
    }
  }
  double lo = std::max(best_i - 1, 0) / static_cast<double>(grid_points);
  double hi = std::min(best_i + 2, grid_points) / static_cast<double>(grid_points);
  lo = std::max(lo, 1e-300);
  hi = std::min(hi, 1.0 - 1e-16);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = f(a);
  double fb = f(b);
  while (hi - lo > 1e-13) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = f(b);
    }
  }
  const double t = 0.5 * (lo + hi);
  const double v = f(t);
  if (v > best.value) best = {t, v};
  return best;
}

double entropy_factor(double t) {
  return std::exp(-0.5 * xlogx(t) - 0.5 * xlogx(1.0 - t));
}

double two_case_factor(double t) {
  const double r = 2.0 / std::sqrt(11.0);
  return std::pow(1.0 + std::pow(r, 1.0 / (1.0 - t)), t);
}

}  // namespace growthbound
