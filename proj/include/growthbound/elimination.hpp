#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "growthbound/matrix.hpp"
#include "growthbound/scalar.hpp"

namespace growthbound {

enum class PivotStrategy { Complete, Partial, None };

std::string_view to_string(PivotStrategy s);
PivotStrategy parse_pivot_strategy(std::string_view token);

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Working precision for the binary64 modes. Precisions below 53 bits are
/// emulated by rounding after every arithmetic operation.
struct FloatConfig {
  int mantissa_bits = 53;

  void validate() const {
    if (mantissa_bits < 2 || mantissa_bits > 53)
      throw std::invalid_argument("mantissa bits must lie in [2, 53]");
  }
};

namespace detail {

template <class T>
struct Rounder {
  int bits = 53;
  template <class U>
  T operator()(U&& v) const {
    return T(std::forward<U>(v));
  }
};

template <>
struct Rounder<double> {
  int bits = 53;
  double operator()(double v) const { return round_to_mantissa(v, bits); }
};

template <>
struct Rounder<std::complex<double>> {
  int bits = 53;
  std::complex<double> operator()(std::complex<double> v) const {
    return {round_to_mantissa(v.real(), bits), round_to_mantissa(v.imag(), bits)};
  }
};

}  // namespace detail

/// Record of one Gaussian elimination run.
///
/// Step s = 0..n-1 produces the k = n - s iterate A^(k); per-step vectors are
/// stored in step order, so index 0 holds p_n and index n-1 holds p_1. Use
/// pivot(k) / max_entry(k) for 1-based k access.
template <class T>
struct EliminationTrace {
  using Magnitude = typename ScalarTraits<T>::Magnitude;

  std::size_t n = 0;
  PivotStrategy strategy = PivotStrategy::Complete;
  std::vector<T> pivot_values;
  std::vector<Magnitude> pivot_magnitudes;
  std::vector<Magnitude> max_entries;
  // Permuted matrix entry (i, j) is input(row_perm[i], col_perm[j]).
  std::vector<std::size_t> row_perm;
  std::vector<std::size_t> col_perm;
  Matrix<T> lower;
  Matrix<T> upper;

  const Magnitude& pivot(std::size_t k) const { return pivot_magnitudes.at(n - k); }
  const Magnitude& max_entry(std::size_t k) const { return max_entries.at(n - k); }
  const T& pivot_value(std::size_t k) const { return pivot_values.at(n - k); }

  /// Pivot magnitudes as doubles ordered p_1, ..., p_n (moduli, never squared).
  std::vector<double> pivots_ascending() const {
    std::vector<double> out(n);
    for (std::size_t k = 1; k <= n; ++k) out[k - 1] = ScalarTraits<T>::to_double(pivot(k));
    return out;
  }
};

template <class T>
EliminationTrace<T> eliminate(const Matrix<T>& a, PivotStrategy strategy, FloatConfig cfg = {}) {
  using Tr = ScalarTraits<T>;
  using Magnitude = typename Tr::Magnitude;
  if (!a.square()) throw DimensionMismatch("elimination needs a square matrix");
  if (a.rows() == 0) throw DimensionMismatch("elimination needs a non-empty matrix");
  cfg.validate();
  const detail::Rounder<T> fl{cfg.mantissa_bits};

  const std::size_t n = a.rows();
  Matrix<T> w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = fl(a(i, j));

  EliminationTrace<T> trace;
  trace.n = n;
  trace.strategy = strategy;
  trace.row_perm.resize(n);
  trace.col_perm.resize(n);
  std::iota(trace.row_perm.begin(), trace.row_perm.end(), std::size_t{0});
  std::iota(trace.col_perm.begin(), trace.col_perm.end(), std::size_t{0});

  for (std::size_t s = 0; s < n; ++s) {
    // Max over the current iterate; under complete pivoting the first
    // row-major maximiser is also the pivot.
    Magnitude best(0);
    std::size_t bi = s;
    std::size_t bj = s;
    for (std::size_t i = s; i < n; ++i)
      for (std::size_t j = s; j < n; ++j) {
        Magnitude m = Tr::magnitude(w(i, j));
        if (m > best) {
          best = std::move(m);
          bi = i;
          bj = j;
        }
      }
    trace.max_entries.push_back(best);

    std::size_t pi = s;
    std::size_t pj = s;
    if (strategy == PivotStrategy::Complete) {
      pi = bi;
      pj = bj;
    } else if (strategy == PivotStrategy::Partial) {
      Magnitude col_best = Tr::magnitude(w(s, s));
      for (std::size_t i = s + 1; i < n; ++i) {
        Magnitude m = Tr::magnitude(w(i, s));
        if (m > col_best) {
          col_best = std::move(m);
          pi = i;
        }
      }
    }
    if (Tr::is_zero(w(pi, pj)))
      throw SingularMatrixError("zero pivot at elimination step " + std::to_string(s + 1));

    if (pi != s) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(s, j), w(pi, j));
      std::swap(trace.row_perm[s], trace.row_perm[pi]);
    }
    if (pj != s) {
      for (std::size_t i = 0; i < n; ++i) std::swap(w(i, s), w(i, pj));
      std::swap(trace.col_perm[s], trace.col_perm[pj]);
    }

    const T pivot = w(s, s);
    trace.pivot_values.push_back(pivot);
    trace.pivot_magnitudes.push_back(Tr::magnitude(pivot));

    for (std::size_t i = s + 1; i < n; ++i) {
      if (Tr::is_zero(w(i, s))) continue;
      const T l = fl(w(i, s) / pivot);
      w(i, s) = l;
      for (std::size_t j = s + 1; j < n; ++j) w(i, j) = fl(w(i, j) - fl(l * w(s, j)));
    }
  }

  trace.lower = Matrix<T>(n, n);
  trace.upper = Matrix<T>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    trace.lower(i, i) = T(1);
    for (std::size_t j = 0; j < i; ++j) trace.lower(i, j) = w(i, j);
    for (std::size_t j = i; j < n; ++j) trace.upper(i, j) = w(i, j);
  }
  return trace;
}

/// max_k ||A^(k)||_max / ||A||_max in the trace's magnitude ordering. For
/// rational-complex traces this is the squared growth factor.
template <class T>
typename ScalarTraits<T>::Magnitude growth_factor(const EliminationTrace<T>& trace) {
  if (trace.max_entries.empty()) throw std::invalid_argument("empty elimination trace");
  typename ScalarTraits<T>::Magnitude best = trace.max_entries.front();
  for (const auto& m : trace.max_entries)
    if (m > best) best = m;
  return best / trace.max_entries.front();
}

/// Growth factor as a double modulus ratio for every scalar mode.
template <class T>
double growth_factor_value(const EliminationTrace<T>& trace) {
  const auto g = growth_factor(trace);
  if constexpr (ScalarTraits<T>::kSquaredMagnitude) {
    return std::sqrt(g.get_d());
  } else if constexpr (ScalarTraits<T>::kExact) {
    return g.get_d();
  } else {
    return g;
  }
}

/// The k x k iterate A^(k) of the permuted input, recomputed as the product of
/// the trailing blocks of L and U (the Schur complement of the leading block).
template <class T>
Matrix<T> iterate(const EliminationTrace<T>& trace, std::size_t k) {
  if (k < 1 || k > trace.n) throw std::out_of_range("iterate index must lie in [1, n]");
  const std::size_t start = trace.n - k;
  return trace.lower.block(start, start, k, k) * trace.upper.block(start, start, k, k);
}

/// P_r A P_c for the trace's permutations.
template <class T>
Matrix<T> permuted_input(const EliminationTrace<T>& trace, const Matrix<T>& a) {
  return a.permuted(trace.row_perm, trace.col_perm);
}

/// Unit-diagonal, -1 strictly below, +1 in the last column, 0 elsewhere.
template <class T = Rational>
Matrix<T> wilkinson_matrix(std::size_t n) {
  if (n == 0) throw std::invalid_argument("wilkinson matrix needs n >= 1");
  Matrix<T> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i > j) m(i, j) = T(-1);
      else if (i == j || j == n - 1) m(i, j) = T(1);
    }
  return m;
}

/// LU-factorises under `strategy` at the configured precision, then forward and
/// back substitutes. Exact in the rational modes.
template <class T>
std::vector<T> solve_linear_system(const Matrix<T>& a, const std::vector<T>& b, PivotStrategy strategy,
                                   FloatConfig cfg = {}) {
  if (b.size() != a.rows()) throw DimensionMismatch("right-hand side length differs from matrix size");
  const auto trace = eliminate(a, strategy, cfg);
  const detail::Rounder<T> fl{cfg.mantissa_bits};
  const std::size_t n = trace.n;

  std::vector<T> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    T acc = fl(b[trace.row_perm[i]]);
    for (std::size_t j = 0; j < i; ++j) acc = fl(acc - fl(trace.lower(i, j) * z[j]));
    z[i] = acc;
  }
  std::vector<T> w(n);
  for (std::size_t ii = n; ii-- > 0;) {
    T acc = z[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc = fl(acc - fl(trace.upper(ii, j) * w[j]));
    w[ii] = fl(acc / trace.upper(ii, ii));
  }
  std::vector<T> x(n);
  for (std::size_t j = 0; j < n; ++j) x[trace.col_perm[j]] = w[j];
  return x;
}

}  // namespace growthbound
