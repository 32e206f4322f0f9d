#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "growthbound/elimination.hpp"
#include "growthbound/matrix.hpp"

namespace growthbound {

/// Singular values sigma_1 >= ... >= sigma_n >= 0 with the off-diagonal
/// residual of the final Jacobi sweep.
struct SingularSpectrum {
  std::vector<double> values;
  double residual = 0.0;
  int sweeps = 0;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

inline constexpr int kMaxJacobiSweeps = 30;

/// Cyclic one-sided Jacobi. Stops once a sweep leaves the Gram matrix with
/// off-diagonal mass below 1e-13 ||A||_F^2.
SingularSpectrum singular_values(const Matrix<double>& a);
SingularSpectrum singular_values(const Matrix<std::complex<double>>& a);
SingularSpectrum singular_values(const Matrix<Rational>& a);
SingularSpectrum singular_values(const Matrix<RationalComplex>& a);

/// sigma_max / sigma_min.
double condition_number_2(const Matrix<double>& a);

/// prod_j ||column_j||_2.
double hadamard_bound(const Matrix<double>& a);
double hadamard_bound(const Matrix<std::complex<double>>& a);
double hadamard_bound(const Matrix<Rational>& a);
/// prod_j ||column_j||_2^2, exact. Compare against det(A)^2.
Rational hadamard_bound_squared(const Matrix<Rational>& a);
Rational hadamard_bound_squared(const Matrix<RationalComplex>& a);

/// prod_i (sigma_i(A) + sigma_{n-i+1}(B)).
double sv_det_bound(const Matrix<std::complex<double>>& a, const Matrix<std::complex<double>>& b);
double sv_det_bound(const SingularSpectrum& a, const SingularSpectrum& b);

/// ln of n^n / ((n-l)^((n-l)/2) l^(l/2)) * (1+C)^l, with 0^0 = 1.
double log_lowrank_hadamard_rhs(std::size_t n, std::size_t l, double c);
double lowrank_hadamard_rhs(std::size_t n, std::size_t l, double c);

/// ln of p_{k+l}^k k^k / ((k-l)^((k-l)/2) l^(l/2)) (1 + p_k/p_{k+l})^l.
double log_longrange_pivot_rhs(std::size_t k, std::size_t l, double p_k, double p_k_plus_l);
double longrange_pivot_rhs(std::size_t k, std::size_t l, double p_k, double p_k_plus_l);

/// Real part of the Frobenius inner product <X, Y> = sum x_ij conj(y_ij).
Rational real_inner(const Matrix<Rational>& x, const Matrix<Rational>& y);
Rational real_inner(const Matrix<RationalComplex>& x, const Matrix<RationalComplex>& y);
double real_inner(const Matrix<double>& x, const Matrix<double>& y);
double real_inner(const Matrix<std::complex<double>>& x, const Matrix<std::complex<double>>& y);

std::size_t exact_rank(const Matrix<Rational>& a);
std::size_t exact_rank(const Matrix<RationalComplex>& a);
std::size_t numerical_rank(const Matrix<double>& a, double rel_tol = 1e-10);

class ZeroMatrixError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Orthogonal-projection split of X - Y:
///   small_part   = X - tau Y
///   lowrank_part = -(1 - tau) Y
/// with tau = Re<X,Y>_F / ||Y||_F^2, so small_part + lowrank_part = X - Y.
template <class T>
struct SplitPair {
  Matrix<T> small_part;
  Matrix<T> lowrank_part;
  typename ScalarTraits<T>::Magnitude tau;
  std::size_t rank_bound = 0;
};

template <class T>
SplitPair<T> split_iterate(const Matrix<T>& x, const Matrix<T>& y, std::optional<std::size_t> rank_bound = {}) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionMismatch("split needs equal shapes");
  const auto y_norm2 = frobenius_norm2(y);
  if (y_norm2 == 0) throw ZeroMatrixError("split needs a nonzero Y");
  SplitPair<T> out;
  out.tau = real_inner(x, y) / y_norm2;
  const T tau(out.tau);
  out.small_part = x - y * tau;
  out.lowrank_part = y * (tau - T(1));
  if (rank_bound) {
    out.rank_bound = *rank_bound;
  } else if constexpr (ScalarTraits<T>::kExact) {
    out.rank_bound = exact_rank(y);
  } else {
    out.rank_bound = numerical_rank(to_double(y));
  }
  return out;
}

/// The (X, Y) pair of the long-range splitting at (k, l) for an exactly
/// eliminated matrix: with N the blocks of A^(k+l) (leading block l x l),
/// X = N22 and Y = N21 N11^{-1} N12, so A^(k) = X - Y and rank Y <= l.
template <class T>
std::pair<Matrix<T>, Matrix<T>> longrange_blocks(const EliminationTrace<T>& trace, std::size_t k, std::size_t l) {
  if (l == 0 || k + l > trace.n) throw std::out_of_range("long-range split needs 0 < l and k + l <= n");
  const auto big = iterate(trace, k + l);
  const auto n11 = big.block(0, 0, l, l);
  const auto n12 = big.block(0, l, l, k);
  const auto n21 = big.block(l, 0, k, l);
  auto x = big.block(l, l, k, k);
  Matrix<T> inv_n12(l, k);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<T> col(l);
    for (std::size_t i = 0; i < l; ++i) col[i] = n12(i, j);
    const auto sol = solve_linear_system(n11, col, PivotStrategy::Partial);
    for (std::size_t i = 0; i < l; ++i) inv_n12(i, j) = sol[i];
  }
  return {std::move(x), n21 * inv_n12};
}

/// Argmax and max of a scalar function on the open unit interval, by a dense
/// grid followed by golden-section refinement around the best grid point.
struct UnitIntervalMax {
  double argmax = 0.0;
  double value = 0.0;
};
UnitIntervalMax maximize_on_unit_interval(const std::function<double(double)>& f, int grid_points = 100000);

/// (1/t)^(t/2) (1/(1-t))^((1-t)/2); maximum sqrt(2) at t = 1/2.
double entropy_factor(double t);
/// (1 + (2/sqrt(11))^(1/(1-t)))^t; maximum about 1.168.
double two_case_factor(double t);

}  // namespace growthbound
