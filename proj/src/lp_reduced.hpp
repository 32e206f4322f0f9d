#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "growthbound/lp_model.hpp"

namespace growthbound::detail {

// A row over the gauge-reduced cumulative variables Q(2)..Q(n), stored at
// indices 0..n-2. Q(1) is pinned to 0.
struct ReducedRow {
  int nnz = 0;
  std::array<int, 4> idx{};
  std::array<std::int64_t, 4> val{};

  template <class V>
  double dot(const V& x) const {
    double acc = 0.0;
    for (int t = 0; t < nnz; ++t) acc += static_cast<double>(val[t]) * x[idx[t]];
    return acc;
  }
};

struct ReducedLP {
  int n = 1;
  int m = 0;  // n - 1
  std::vector<ReducedRow> rows;
  std::vector<Rational> objective;  // over the reduced variables
  std::vector<double> objective_float;
  std::vector<double> rhs_float;
  std::vector<int> wilkinson_rows;  // row index of (k, 0) at position k - 2
  bool shift_invariant = true;      // objective annihilates the gauge direction
};

ReducedLP reduce(const LPInstance& lp);

// Converts reduced cumulative values Q(2..n) into the instance's variables.
template <class T>
std::vector<T> expand_primal(const LPInstance& lp, std::span<const T> reduced) {
  const int n = lp.n;
  std::vector<T> cum(n, T(0));
  for (int k = 2; k <= n; ++k) cum[k - 1] = reduced[k - 2];
  if (lp.form == LpForm::CumulativeForm) return cum;
  std::vector<T> q(n, T(0));
  for (int k = 2; k <= n; ++k) q[k - 1] = cum[k - 1] - cum[k - 2];
  return q;
}

// Suffix sums turn a vector over Q coordinates into the matching q-coordinate
// vector (a^q_j = sum_{i >= j} a^Q_i).
std::vector<Rational> cumulative_to_q(std::span<const Rational> v);

}  // namespace growthbound::detail
