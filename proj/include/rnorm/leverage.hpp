#pragma once

#include <cstdint>

#include "rnorm/operator.hpp"

namespace rnorm {

struct LeverageReport {
  Vector scores;  // theta~_i >= 0
  double total = 0.0;
  Index r1 = 0;  // rows of the subspace embedding
  double epsilon1 = 0.0;  // nominal embedding distortion sqrt(d / r1)
  Index m_s = 0;
  Index m_g = 0;
  Index rank_used = 0;
  std::uint64_t seed = 0;
  // Queries on A, including the r1 transpose queries that form Pi_1 A.
  std::uint64_t queries_forward = 0;
  std::uint64_t queries_transpose = 0;
  double wall_time_s = 0.0;
};

/// R from a QR factorisation of Pi_1 A, where Pi_1 is an r1 x n Gaussian
/// embedding with N(0, 1/r1) entries drawn from `seed`. A R^{-1} then has
/// nearly orthonormal columns. Pi_1 A is formed as (A^T Pi_1^T)^T, i.e. r1
/// transpose queries.
///
/// Throws ParameterError if n < d or r1 < d, and FactorError if R is
/// numerically singular (A must have full column rank).
TriangularFactor build_orthogonalizer(const QueryableOperator& a, Index r1, std::uint64_t seed);

/// Leverage scores of a tall matrix: the adaptive row-norm estimator run on
/// the composed operator A R^{-1}. Requires m_s, m_g >= 1 and m_s < d.
LeverageReport estimate_leverage_adaptive(OperatorPtr a, Index r1, Index m_s, Index m_g, std::uint64_t seed);

/// Default embedding size max(4d, d + 8 ceil(log(1/delta))), delta = 0.01.
Index default_embedding_rows(Index d);

/// theta_i = ||e_i^T U||^2 for an orthonormal basis U of range(A), taken from
/// a column-pivoted QR. Sums to rank(A).
Vector exact_leverage(const Eigen::Ref<const Matrix>& a);

}  // namespace rnorm
