#pragma once

#include <cstdint>

#include "rnorm/operator.hpp"

namespace rnorm {

/// Squared-distance estimates, one per pair in input order.
struct DistanceReport {
  Vector estimates;
  double total = 0.0;
  std::uint64_t queries_forward = 0;  // on the data operator
  std::uint64_t queries_transpose = 0;
  Index m_s = 0;
  Index m_g = 0;
  Index rank_used = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

/// Adaptive estimation of ||a_i - a_j||^2 for the rows of a t x d data
/// operator A over `pairs`.
///
/// The range sketch is S~ = A^T (B^T (B (A S))) with the incidence matrix B
/// applied implicitly; the basis Q and the blocks A Q, A G - (A Q)(Q^T G) are
/// t x m and are differenced per pair afterwards. Draws S and G exactly as
/// estimate_rownorms_adaptive does, so the result matches that estimator on
/// compose_incidence(A, pairs) up to rounding.
DistanceReport estimate_distances_adaptive(const QueryableOperator& data, const PairSet& pairs, Index m_s,
                                           Index m_g, std::uint64_t seed);

/// JL baseline: ||(e_i - e_j)^T A G||^2 with G of width `width`, N(0, 1/width).
DistanceReport estimate_distances_jl(const QueryableOperator& data, const PairSet& pairs, Index width,
                                     std::uint64_t seed);

/// Exact squared distances between rows of a dense matrix.
Vector exact_distances(const Eigen::Ref<const Matrix>& a, const PairSet& pairs);

}  // namespace rnorm
