#pragma once

#include <cstdint>

#include "rnorm/operator.hpp"
#include "rnorm/sketch.hpp"

namespace rnorm {

/// Per-row squared-norm estimates with provenance.
struct EstimateReport {
  Vector estimates;  // one non-negative squared-norm estimate per row
  double total = 0.0;  // sequential sum of estimates
  std::uint64_t queries_forward = 0;
  std::uint64_t queries_transpose = 0;
  Index m_s = 0;  // 0 for the JL baseline
  Index m_g = 0;  // probe width (JL: projection width)
  Index rank_used = 0;  // columns of Q actually applied
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  std::uint64_t queries() const noexcept { return queries_forward + queries_transpose; }
};

/// Adaptive row-norm estimation.
///
/// Draws S and G from `seed`, forms B = A^T (A S), takes an orthonormal
/// basis Q of range(B), then returns
///
///   x_i = ||e_i^T A Q||^2 + ||e_i^T (A G - (A Q)(Q^T G))||^2.
///
/// The captured part is exact; only the residual A(I - QQ^T) is sampled.
/// Queries: m_s + rank_used + m_g forward, m_s transpose.
/// Requires m_s, m_g >= 1 and m_s < op.cols().
EstimateReport estimate_rownorms_adaptive(const QueryableOperator& op, Index m_s, Index m_g, std::uint64_t seed);

/// Gaussian JL baseline: x_i = ||e_i^T A G||^2 with G of width `width` and
/// N(0, 1/width) entries. Queries: `width` forward.
EstimateReport estimate_rownorms_jl(const QueryableOperator& op, Index width, std::uint64_t seed);

/// The first pass of the adaptive estimator on its own: an orthonormal
/// basis of range(A^T (A S)) with S drawn from (seed, m_s). Costs m_s
/// forward and m_s transpose queries.
OrthonormalBasis adaptive_range_basis(const QueryableOperator& op, Index m_s, std::uint64_t seed);

/// Squared row norms of a dense matrix.
Vector exact_rownorms(const Eigen::Ref<const Matrix>& a);

/// ||e_i^T A (I - QQ^T)||^2 for every row. Materialises A.
Vector residual_profile(const QueryableOperator& op, const Eigen::Ref<const Matrix>& q);

/// The residual half of the adaptive estimator for a fixed Q:
/// ||e_i^T (A G - (A Q)(Q^T G))||^2 with G drawn from (seed, m_g) exactly as
/// estimate_rownorms_adaptive draws it.
Vector probe_residual(const QueryableOperator& op, const Eigen::Ref<const Matrix>& q, Index m_g,
                      std::uint64_t seed);

/// Budget split used when only a total query budget is given: m_s = m_g =
/// floor(budget / 4). Throws ParameterError if that is zero.
SketchPair split_budget(Index budget, std::uint64_t seed);

}  // namespace rnorm
