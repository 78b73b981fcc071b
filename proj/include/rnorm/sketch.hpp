#pragma once

#include <cstdint>

#include "rnorm/operator.hpp"

namespace rnorm {

/// The two random matrices of the adaptive estimators.
///
/// S (d x m_s) finds the dominant range and has unscaled N(0,1) entries; its
/// scale cannot change range(A^T A S). G (d x m_g) probes the residual and
/// has entries with standard deviation 1/sqrt(m_g), so that squared row
/// norms of A(I - QQ^T)G are unbiased for those of A(I - QQ^T).
struct SketchPair {
  Index m_s = 1;
  Index m_g = 1;
  std::uint64_t seed = 0;

  /// Throws ParameterError unless both widths are at least 1.
  void validate() const;
  /// m_g <= m_s, the regime the error bounds are stated for.
  bool probe_within_range() const noexcept { return m_g <= m_s; }

  Matrix range_sketch(Index d) const;
  Matrix residual_probe(Index d) const;
};

struct OrthonormalBasis {
  Matrix q;  // d x rank_used, orthonormal columns
  Index rank_used = 0;
};

/// Relative threshold on the pivoted-QR diagonal below which columns are
/// treated as numerically dependent and dropped.
inline constexpr double kRankTolerance = 1e-12;

/// Orthonormal basis for the numerical range of M via column-pivoted
/// Householder QR. Trailing columns whose |R_kk| < kRankTolerance * ||M||_F
/// are dropped; a zero M gives rank_used == 0.
OrthonormalBasis orthonormalize(const Eigen::Ref<const Matrix>& M);

/// Monte-Carlo estimate of E(||Gx||^2 - 1)^2 for a unit vector x and an
/// r x dim(x) matrix G with N(0, 1/r) entries. x is normalised internally.
/// The exact value is 2/r. Requires r >= 1 and trials >= 10^4.
double check_jl_moment(Index r, Index trials, std::uint64_t seed, const Eigen::Ref<const Vector>& x);
/// Same with x = e_1 in R^4.
double check_jl_moment(Index r, Index trials, std::uint64_t seed);

/// max_i | ||G x_i||^2 - ||x_i||^2 | / ||x_i||^2 over the columns x_i of X.
/// Zero columns are skipped; returns 0 if every column is zero.
double jlt_distortion_profile(const Eigen::Ref<const Matrix>& G, const Eigen::Ref<const Matrix>& X);

/// Distortion bound sqrt(8 log(2n/delta) / r) for n vectors.
double jlt_distortion_bound(Index n, double delta, Index r);
/// Smallest integer r with r > 32 log(2n/delta).
Index jlt_min_width(Index n, double delta);

}  // namespace rnorm
