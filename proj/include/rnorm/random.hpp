#pragma once

#include <array>
#include <cstdint>

#include "rnorm/operator.hpp"

namespace rnorm {

/// Stream ids used by the estimators. Streams under one seed are independent.
namespace streams {
inline constexpr std::uint64_t kRangeSketch = 0;  // S
inline constexpr std::uint64_t kResidualProbe = 1;  // G, and the JL baseline
inline constexpr std::uint64_t kEmbedding = 2;  // Pi_1 for leverage scores
inline constexpr std::uint64_t kRotation = 3;  // random orthogonal factor of synthetic matrices
}  // namespace streams

/// xoshiro256** seeded from (seed, stream) through splitmix64.
///
/// Normal variates use the Box-Muller transform on 53-bit uniforms in (0,1);
/// both outputs of each transform are consumed. The integer stream is
/// platform independent. Normals are bit-identical wherever std::log,
/// std::sqrt, std::cos and std::sin agree.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() noexcept;
  /// Uniform in the open interval (0, 1).
  double next_uniform() noexcept;
  /// Standard normal N(0, 1).
  double next_normal() noexcept;

  /// Fill column-major with i.i.d. N(0, scale^2) entries.
  void fill(Eigen::Ref<Matrix> out, double scale);

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix with i.i.d. entries of standard deviation `scale`.
/// Deterministic in (rows, cols, seed, stream, scale); for fixed rows the
/// first k columns do not depend on cols.
Matrix gaussian_block(Index rows, Index cols, std::uint64_t seed, std::uint64_t stream, double scale = 1.0);

}  // namespace rnorm
