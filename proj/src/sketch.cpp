#include "rnorm/sketch.hpp"

#include <cmath>
#include <limits>

#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"

namespace rnorm {

void SketchPair::validate() const {
  if (m_s < 1) throw ParameterError("range width m_s must be at least 1");
  if (m_g < 1) throw ParameterError("probe width m_g must be at least 1");
}

Matrix SketchPair::range_sketch(Index d) const { return gaussian_block(d, m_s, seed, streams::kRangeSketch, 1.0); }

Matrix SketchPair::residual_probe(Index d) const {
  return gaussian_block(d, m_g, seed, streams::kResidualProbe, 1.0 / std::sqrt(static_cast<double>(m_g)));
}

OrthonormalBasis orthonormalize(const Eigen::Ref<const Matrix>& M) {
  if (!M.allFinite()) throw InputError("orthonormalize: non-finite input");
  OrthonormalBasis out;
  const double norm = M.norm();
  if (M.cols() == 0 || !(norm > 0.0)) {
    out.q = Matrix(M.rows(), 0);
    return out;
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(M);
  const auto& r = qr.matrixQR();
  const Index steps = std::min(M.rows(), M.cols());
  Index rank = 0;
  // Pivoting makes |R_kk| non-increasing, so the first small entry ends the range.
  while (rank < steps && std::abs(r(rank, rank)) >= kRankTolerance * norm) ++rank;

  out.rank_used = rank;
  out.q = qr.householderQ() * Matrix::Identity(M.rows(), rank);
  return out;
}

double check_jl_moment(Index r, Index trials, std::uint64_t seed, const Eigen::Ref<const Vector>& x) {
  if (r < 1) throw ParameterError("check_jl_moment: r must be positive");
  if (trials < 10000) throw ParameterError("check_jl_moment: at least 10^4 trials required");
  const double len = x.norm();
  if (!(len > 0.0)) throw ParameterError("check_jl_moment: x must be non-zero");
  const Vector unit = x / len;

  GaussianStream rng(seed, streams::kResidualProbe);
  Matrix g(r, unit.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(r));
  double sum = 0.0;
  for (Index t = 0; t < trials; ++t) {
    rng.fill(g, scale);
    const double dev = (g * unit).squaredNorm() - 1.0;
    sum += dev * dev;
  }
  return sum / static_cast<double>(trials);
}

double check_jl_moment(Index r, Index trials, std::uint64_t seed) {
  return check_jl_moment(r, trials, seed, Vector::Unit(4, 0));
}

double jlt_distortion_profile(const Eigen::Ref<const Matrix>& G, const Eigen::Ref<const Matrix>& X) {
  if (G.cols() != X.rows()) throw DimensionError("jlt_distortion_profile: G columns differ from vector length");
  const Matrix gx = G * X;
  double worst = 0.0;
  for (Index i = 0; i < X.cols(); ++i) {
    const double len2 = X.col(i).squaredNorm();
    if (len2 == 0.0) continue;
    worst = std::max(worst, std::abs(gx.col(i).squaredNorm() - len2) / len2);
  }
  return worst;
}

double jlt_distortion_bound(Index n, double delta, Index r) {
  return std::sqrt(8.0 * std::log(2.0 * static_cast<double>(n) / delta) / static_cast<double>(r));
}

Index jlt_min_width(Index n, double delta) {
  const double threshold = 32.0 * std::log(2.0 * static_cast<double>(n) / delta);
  return static_cast<Index>(std::floor(threshold)) + 1;
}

}  // namespace rnorm
