#include "rnorm/leverage.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"
#include "rnorm/rownorm.hpp"
#include "rnorm/sketch.hpp"

namespace rnorm {

TriangularFactor build_orthogonalizer(const QueryableOperator& a, Index r1, std::uint64_t seed) {
  const Index n = a.rows();
  const Index d = a.cols();
  if (n < d) throw ParameterError("leverage scores need a tall matrix (rows >= cols)");
  if (r1 < d) throw ParameterError("embedding rows r1=" + std::to_string(r1) + " must be at least d=" + std::to_string(d));

  const Matrix embedding_t =
      gaussian_block(n, r1, seed, streams::kEmbedding, 1.0 / std::sqrt(static_cast<double>(r1)));
  const Matrix sketched = a.apply_transpose(embedding_t).transpose();  // Pi_1 A, r1 x d
  Eigen::HouseholderQR<Matrix> qr(sketched);
  TriangularFactor r(qr.matrixQR().topRows(d));
  if (r.singular()) {
    throw FactorError("sketched factor R is numerically singular; the input must have full column rank "
                      "(remove dependent columns first)");
  }
  return r;
}

LeverageReport estimate_leverage_adaptive(OperatorPtr a, Index r1, Index m_s, Index m_g, std::uint64_t seed) {
  if (!a) throw ParameterError("estimate_leverage_adaptive: null operator");
  const auto start = std::chrono::steady_clock::now();
  if (m_s >= a->cols()) throw ParameterError("range width m_s must be below the column count");

  MeteredView embed_view(*a);
  TriangularFactor r = build_orthogonalizer(embed_view, r1, seed);
  const auto orthonormalized = compose_right_solve(a, std::move(r));
  const EstimateReport rows = estimate_rownorms_adaptive(*orthonormalized, m_s, m_g, seed);

  LeverageReport report;
  report.scores = rows.estimates;
  report.total = rows.total;
  report.r1 = r1;
  report.epsilon1 = std::sqrt(static_cast<double>(a->cols()) / static_cast<double>(r1));
  report.m_s = m_s;
  report.m_g = m_g;
  report.rank_used = rows.rank_used;
  report.seed = seed;
  report.queries_forward = embed_view.meter().forward() + rows.queries_forward;
  report.queries_transpose = embed_view.meter().transpose() + rows.queries_transpose;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Index default_embedding_rows(Index d) {
  const auto log_term = static_cast<Index>(std::ceil(std::log(1.0 / 0.01)));
  return std::max<Index>(4 * d, d + 8 * log_term);
}

Vector exact_leverage(const Eigen::Ref<const Matrix>& a) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const auto& r = qr.matrixQR();
  const Index steps = std::min(a.rows(), a.cols());
  const double largest = steps > 0 ? std::abs(r(0, 0)) : 0.0;
  Index rank = 0;
  while (rank < steps && largest > 0.0 && std::abs(r(rank, rank)) > 1e-12 * largest) ++rank;
  if (rank == 0) return Vector::Zero(a.rows());
  const Matrix u = qr.householderQ() * Matrix::Identity(a.rows(), rank);
  return u.rowwise().squaredNorm();
}

}  // namespace rnorm
