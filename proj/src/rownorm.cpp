#include "rnorm/rownorm.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"

namespace rnorm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double sequential_sum(const Vector& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace

EstimateReport estimate_rownorms_adaptive(const QueryableOperator& op, Index m_s, Index m_g, std::uint64_t seed) {
  const auto start = Clock::now();
  const SketchPair sketch{m_s, m_g, seed};
  sketch.validate();
  const Index d = op.cols();
  if (m_s >= d) {
    throw ParameterError("range width m_s=" + std::to_string(m_s) + " must be below the column count " +
                         std::to_string(d));
  }

  MeteredView a(op);
  const OrthonormalBasis basis = adaptive_range_basis(a, m_s, seed);

  const Matrix g = sketch.residual_probe(d);
  Matrix captured(op.rows(), 0);
  Matrix residual = a.apply(g);
  if (basis.rank_used > 0) {
    captured = a.apply(basis.q);
    residual.noalias() -= captured * (basis.q.transpose() * g);
  }

  EstimateReport report;
  report.estimates = captured.rowwise().squaredNorm() + residual.rowwise().squaredNorm();
  report.total = sequential_sum(report.estimates);
  report.queries_forward = a.meter().forward();
  report.queries_transpose = a.meter().transpose();
  report.m_s = m_s;
  report.m_g = m_g;
  report.rank_used = basis.rank_used;
  report.seed = seed;
  report.wall_time_s = seconds_since(start);
  return report;
}

OrthonormalBasis adaptive_range_basis(const QueryableOperator& op, Index m_s, std::uint64_t seed) {
  if (m_s < 1) throw ParameterError("range width m_s must be at least 1");
  const Matrix s = SketchPair{m_s, 1, seed}.range_sketch(op.cols());
  return orthonormalize(op.apply_transpose(op.apply(s)));
}

EstimateReport estimate_rownorms_jl(const QueryableOperator& op, Index width, std::uint64_t seed) {
  const auto start = Clock::now();
  if (width < 1) throw ParameterError("JL width must be at least 1");
  MeteredView a(op);
  const Matrix g =
      gaussian_block(op.cols(), width, seed, streams::kResidualProbe, 1.0 / std::sqrt(static_cast<double>(width)));
  const Matrix projected = a.apply(g);

  EstimateReport report;
  report.estimates = projected.rowwise().squaredNorm();
  report.total = sequential_sum(report.estimates);
  report.queries_forward = a.meter().forward();
  report.queries_transpose = a.meter().transpose();
  report.m_g = width;
  report.seed = seed;
  report.wall_time_s = seconds_since(start);
  return report;
}

Vector exact_rownorms(const Eigen::Ref<const Matrix>& a) { return a.rowwise().squaredNorm(); }

Vector residual_profile(const QueryableOperator& op, const Eigen::Ref<const Matrix>& q) {
  if (q.rows() != op.cols()) throw DimensionError("residual_profile: Q rows differ from operator columns");
  const Matrix a = materialize(op);
  if (q.cols() == 0) return exact_rownorms(a);
  const Matrix residual = a - (a * q) * q.transpose();
  return residual.rowwise().squaredNorm();
}

Vector probe_residual(const QueryableOperator& op, const Eigen::Ref<const Matrix>& q, Index m_g,
                      std::uint64_t seed) {
  if (q.rows() != op.cols()) throw DimensionError("probe_residual: Q rows differ from operator columns");
  if (m_g < 1) throw ParameterError("probe width m_g must be at least 1");
  const SketchPair sketch{m_g, m_g, seed};
  const Matrix g = sketch.residual_probe(op.cols());
  Matrix residual = op.apply(g);
  if (q.cols() > 0) residual.noalias() -= op.apply(q) * (q.transpose() * g);
  return residual.rowwise().squaredNorm();
}

SketchPair split_budget(Index budget, std::uint64_t seed) {
  const Index quarter = budget / 4;
  if (quarter < 1) throw ParameterError("budget " + std::to_string(budget) + " is too small to split in four");
  return SketchPair{quarter, quarter, seed};
}

}  // namespace rnorm
