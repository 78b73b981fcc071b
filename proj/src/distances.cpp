#include "rnorm/distances.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"
#include "rnorm/sketch.hpp"

namespace rnorm {

namespace {

using Clock = std::chrono::steady_clock;

void check_pairs(const PairSet& pairs, Index t) {
  if (pairs.empty()) throw ParameterError("pair set is empty");
  if (pairs.max_index() >= t) {
    throw ParameterError("pair index " + std::to_string(pairs.max_index()) + " out of range for " +
                         std::to_string(t) + " points");
  }
}

// ||row_i(Y) - row_j(Y)||^2 for each pair, without forming B Y.
void accumulate_pair_norms(const Matrix& y, const PairSet& pairs, Vector& out) {
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [i, j] = pairs[p];
    out[static_cast<Index>(p)] += (y.row(i) - y.row(j)).squaredNorm();
  }
}

double sequential_sum(const Vector& v) {
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += v[i];
  return s;
}

}  // namespace

DistanceReport estimate_distances_adaptive(const QueryableOperator& data, const PairSet& pairs, Index m_s,
                                           Index m_g, std::uint64_t seed) {
  const auto start = Clock::now();
  const SketchPair sketch{m_s, m_g, seed};
  sketch.validate();
  const Index t = data.rows();
  const Index d = data.cols();
  check_pairs(pairs, t);
  if (m_s >= d) throw ParameterError("range width m_s must be below the dimension " + std::to_string(d));

  MeteredView a(data);
  const Matrix s = sketch.range_sketch(d);
  const Matrix range = a.apply_transpose(pairs.scatter(pairs.difference(a.apply(s)), t));
  const OrthonormalBasis basis = orthonormalize(range);

  const Matrix g = sketch.residual_probe(d);
  Matrix residual = a.apply(g);
  Vector estimates = Vector::Zero(static_cast<Index>(pairs.size()));
  if (basis.rank_used > 0) {
    const Matrix captured = a.apply(basis.q);
    residual.noalias() -= captured * (basis.q.transpose() * g);
    accumulate_pair_norms(captured, pairs, estimates);
  }
  accumulate_pair_norms(residual, pairs, estimates);

  DistanceReport report;
  report.estimates = std::move(estimates);
  report.total = sequential_sum(report.estimates);
  report.queries_forward = a.meter().forward();
  report.queries_transpose = a.meter().transpose();
  report.m_s = m_s;
  report.m_g = m_g;
  report.rank_used = basis.rank_used;
  report.seed = seed;
  report.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

DistanceReport estimate_distances_jl(const QueryableOperator& data, const PairSet& pairs, Index width,
                                     std::uint64_t seed) {
  const auto start = Clock::now();
  if (width < 1) throw ParameterError("JL width must be at least 1");
  check_pairs(pairs, data.rows());

  MeteredView a(data);
  const Matrix g =
      gaussian_block(data.cols(), width, seed, streams::kResidualProbe, 1.0 / std::sqrt(static_cast<double>(width)));
  const Matrix projected = a.apply(g);
  Vector estimates = Vector::Zero(static_cast<Index>(pairs.size()));
  accumulate_pair_norms(projected, pairs, estimates);

  DistanceReport report;
  report.estimates = std::move(estimates);
  report.total = sequential_sum(report.estimates);
  report.queries_forward = a.meter().forward();
  report.queries_transpose = a.meter().transpose();
  report.m_g = width;
  report.seed = seed;
  report.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

Vector exact_distances(const Eigen::Ref<const Matrix>& a, const PairSet& pairs) {
  if (pairs.max_index() >= a.rows()) throw ParameterError("pair index out of range");
  Vector out(static_cast<Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto& [i, j] = pairs[p];
    out[static_cast<Index>(p)] = (a.row(i) - a.row(j)).squaredNorm();
  }
  return out;
}

}  // namespace rnorm
