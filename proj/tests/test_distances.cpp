#include <cmath>

#include "doctest.h"
#include "rnorm/distances.hpp"
#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"
#include "rnorm/rownorm.hpp"
#include "rnorm/synth.hpp"

using namespace rnorm;

namespace {

// Points whose coordinates decay like j^-1.5, so the pairwise differences
// have a fast-decaying spectrum.
Matrix anisotropic_cloud(Index t, Index d, std::uint64_t seed) {
  Matrix x = gaussian_block(t, d, seed, 20);
  for (Index j = 0; j < d; ++j) x.col(j) *= std::pow(static_cast<double>(j + 1), -1.5);
  return x;
}

}  // namespace

TEST_CASE("identical rows are at distance zero") {
  Matrix a = gaussian_block(4, 6, 1, 0);
  a.row(2) = a.row(0);
  const DenseOperator op(a);
  const PairSet pairs({{0, 2}});
  CHECK(std::abs(estimate_distances_adaptive(op, pairs, 2, 2, 3).estimates(0)) <= 1e-12);
  CHECK(estimate_distances_jl(op, pairs, 8, 3).estimates(0) == 0.0);
  CHECK(exact_distances(a, pairs)(0) == 0.0);
}

TEST_CASE("corners of the unit simplex") {
  // Differences of e_i span a 2-dimensional space, so m_s = 2 is exact.
  const DenseOperator op(Matrix(Matrix::Identity(3, 3)));
  const DistanceReport r = estimate_distances_adaptive(op, PairSet::all_pairs(3), 2, 2, 8);
  CHECK(r.rank_used == 2);
  for (Index p = 0; p < 3; ++p) CHECK(r.estimates(p) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.total == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("exact_distances against an explicit loop") {
  const Matrix a = gaussian_block(7, 5, 2, 0);
  const PairSet pairs = PairSet::all_pairs(7);
  const Vector got = exact_distances(a, pairs);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    double want = 0.0;
    for (Index c = 0; c < a.cols(); ++c) want += (a(i, c) - a(j, c)) * (a(i, c) - a(j, c));
    CHECK(got(static_cast<Index>(p)) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("matches the row-norm estimator on the composed operator") {
  const Matrix a = gaussian_block(12, 9, 4, 0);
  auto op = std::make_shared<DenseOperator>(a);
  const PairSet pairs = PairSet::all_pairs(12);
  const DistanceReport d = estimate_distances_adaptive(*op, pairs, 4, 3, 19);
  const OperatorPtr composed = compose_incidence(op, pairs);
  const EstimateReport r = estimate_rownorms_adaptive(*composed, 4, 3, 19);
  CHECK((d.estimates - r.estimates).cwiseAbs().maxCoeff() <= 1e-10 * r.estimates.maxCoeff());
  CHECK(d.rank_used == r.rank_used);
}

TEST_CASE("adaptive beats JL on an anisotropic cloud") {
  const Matrix a = anisotropic_cloud(50, 20, 3);
  const DenseOperator op(a);
  const PairSet pairs = PairSet::all_pairs(50);
  const Vector exact = exact_distances(a, pairs);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DistanceReport ad = estimate_distances_adaptive(op, pairs, 8, 8, seed);
    const DistanceReport jl = estimate_distances_jl(op, pairs, 32, seed);
    if (frobenius_rel_error(ad.estimates, exact) < frobenius_rel_error(jl.estimates, exact)) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("JL distances at large width") {
  const Matrix a = gaussian_block(2, 30, 5, 0);
  const DenseOperator op(a);
  const PairSet pairs({{0, 1}});
  const double exact = exact_distances(a, pairs)(0);
  const double est = estimate_distances_jl(op, pairs, 10000, 1).estimates(0);
  CHECK(std::abs(est - exact) <= 0.1 * exact);
}

TEST_CASE("scaling the data scales distances quadratically") {
  const Matrix a = gaussian_block(10, 8, 6, 0);
  const DenseOperator op(a);
  const DenseOperator op2(Matrix(2.0 * a));
  const PairSet pairs = PairSet::all_pairs(10);
  const DistanceReport r1 = estimate_distances_adaptive(op, pairs, 3, 3, 2);
  const DistanceReport r2 = estimate_distances_adaptive(op2, pairs, 3, 3, 2);
  CHECK((r2.estimates - 4.0 * r1.estimates).cwiseAbs().maxCoeff() <= 1e-12 * r2.estimates.maxCoeff());
}

TEST_CASE("pair orientation does not change the estimate") {
  const Matrix a = gaussian_block(6, 9, 7, 0);
  const DenseOperator op(a);
  const DistanceReport fwd = estimate_distances_adaptive(op, PairSet({{1, 4}}), 3, 2, 5);
  const DistanceReport rev = estimate_distances_adaptive(op, PairSet({{4, 1}}), 3, 2, 5);
  CHECK(fwd.estimates(0) == rev.estimates(0));
  const DistanceReport jf = estimate_distances_jl(op, PairSet({{1, 4}}), 6, 5);
  const DistanceReport jr = estimate_distances_jl(op, PairSet({{4, 1}}), 6, 5);
  CHECK(jf.estimates(0) == jr.estimates(0));
}

TEST_CASE("query accounting") {
  const DenseOperator op(Matrix(gaussian_block(15, 12, 8, 0)));
  const DistanceReport r = estimate_distances_adaptive(op, PairSet::all_pairs(15), 5, 4, 1);
  CHECK(r.rank_used == 5);
  CHECK(r.queries_forward == 5 + 5 + 4);
  CHECK(r.queries_transpose == 5);
  CHECK(op.meter().total() == r.queries_forward + r.queries_transpose);
  op.reset_meter();
  const DistanceReport j = estimate_distances_jl(op, PairSet::all_pairs(15), 9, 1);
  CHECK(j.queries_forward == 9);
  CHECK(j.queries_transpose == 0);
}

TEST_CASE("errors") {
  const DenseOperator op(Matrix(gaussian_block(5, 4, 1, 0)));
  CHECK_THROWS_AS(estimate_distances_adaptive(op, PairSet(), 2, 2, 0), ParameterError);
  CHECK_THROWS_AS(estimate_distances_adaptive(op, PairSet({{0, 5}}), 2, 2, 0), ParameterError);
  CHECK_THROWS_AS(estimate_distances_adaptive(op, PairSet({{0, 1}}), 4, 2, 0), ParameterError);
  CHECK_THROWS_AS(estimate_distances_adaptive(op, PairSet({{0, 1}}), 2, 0, 0), ParameterError);
  CHECK_THROWS_AS(estimate_distances_jl(op, PairSet({{0, 9}}), 2, 0), ParameterError);
  CHECK_THROWS_AS(estimate_distances_jl(op, PairSet({{0, 1}}), 0, 0), ParameterError);
  CHECK(op.meter().total() == 0);
}
