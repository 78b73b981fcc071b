#include <cmath>

#include "doctest.h"
#include "rnorm/errors.hpp"
#include "rnorm/random.hpp"
#include "rnorm/rownorm.hpp"
#include "rnorm/sketch.hpp"

using namespace rnorm;

namespace {

double orthonormality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("gaussian_block is deterministic per (seed, stream)") {
  const Matrix a = gaussian_block(3, 2, 1, 0);
  CHECK(a == gaussian_block(3, 2, 1, 0));
  CHECK(a != gaussian_block(3, 2, 1, 1));
  CHECK(a != gaussian_block(3, 2, 2, 0));
  // Column prefixes do not depend on the total width.
  const Matrix wide = gaussian_block(3, 7, 1, 0);
  CHECK(wide.leftCols(2) == a);
  CHECK(gaussian_block(4, 2, 5, 0, 0.5) == 0.5 * gaussian_block(4, 2, 5, 0, 1.0));
  CHECK_THROWS_AS(gaussian_block(0, 2, 1, 0), ParameterError);
  CHECK_THROWS_AS(gaussian_block(2, 2, 1, 0, 0.0), ParameterError);
}

TEST_CASE("gaussian_block moments at scale 1/sqrt(16)") {
  // 10^6 entries; s.e. of the mean is 2.5e-4 and of the variance 8.8e-5.
  const Matrix g = gaussian_block(1000, 1000, 2024, 0, 0.25);
  const double mean = g.mean();
  const double var = (g.array() - mean).square().sum() / static_cast<double>(g.size() - 1);
  CHECK(std::abs(mean) <= 0.001);
  CHECK(var >= 0.0600);
  CHECK(var <= 0.0650);
}

TEST_CASE("orthonormalize") {
  SUBCASE("columns of the identity") {
    const Matrix m = Matrix::Identity(4, 4).leftCols(2);
    const OrthonormalBasis b = orthonormalize(m);
    CHECK(b.rank_used == 2);
    // Same span, up to the sign Householder picks.
    CHECK((b.q * b.q.transpose() - m * m.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(b.q.cwiseAbs().isApprox(m));
  }
  SUBCASE("duplicate columns") {
    Matrix m(5, 2);
    m.col(0) = gaussian_block(5, 1, 1, 0);
    m.col(1) = m.col(0);
    CHECK(orthonormalize(m).rank_used == 1);
  }
  SUBCASE("zero matrix") {
    const OrthonormalBasis b = orthonormalize(Matrix::Zero(6, 3));
    CHECK(b.rank_used == 0);
    CHECK(b.q.rows() == 6);
    CHECK(b.q.cols() == 0);
  }
  SUBCASE("random 30x8") {
    const Matrix m = gaussian_block(30, 8, 3, 0);
    const OrthonormalBasis b = orthonormalize(m);
    CHECK(b.rank_used == 8);
    CHECK(orthonormality_defect(b.q) <= 1e-10);
    CHECK((b.q * (b.q.transpose() * m) - m).norm() / m.norm() <= 1e-10);
  }
  SUBCASE("non-finite input") {
    Matrix m = Matrix::Ones(3, 2);
    m(0, 0) = std::nan("");
    CHECK_THROWS_AS(orthonormalize(m), InputError);
  }
}

TEST_CASE("orthonormalize captures the range of low-rank inputs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index rank = 1 + static_cast<Index>(seed % 6);
    const Index width = rank + static_cast<Index>(seed % 4);
    const Matrix m = gaussian_block(40, rank, seed, 1) * gaussian_block(rank, width, seed, 2);
    const OrthonormalBasis b = orthonormalize(m);
    CAPTURE(seed);
    CHECK(b.rank_used == rank);
    CHECK(orthonormality_defect(b.q) <= 1e-10);
    CHECK((m - b.q * (b.q.transpose() * m)).norm() <= 1e-10 * m.norm());
  }
}

TEST_CASE("scaling S does not change the captured subspace") {
  const Matrix a = gaussian_block(40, 12, 9, 0);
  const Matrix s = SketchPair{5, 5, 3}.range_sketch(12);
  const Matrix b = a.transpose() * (a * s);
  const OrthonormalBasis q1 = orthonormalize(b);
  const OrthonormalBasis q2 = orthonormalize(b * 37.5);
  CHECK((q1.q * q1.q.transpose() - q2.q * q2.q.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("SketchPair") {
  const SketchPair p{6, 4, 11};
  CHECK_NOTHROW(p.validate());
  CHECK(p.probe_within_range());
  CHECK_FALSE((SketchPair{1, 4, 0}.probe_within_range()));
  CHECK_THROWS_AS((SketchPair{0, 1, 0}.validate()), ParameterError);
  CHECK_THROWS_AS((SketchPair{2, 0, 0}.validate()), ParameterError);
  CHECK(p.range_sketch(9) == gaussian_block(9, 6, 11, streams::kRangeSketch));
  CHECK(p.residual_probe(9).isApprox(gaussian_block(9, 4, 11, streams::kResidualProbe) / 2.0, 1e-15));
}

namespace {

// Exact moments of X = chi^2_r / r around 1: E(X-1)^2 = 2/r and
// E(X-1)^4 = 12(r+4)/r^3, hence the Monte-Carlo standard error of the
// second-moment estimate over `trials` samples.
double moment_standard_error(double r, double trials) {
  const double m2 = 2.0 / r;
  const double m4 = 12.0 * (r + 4.0) / (r * r * r);
  return std::sqrt((m4 - m2 * m2) / trials);
}

}  // namespace

TEST_CASE("check_jl_moment") {
  SUBCASE("r = 1 gives 2") {
    const double est = check_jl_moment(1, 100000, 1);
    CHECK(std::abs(est - 2.0) <= 5.0 * moment_standard_error(1, 1e5));
  }
  SUBCASE("r = 64 within 15% of 2/64") {
    const double est = check_jl_moment(64, 100000, 2);
    CHECK(std::abs(est - 0.03125) <= 0.15 * 0.03125);
  }
  SUBCASE("rotation invariance") {
    const Vector x = gaussian_block(8, 1, 5, 0).col(0);
    const double se = moment_standard_error(16, 1e5);
    const double basis = check_jl_moment(16, 100000, 3, Vector::Unit(8, 0));
    const double rotated = check_jl_moment(16, 100000, 4, x);
    CHECK(std::abs(basis - rotated) <= 5.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(rotated - 0.125) <= 5.0 * se);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(check_jl_moment(0, 10000, 1), ParameterError);
    CHECK_THROWS_AS(check_jl_moment(4, 9999, 1), ParameterError);
    CHECK_THROWS_AS(check_jl_moment(4, 10000, 1, Vector::Zero(3)), ParameterError);
  }
}

TEST_CASE("jlt_distortion_profile") {
  SUBCASE("single vector at r = 10^4") {
    const Matrix x = gaussian_block(20, 1, 1, 0);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Matrix g = gaussian_block(10000, 20, seed, 1, 0.01);
      if (jlt_distortion_profile(g, x) <= 0.1) ++ok;
    }
    CHECK(ok == 20);
  }
  SUBCASE("scale invariance and zero vectors") {
    const Matrix g = gaussian_block(50, 10, 2, 1, 1.0 / std::sqrt(50.0));
    const Matrix x = gaussian_block(10, 1, 3, 0);
    Matrix x5(10, 2);
    x5.col(0) = 5.0 * x.col(0);
    x5.col(1).setZero();
    CHECK(jlt_distortion_profile(g, x5) == doctest::Approx(jlt_distortion_profile(g, x)).epsilon(1e-12));
    CHECK(jlt_distortion_profile(g, Matrix::Zero(10, 3)) == 0.0);
    CHECK_THROWS_AS(jlt_distortion_profile(g, Matrix::Ones(9, 1)), DimensionError);
  }
  SUBCASE("minimum width for 32 basis vectors") {
    const Index r = jlt_min_width(32, 0.01);
    CHECK(static_cast<double>(r) > 32.0 * std::log(6400.0));
    CHECK(static_cast<double>(r - 1) <= 32.0 * std::log(6400.0));
    const double bound = jlt_distortion_bound(32, 0.01, r);
    int holds = 0;
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
      const Matrix g = gaussian_block(r, 32, seed, 1, 1.0 / std::sqrt(static_cast<double>(r)));
      if (jlt_distortion_profile(g, Matrix::Identity(32, 32)) <= bound) ++holds;
    }
    CHECK(holds >= 99);
  }
}
