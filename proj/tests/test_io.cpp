#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <bit>
#include <cstdint>

#include <unistd.h>

#include "doctest.h"
#include "rnorm/errors.hpp"
#include "rnorm/io.hpp"
#include "rnorm/random.hpp"

using namespace rnorm;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("rnorm_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Returns the line a DataError reports, or -1 if none was thrown.
std::size_t error_line(const auto& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.line();
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

TEST_CASE("dense format round trip") {
  TempDir dir;
  const Matrix a = gaussian_block(7, 3, 1, 0);
  write_dense(dir / "a.bin", a);
  const Matrix b = read_dense(dir / "a.bin");
  CHECK(a == b);
  write_dense(dir / "b.bin", b);
  CHECK(slurp(dir / "a.bin") == slurp(dir / "b.bin"));
  CHECK(slurp(dir / "a.bin").rfind("RNORM-DENSE v1 7 3\n", 0) == 0);
  CHECK(slurp(dir / "a.bin").size() == std::string("RNORM-DENSE v1 7 3\n").size() + 21 * 8);
}

TEST_CASE("dense payload layout is row-major little-endian") {
  TempDir dir;
  const std::string header = "RNORM-DENSE v1 2 2\n";
  std::string payload;
  for (double v : {1.0, 0.0, 0.0, 1.0}) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) payload.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
  }
  write_text(dir / "i.bin", header + payload);
  CHECK(read_dense(dir / "i.bin") == Matrix::Identity(2, 2));
}

TEST_CASE("dense format errors") {
  TempDir dir;
  write_text(dir / "huge.bin", "RNORM-DENSE v1 100000 1250\n" + std::string(64, '\0'));
  CHECK_THROWS_AS(read_dense(dir / "huge.bin"), DataError);
  write_text(dir / "bad.bin", "RNORM-DENSE v2 1 1\n12345678");
  CHECK(error_line([&] { read_dense(dir / "bad.bin"); }) == 1);
  write_text(dir / "zero.bin", "RNORM-DENSE v1 0 3\n");
  CHECK_THROWS_AS(read_dense(dir / "zero.bin"), DataError);
  CHECK_THROWS_AS(read_dense(dir / "missing.bin"), DataError);
}

TEST_CASE("Matrix Market reader") {
  TempDir dir;
  SUBCASE("general real") {
    write_text(dir / "a.mtx",
               "%%MatrixMarket matrix coordinate real general\n% comment\n3 4 3\n1 1 2.5\n2 4 -1\n3 2 1e-3\n");
    const SparseMatrix a = read_matrix_market(dir / "a.mtx");
    CHECK(a.rows() == 3);
    CHECK(a.cols() == 4);
    CHECK(a.nonZeros() == 3);
    CHECK(a.coeff(0, 0) == 2.5);
    CHECK(a.coeff(1, 3) == -1.0);
    CHECK(a.coeff(2, 1) == 1e-3);
  }
  SUBCASE("symmetric mirrors off-diagonal entries") {
    write_text(dir / "s.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 3\n");
    const Matrix a = Matrix(read_matrix_market(dir / "s.mtx"));
    Matrix want(2, 2);
    want << 4, 3, 3, 0;
    CHECK(a == want);
  }
  SUBCASE("skew-symmetric") {
    write_text(dir / "k.mtx", "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 5\n");
    const Matrix a = Matrix(read_matrix_market(dir / "k.mtx"));
    CHECK(a(1, 0) == 5.0);
    CHECK(a(0, 1) == -5.0);
  }
  SUBCASE("pattern entries are ones") {
    write_text(dir / "p.mtx", "%%MatrixMarket matrix coordinate pattern general\n2 3 2\n1 3\n2 2\n");
    const Matrix a = Matrix(read_matrix_market(dir / "p.mtx"));
    CHECK(a(0, 2) == 1.0);
    CHECK(a(1, 1) == 1.0);
    CHECK(a.sum() == 2.0);
  }
  SUBCASE("round trip") {
    const SparseMatrix a = Matrix(gaussian_block(5, 4, 2, 0)).sparseView();
    write_matrix_market(dir / "r.mtx", a);
    CHECK(Matrix(read_matrix_market(dir / "r.mtx")) == Matrix(a));
  }
}

TEST_CASE("Matrix Market errors carry line numbers") {
  TempDir dir;
  const std::string banner = "%%MatrixMarket matrix coordinate real general\n";
  write_text(dir / "e1.mtx", banner + "2 2 2\n1 1 1\n1 x 2\n");
  CHECK(error_line([&] { read_matrix_market(dir / "e1.mtx"); }) == 4);
  write_text(dir / "e2.mtx", banner + "2 2 1\n3 1 1\n");
  CHECK(error_line([&] { read_matrix_market(dir / "e2.mtx"); }) == 3);
  write_text(dir / "e3.mtx", banner + "2 2 3\n1 1 1\n2 2 1\n");
  CHECK_THROWS_AS(read_matrix_market(dir / "e3.mtx"), DataError);
  write_text(dir / "e4.mtx", banner + "2 2 1\n1 1 1\n2 2 1\n");
  CHECK(error_line([&] { read_matrix_market(dir / "e4.mtx"); }) == 4);
  write_text(dir / "e5.mtx", "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n");
  CHECK(error_line([&] { read_matrix_market(dir / "e5.mtx"); }) == 1);
  write_text(dir / "e6.mtx", banner + "2 2 1\n1 1 nan\n");
  CHECK(error_line([&] { read_matrix_market(dir / "e6.mtx"); }) == 3);
}

TEST_CASE("pair lists") {
  TempDir dir;
  write_text(dir / "p.csv", "# pairs\n0,1\n\n2,0\n 3 , 4 \n");
  const PairSet p = read_pairs(dir / "p.csv");
  REQUIRE(p.size() == 3);
  CHECK(p[0] == PairSet::Pair{0, 1});
  CHECK(p[1] == PairSet::Pair{2, 0});
  CHECK(p[2] == PairSet::Pair{3, 4});

  write_text(dir / "dup.csv", "0,1\n1,0\n");
  CHECK_THROWS_AS(read_pairs(dir / "dup.csv"), DataError);
  write_text(dir / "bad.csv", "0,1\n2;3\n");
  CHECK(error_line([&] { read_pairs(dir / "bad.csv"); }) == 2);
  write_text(dir / "neg.csv", "0,-1\n");
  CHECK(error_line([&] { read_pairs(dir / "neg.csv"); }) == 1);
}

TEST_CASE("load_matrix detects the format") {
  TempDir dir;
  const Matrix a = gaussian_block(4, 3, 3, 0);
  write_dense(dir / "a.data", a);
  write_matrix_market(dir / "a.txt", a.sparseView());

  const LoadedMatrix dense = load_matrix(dir / "a.data");
  CHECK_FALSE(dense.is_sparse());
  CHECK(dense.to_dense() == a);
  const LoadedMatrix sparse = load_matrix(dir / "a.txt");
  CHECK(sparse.is_sparse());
  CHECK(sparse.rows() == 4);
  CHECK(sparse.cols() == 3);
  CHECK(sparse.to_dense() == a);

  const OperatorPtr op = sparse.make_operator();
  CHECK(dynamic_cast<const SparseOperator*>(op.get()) != nullptr);
  CHECK(op->apply(Matrix::Identity(3, 3)) == a);

  CHECK_THROWS_AS(load_matrix(dir / "a.txt", MatrixFormat::dense), DataError);
  write_text(dir / "junk", "hello\n");
  CHECK_THROWS_AS(load_matrix(dir / "junk"), DataError);
}

TEST_CASE("parse_format") {
  CHECK(parse_format("auto") == MatrixFormat::automatic);
  CHECK(parse_format("dense") == MatrixFormat::dense);
  CHECK(parse_format("mtx") == MatrixFormat::matrix_market);
  CHECK(parse_format("matrix-market") == MatrixFormat::matrix_market);
  CHECK_THROWS_AS(parse_format("csv"), ParameterError);
}
