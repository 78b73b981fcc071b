#include "rnorm/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "rnorm/errors.hpp"

namespace rnorm {

namespace {

constexpr const char* kDenseMagic = "RNORM-DENSE";
constexpr const char* kDenseVersion = "v1";
constexpr std::size_t kMaxHeader = 256;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int b = 0; b < 8; ++b) out |= ((v >> (8 * b)) & 0xFFu) << (8 * (7 - b));
    return out;
  }
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "auto") return MatrixFormat::automatic;
  if (n == "dense" || n == "bin") return MatrixFormat::dense;
  if (n == "mtx" || n == "mm" || n == "matrix-market") return MatrixFormat::matrix_market;
  throw ParameterError("unknown matrix format '" + name + "' (expected auto, dense or mtx)");
}

// ---------------------------------------------------------------------------

Matrix read_dense(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);

  std::string header;
  char ch = 0;
  while (header.size() < kMaxHeader && in.get(ch) && ch != '\n') header.push_back(ch);
  if (ch != '\n') throw DataError("missing or overlong RNORM-DENSE header", 1);

  std::istringstream fields(header);
  std::string magic, version, extra;
  long long rows = 0, cols = 0;
  if (!(fields >> magic >> version >> rows >> cols) || magic != kDenseMagic || version != kDenseVersion ||
      (fields >> extra)) {
    throw DataError("expected header 'RNORM-DENSE v1 <rows> <cols>'", 1);
  }
  if (rows < 1 || cols < 1) throw DataError("matrix dimensions must be positive", 1);

  const auto header_bytes = static_cast<std::uintmax_t>(header.size() + 1);
  const std::uintmax_t file_bytes = std::filesystem::file_size(path);
  const auto count = static_cast<std::uintmax_t>(rows);
  if (static_cast<std::uintmax_t>(cols) > std::numeric_limits<std::uintmax_t>::max() / 8 / count) {
    throw DataError("declared dimensions overflow");
  }
  const std::uintmax_t expected = count * static_cast<std::uintmax_t>(cols) * 8;
  if (file_bytes - header_bytes != expected) {
    throw DataError("payload has " + std::to_string(file_bytes - header_bytes) + " bytes, header declares " +
                    std::to_string(expected));
  }

  Matrix a(rows, cols);
  std::vector<std::uint64_t> row(static_cast<std::size_t>(cols));
  for (Index i = 0; i < rows; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 8))) {
      throw DataError("truncated payload at row " + std::to_string(i));
    }
    for (Index j = 0; j < cols; ++j) a(i, j) = std::bit_cast<double>(to_little_endian(row[static_cast<std::size_t>(j)]));
  }
  return a;
}

void write_dense(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& a) {
  std::ofstream out(path, std::ios::out | std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << kDenseMagic << ' ' << kDenseVersion << ' ' << a.rows() << ' ' << a.cols() << '\n';
  std::vector<std::uint64_t> row(static_cast<std::size_t>(a.cols()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) row[static_cast<std::size_t>(j)] = to_little_endian(std::bit_cast<std::uint64_t>(a(i, j)));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw DataError("empty Matrix Market file", 1);
  ++lineno;
  std::istringstream banner(lower(line));
  std::string tag, object, layout, field, symmetry;
  banner >> tag >> object >> layout >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix") throw DataError("missing %%MatrixMarket matrix banner", lineno);
  if (layout != "coordinate") throw DataError("only coordinate layout is supported, got '" + layout + "'", lineno);
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double") {
    throw DataError("unsupported field '" + field + "'", lineno);
  }
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric") {
    throw DataError("unsupported symmetry '" + symmetry + "'", lineno);
  }

  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    std::istringstream size_line(line);
    std::string extra;
    if (!(size_line >> rows >> cols >> nnz) || (size_line >> extra)) {
      throw DataError("expected '<rows> <cols> <entries>'", lineno);
    }
    break;
  }
  if (rows < 1 || cols < 1 || nnz < 0) throw DataError("invalid or missing size line", lineno);
  if (symmetry != "general" && rows != cols) throw DataError("symmetric matrix must be square", lineno);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetry == "general" ? nnz : 2 * nnz));
  long long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%' || is_blank(line)) continue;
    if (seen == nnz) throw DataError("more entries than declared", lineno);
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 1.0;
    std::string extra;
    if (!(entry >> i >> j) || (!pattern && !(entry >> v)) || (entry >> extra)) {
      throw DataError("malformed entry", lineno);
    }
    if (i < 1 || i > rows || j < 1 || j > cols) throw DataError("entry index out of range", lineno);
    if (!std::isfinite(v)) throw DataError("non-finite value", lineno);
    triplets.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    if (i != j && symmetry == "symmetric") triplets.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), v);
    if (i != j && symmetry == "skew-symmetric") triplets.emplace_back(static_cast<Index>(j - 1), static_cast<Index>(i - 1), -v);
    ++seen;
  }
  if (seen != nnz) {
    throw DataError("file has " + std::to_string(seen) + " entries, size line declares " + std::to_string(nnz), lineno);
  }

  SparseMatrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.precision(17);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  for (Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

PairSet read_pairs(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<PairSet::Pair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || is_blank(line)) continue;
    std::istringstream fields(line);
    long long i = -1, j = -1;
    char comma = 0;
    std::string extra;
    if (!(fields >> i >> comma >> j) || comma != ',' || (fields >> extra)) throw DataError("expected 'i,j'", lineno);
    if (i < 0 || j < 0) throw DataError("pair indices must be non-negative", lineno);
    pairs.emplace_back(static_cast<Index>(i), static_cast<Index>(j));
  }
  try {
    return PairSet(std::move(pairs));
  } catch (const ParameterError& e) {
    throw DataError(std::string("invalid pair list: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

LoadedMatrix::LoadedMatrix(Matrix dense) : storage_(std::make_shared<const Matrix>(std::move(dense))) {}

LoadedMatrix::LoadedMatrix(SparseMatrix sparse) : storage_(std::make_shared<const SparseMatrix>(std::move(sparse))) {}

Index LoadedMatrix::rows() const {
  return std::visit([](const auto& m) { return m->rows(); }, storage_);
}

Index LoadedMatrix::cols() const {
  return std::visit([](const auto& m) { return m->cols(); }, storage_);
}

OperatorPtr LoadedMatrix::make_operator() const {
  if (is_sparse()) return std::make_shared<SparseOperator>(std::get<std::shared_ptr<const SparseMatrix>>(storage_));
  return std::make_shared<DenseOperator>(std::get<std::shared_ptr<const Matrix>>(storage_));
}

Matrix LoadedMatrix::to_dense() const {
  if (is_sparse()) return Matrix(*std::get<std::shared_ptr<const SparseMatrix>>(storage_));
  return *std::get<std::shared_ptr<const Matrix>>(storage_);
}

LoadedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  if (format == MatrixFormat::automatic) {
    std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
    char head[16] = {};
    in.read(head, sizeof(head));
    const std::string prefix(head, static_cast<std::size_t>(in.gcount()));
    if (prefix.rfind(kDenseMagic, 0) == 0) {
      format = MatrixFormat::dense;
    } else if (lower(prefix).rfind("%%matrixmarket", 0) == 0) {
      format = MatrixFormat::matrix_market;
    } else {
      throw DataError("cannot detect matrix format of '" + path.string() + "'", 1);
    }
  }
  if (format == MatrixFormat::dense) return LoadedMatrix(read_dense(path));
  return LoadedMatrix(read_matrix_market(path));
}

}  // namespace rnorm
