#pragma once

// File formats.
//
//   Dense:  ASCII header line "RNORM-DENSE v1 <rows> <cols>\n" followed by
//           rows*cols IEEE-754 doubles, little-endian, row-major.
//   Sparse: Matrix Market coordinate format (real / integer / pattern;
//           general / symmetric / skew-symmetric).
//   Pairs:  text lines "i,j" with 0-based indices; blank lines and lines
//           starting with '#' are ignored.

#include <filesystem>
#include <memory>
#include <string>
#include <variant>

#include "rnorm/operator.hpp"

namespace rnorm {

enum class MatrixFormat { automatic, dense, matrix_market };

MatrixFormat parse_format(const std::string& name);

Matrix read_dense(const std::filesystem::path& path);
void write_dense(const std::filesystem::path& path, const Eigen::Ref<const Matrix>& a);

SparseMatrix read_matrix_market(const std::filesystem::path& path);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);

PairSet read_pairs(const std::filesystem::path& path);

/// A matrix loaded from disk: dense files stay dense, Matrix Market files
/// stay sparse.
class LoadedMatrix {
 public:
  explicit LoadedMatrix(Matrix dense);
  explicit LoadedMatrix(SparseMatrix sparse);

  Index rows() const;
  Index cols() const;
  bool is_sparse() const noexcept { return std::holds_alternative<std::shared_ptr<const SparseMatrix>>(storage_); }

  /// A fresh operator (own meter) over the shared storage.
  OperatorPtr make_operator() const;
  /// Dense copy; for oracles on small inputs.
  Matrix to_dense() const;

 private:
  std::variant<std::shared_ptr<const Matrix>, std::shared_ptr<const SparseMatrix>> storage_;
};

/// `automatic` picks the format from the first bytes of the file.
LoadedMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format = MatrixFormat::automatic);

}  // namespace rnorm
