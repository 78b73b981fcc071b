#pragma once

// Matrix-free operators. A matrix is only reachable through products with
// blocks of column vectors, A*X and A^T*X, and every column of such a block
// is charged to a query meter.

#include <atomic>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rnorm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Column-query counters. One unit is one matrix-vector product with A
/// (forward) or A^T (transpose); a block of w columns costs w units.
class QueryMeter {
 public:
  void charge_forward(std::uint64_t w) noexcept { forward_.fetch_add(w, std::memory_order_relaxed); }
  void charge_transpose(std::uint64_t w) noexcept { transpose_.fetch_add(w, std::memory_order_relaxed); }

  std::uint64_t forward() const noexcept { return forward_.load(std::memory_order_relaxed); }
  std::uint64_t transpose() const noexcept { return transpose_.load(std::memory_order_relaxed); }
  std::uint64_t total() const noexcept { return forward() + transpose(); }

  void reset() noexcept {
    forward_.store(0, std::memory_order_relaxed);
    transpose_.store(0, std::memory_order_relaxed);
  }

 private:
  std::atomic<std::uint64_t> forward_{0};
  std::atomic<std::uint64_t> transpose_{0};
};

/// A linear operator A (rows x cols) with a query meter.
///
/// `apply` and `apply_transpose` validate the block (shape and finiteness),
/// charge the meter and forward to the backing implementation. Operators are
/// immutable after construction apart from the meter, which is atomic, so a
/// single instance may be shared across threads.
class QueryableOperator {
 public:
  virtual ~QueryableOperator() = default;

  QueryableOperator(const QueryableOperator&) = delete;
  QueryableOperator& operator=(const QueryableOperator&) = delete;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  /// A * X, X is cols() x w.
  Matrix apply(const Eigen::Ref<const Matrix>& X) const;
  /// A^T * X, X is rows() x w.
  Matrix apply_transpose(const Eigen::Ref<const Matrix>& X) const;

  const QueryMeter& meter() const noexcept { return meter_; }
  void reset_meter() const noexcept { meter_.reset(); }

 protected:
  QueryableOperator() = default;

  virtual Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const = 0;
  virtual Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const = 0;

 private:
  mutable QueryMeter meter_;
};

using OperatorPtr = std::shared_ptr<const QueryableOperator>;

/// Dense in-memory matrix. The storage is shared, so many operators (each
/// with its own meter) can wrap one matrix.
class DenseOperator final : public QueryableOperator {
 public:
  explicit DenseOperator(Matrix a);
  explicit DenseOperator(std::shared_ptr<const Matrix> a);

  Index rows() const override { return a_->rows(); }
  Index cols() const override { return a_->cols(); }
  const Matrix& matrix() const noexcept { return *a_; }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override;
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override;

 private:
  std::shared_ptr<const Matrix> a_;
};

/// Compressed sparse row matrix; never densified.
class SparseOperator final : public QueryableOperator {
 public:
  explicit SparseOperator(SparseMatrix a);
  explicit SparseOperator(std::shared_ptr<const SparseMatrix> a);

  Index rows() const override { return a_->rows(); }
  Index cols() const override { return a_->cols(); }
  const SparseMatrix& matrix() const noexcept { return *a_; }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override;
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override;

 private:
  std::shared_ptr<const SparseMatrix> a_;
};

/// Forwards to another operator unchanged. Its own meter counts only the
/// queries issued through this view, which gives exact per-call accounting
/// even when the wrapped operator is shared.
class MeteredView final : public QueryableOperator {
 public:
  explicit MeteredView(const QueryableOperator& inner) : inner_(inner) {}

  Index rows() const override { return inner_.rows(); }
  Index cols() const override { return inner_.cols(); }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override { return inner_.apply(X); }
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override {
    return inner_.apply_transpose(X);
  }

 private:
  const QueryableOperator& inner_;
};

/// Ordered list of distinct index pairs (i, j), i != j. Row p of the implicit
/// incidence matrix B is (e_i - e_j)^T for the p-th pair. (i, j) and (j, i)
/// describe the same distance and count as duplicates.
class PairSet {
 public:
  using Pair = std::pair<Index, Index>;

  PairSet() = default;
  explicit PairSet(std::vector<Pair> pairs);

  /// All t*(t-1)/2 pairs i < j in lexicographic order.
  static PairSet all_pairs(Index t);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const Pair& operator[](std::size_t p) const { return pairs_[p]; }
  const std::vector<Pair>& pairs() const noexcept { return pairs_; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  /// Largest index referenced, or -1 when empty.
  Index max_index() const noexcept { return max_index_; }

  /// B * Y: row p is Y(i,:) - Y(j,:). Y must have more than max_index() rows.
  Matrix difference(const Eigen::Ref<const Matrix>& Y) const;
  /// B^T * X into a t-row block (scatter-add of +row / -row).
  Matrix scatter(const Eigen::Ref<const Matrix>& X, Index t) const;

 private:
  std::vector<Pair> pairs_;
  Index max_index_ = -1;
};

/// Upper-triangular d x d factor R. The strictly lower triangle is discarded
/// on construction. If some |R_ii| < tol * max_j |R_jj| the factor is flagged
/// singular and all solves throw FactorError.
class TriangularFactor {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  explicit TriangularFactor(const Eigen::Ref<const Matrix>& r, double tolerance = kDefaultTolerance);

  Index size() const noexcept { return r_.rows(); }
  const Matrix& matrix() const noexcept { return r_; }
  bool singular() const noexcept { return singular_; }

  /// R^{-1} X by back substitution.
  Matrix solve(const Eigen::Ref<const Matrix>& X) const;
  /// R^{-T} X by forward substitution.
  Matrix solve_transpose(const Eigen::Ref<const Matrix>& X) const;

 private:
  void require_regular() const;

  Matrix r_;
  bool singular_ = false;
};

/// x -> A^T (A x); a d x d operator. Each query costs one forward and one
/// transpose query on the wrapped operator.
OperatorPtr compose_gram(OperatorPtr op);

/// x -> B (A x) and y -> A^T (B^T y) for the incidence matrix of `pairs`.
/// B is applied by row differencing and scatter-add, never stored.
OperatorPtr compose_incidence(OperatorPtr op, PairSet pairs);

/// x -> A (R^{-1} x) and y -> R^{-T} (A^T y). Throws FactorError if R is
/// flagged singular and DimensionError if R does not match A's columns.
OperatorPtr compose_right_solve(OperatorPtr op, TriangularFactor r);

/// Densify an operator by applying it to the identity. Charges cols()
/// forward queries; intended for oracles at desk scale.
Matrix materialize(const QueryableOperator& op);

}  // namespace rnorm
