#include "rnorm/operator.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "rnorm/errors.hpp"

namespace rnorm {

namespace {

void check_block(const Eigen::Ref<const Matrix>& X, Index expected_rows, const char* what) {
  if (X.rows() != expected_rows) {
    throw DimensionError(std::string(what) + ": block has " + std::to_string(X.rows()) +
                         " rows, operator expects " + std::to_string(expected_rows));
  }
  if (!X.allFinite()) throw InputError(std::string(what) + ": block contains non-finite entries");
}

}  // namespace

Matrix QueryableOperator::apply(const Eigen::Ref<const Matrix>& X) const {
  check_block(X, cols(), "apply");
  meter_.charge_forward(static_cast<std::uint64_t>(X.cols()));
  return forward_impl(X);
}

Matrix QueryableOperator::apply_transpose(const Eigen::Ref<const Matrix>& X) const {
  check_block(X, rows(), "apply_transpose");
  meter_.charge_transpose(static_cast<std::uint64_t>(X.cols()));
  return transpose_impl(X);
}

// ---------------------------------------------------------------------------

DenseOperator::DenseOperator(Matrix a) : DenseOperator(std::make_shared<const Matrix>(std::move(a))) {}

DenseOperator::DenseOperator(std::shared_ptr<const Matrix> a) : a_(std::move(a)) {
  if (!a_ || a_->rows() < 1 || a_->cols() < 1) throw DimensionError("dense operator needs a non-empty matrix");
}

Matrix DenseOperator::forward_impl(const Eigen::Ref<const Matrix>& X) const { return (*a_) * X; }

Matrix DenseOperator::transpose_impl(const Eigen::Ref<const Matrix>& X) const {
  return a_->transpose() * X;
}

SparseOperator::SparseOperator(SparseMatrix a)
    : SparseOperator(std::make_shared<const SparseMatrix>(std::move(a))) {}

SparseOperator::SparseOperator(std::shared_ptr<const SparseMatrix> a) : a_(std::move(a)) {
  if (!a_ || a_->rows() < 1 || a_->cols() < 1) throw DimensionError("sparse operator needs a non-empty matrix");
}

Matrix SparseOperator::forward_impl(const Eigen::Ref<const Matrix>& X) const { return (*a_) * X; }

Matrix SparseOperator::transpose_impl(const Eigen::Ref<const Matrix>& X) const {
  return a_->transpose() * X;
}

// ---------------------------------------------------------------------------

PairSet::PairSet(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  std::set<Pair> seen;
  for (const auto& [i, j] : pairs_) {
    if (i < 0 || j < 0) throw ParameterError("pair indices must be non-negative");
    if (i == j) throw ParameterError("pair (" + std::to_string(i) + "," + std::to_string(j) + ") has i == j");
    if (!seen.emplace(std::min(i, j), std::max(i, j)).second) {
      throw ParameterError("duplicate pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    max_index_ = std::max({max_index_, i, j});
  }
}

PairSet PairSet::all_pairs(Index t) {
  if (t < 2) throw ParameterError("all_pairs needs at least two points");
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(t * (t - 1) / 2));
  for (Index i = 0; i < t; ++i)
    for (Index j = i + 1; j < t; ++j) pairs.emplace_back(i, j);
  PairSet out;
  out.pairs_ = std::move(pairs);
  out.max_index_ = t - 1;
  return out;
}

Matrix PairSet::difference(const Eigen::Ref<const Matrix>& Y) const {
  if (max_index_ >= Y.rows()) throw DimensionError("pair index exceeds block rows");
  Matrix out(static_cast<Index>(pairs_.size()), Y.cols());
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    out.row(static_cast<Index>(p)) = Y.row(pairs_[p].first) - Y.row(pairs_[p].second);
  }
  return out;
}

Matrix PairSet::scatter(const Eigen::Ref<const Matrix>& X, Index t) const {
  if (X.rows() != static_cast<Index>(pairs_.size())) throw DimensionError("scatter block must have one row per pair");
  if (max_index_ >= t) throw DimensionError("pair index exceeds target rows");
  Matrix out = Matrix::Zero(t, X.cols());
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    out.row(pairs_[p].first) += X.row(static_cast<Index>(p));
    out.row(pairs_[p].second) -= X.row(static_cast<Index>(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

TriangularFactor::TriangularFactor(const Eigen::Ref<const Matrix>& r, double tolerance) {
  if (r.rows() != r.cols() || r.rows() < 1) throw DimensionError("triangular factor must be square and non-empty");
  r_ = r.triangularView<Eigen::Upper>();
  const Vector diag = r_.diagonal().cwiseAbs();
  const double largest = diag.maxCoeff();
  singular_ = !r_.allFinite() || !(largest > 0.0) || (diag.array() < tolerance * largest).any();
}

void TriangularFactor::require_regular() const {
  if (singular_) throw FactorError("triangular factor is numerically singular");
}

Matrix TriangularFactor::solve(const Eigen::Ref<const Matrix>& X) const {
  require_regular();
  if (X.rows() != size()) throw DimensionError("triangular solve: row mismatch");
  return r_.triangularView<Eigen::Upper>().solve(X);
}

Matrix TriangularFactor::solve_transpose(const Eigen::Ref<const Matrix>& X) const {
  require_regular();
  if (X.rows() != size()) throw DimensionError("triangular solve: row mismatch");
  return r_.transpose().triangularView<Eigen::Lower>().solve(X);
}

// ---------------------------------------------------------------------------

namespace {

class GramOperator final : public QueryableOperator {
 public:
  explicit GramOperator(OperatorPtr inner) : inner_(std::move(inner)) {}

  Index rows() const override { return inner_->cols(); }
  Index cols() const override { return inner_->cols(); }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override {
    return inner_->apply_transpose(inner_->apply(X));
  }
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override { return forward_impl(X); }

 private:
  OperatorPtr inner_;
};

class IncidenceOperator final : public QueryableOperator {
 public:
  IncidenceOperator(OperatorPtr inner, PairSet pairs) : inner_(std::move(inner)), pairs_(std::move(pairs)) {}

  Index rows() const override { return static_cast<Index>(pairs_.size()); }
  Index cols() const override { return inner_->cols(); }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override {
    return pairs_.difference(inner_->apply(X));
  }
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override {
    return inner_->apply_transpose(pairs_.scatter(X, inner_->rows()));
  }

 private:
  OperatorPtr inner_;
  PairSet pairs_;
};

class RightSolveOperator final : public QueryableOperator {
 public:
  RightSolveOperator(OperatorPtr inner, TriangularFactor r) : inner_(std::move(inner)), r_(std::move(r)) {}

  Index rows() const override { return inner_->rows(); }
  Index cols() const override { return inner_->cols(); }

 protected:
  Matrix forward_impl(const Eigen::Ref<const Matrix>& X) const override { return inner_->apply(r_.solve(X)); }
  Matrix transpose_impl(const Eigen::Ref<const Matrix>& X) const override {
    return r_.solve_transpose(inner_->apply_transpose(X));
  }

 private:
  OperatorPtr inner_;
  TriangularFactor r_;
};

}  // namespace

OperatorPtr compose_gram(OperatorPtr op) {
  if (!op) throw ParameterError("compose_gram: null operator");
  return std::make_shared<GramOperator>(std::move(op));
}

OperatorPtr compose_incidence(OperatorPtr op, PairSet pairs) {
  if (!op) throw ParameterError("compose_incidence: null operator");
  if (pairs.empty()) throw ParameterError("compose_incidence: empty pair set");
  if (pairs.max_index() >= op->rows()) {
    throw ParameterError("pair index " + std::to_string(pairs.max_index()) + " out of range for " +
                         std::to_string(op->rows()) + " rows");
  }
  return std::make_shared<IncidenceOperator>(std::move(op), std::move(pairs));
}

OperatorPtr compose_right_solve(OperatorPtr op, TriangularFactor r) {
  if (!op) throw ParameterError("compose_right_solve: null operator");
  if (r.singular()) throw FactorError("compose_right_solve: triangular factor is numerically singular");
  if (r.size() != op->cols()) throw DimensionError("compose_right_solve: factor size differs from operator columns");
  return std::make_shared<RightSolveOperator>(std::move(op), std::move(r));
}

Matrix materialize(const QueryableOperator& op) { return op.apply(Matrix::Identity(op.cols(), op.cols())); }

}  // namespace rnorm
