#pragma once

#include <gowl/types.hpp>

#include <Eigen/SparseCore>

#include <span>
#include <variant>

namespace gowl {

/**
 * Design matrix X (n x d), stored dense or as compressed sparse rows.
 *
 * Sparse designs also keep a column-major companion, built once, for the
 * feature-wise work: column norms, column selection, and X^T products.
 */
class Design {
 public:
  using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  using SparseCols = Eigen::SparseMatrix<double, Eigen::ColMajor>;

  Design() = default;
  explicit Design(Matrix dense);
  explicit Design(SparseRows csr);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_sparse() const noexcept { return std::holds_alternative<SparseStore>(store_); }

  /// X * B  (n x q)
  Matrix multiply(const Eigen::Ref<const Matrix>& B) const;
  /// X^T * G  (d x q)
  Matrix transpose_multiply(const Eigen::Ref<const Matrix>& G) const;
  /// x_i^T * B  (1 x q)
  Eigen::RowVectorXd row_times(Index i, const Eigen::Ref<const Matrix>& B) const;
  /// out += x_i * g^T
  /// Dense copy of the given rows (repeats allowed), one row per index.
  Matrix gather_rows(std::span<const Index> rows) const;
  void add_outer(Index i, const Eigen::Ref<const Eigen::RowVectorXd>& g,
                 Eigen::Ref<Matrix> out) const;

  /// ||x_j||_2 for every column j.
  const Vector& column_norms() const noexcept { return column_norms_; }

  /// Columns in the given order; positions must be valid.
  Design select_columns(std::span<const Index> cols) const;

  Matrix to_dense() const;
  const Matrix* dense() const { return std::get_if<Matrix>(&store_); }
  const SparseRows* sparse_rows() const;

 private:
  struct SparseStore {
    SparseRows by_row;
    SparseCols by_col;
  };
  void finish();

  std::variant<Matrix, SparseStore> store_;
  Index rows_ = 0;
  Index cols_ = 0;
  Vector column_norms_;
};

/// Immutable learning problem: design X, targets Y (n x q), and loss kind.
/// For multinomial problems every row of Y is one-hot.
class ProblemData {
 public:
  ProblemData(Design X, Matrix Y, LossKind kind);

  const Design& X() const noexcept { return X_; }
  const Matrix& Y() const noexcept { return Y_; }
  LossKind kind() const noexcept { return kind_; }

  Index n() const noexcept { return X_.rows(); }
  Index d() const noexcept { return X_.cols(); }
  Index q() const noexcept { return Y_.cols(); }

  const Vector& feature_norms() const noexcept { return X_.column_norms(); }

  /// Same targets and loss, keeping only the listed feature columns.
  ProblemData select_features(std::span<const Index> cols) const;

 private:
  Design X_;
  Matrix Y_;
  LossKind kind_;
};

}  // namespace gowl
