#include <gowl/problem.hpp>

#include <cmath>

namespace gowl {

Design::Design(Matrix dense) : store_(std::move(dense)) { finish(); }

Design::Design(SparseRows csr) {
  csr.makeCompressed();
  SparseStore s{std::move(csr), SparseCols()};
  s.by_col = s.by_row;
  s.by_col.makeCompressed();
  store_ = std::move(s);
  finish();
}

void Design::finish() {
  if (const Matrix* m = dense()) {
    rows_ = m->rows();
    cols_ = m->cols();
    if (!m->allFinite()) throw Error("design matrix has non-finite entries");
    column_norms_ = m->colwise().norm().transpose();
    return;
  }
  const auto& s = std::get<SparseStore>(store_);
  rows_ = s.by_row.rows();
  cols_ = s.by_row.cols();
  column_norms_ = Vector::Zero(cols_);
  for (Index j = 0; j < cols_; ++j) {
    double acc = 0.0;
    for (SparseCols::InnerIterator it(s.by_col, j); it; ++it) {
      if (!std::isfinite(it.value())) throw Error("design matrix has non-finite entries");
      acc += it.value() * it.value();
    }
    column_norms_[j] = std::sqrt(acc);
  }
}

const Design::SparseRows* Design::sparse_rows() const {
  const auto* s = std::get_if<SparseStore>(&store_);
  return s ? &s->by_row : nullptr;
}

Matrix Design::multiply(const Eigen::Ref<const Matrix>& B) const {
  if (B.rows() != cols_) throw Error("X * B: dimension mismatch");
  if (const Matrix* m = dense()) return (*m) * B;
  return std::get<SparseStore>(store_).by_row * B;
}

Matrix Design::transpose_multiply(const Eigen::Ref<const Matrix>& G) const {
  if (G.rows() != rows_) throw Error("X^T * G: dimension mismatch");
  if (const Matrix* m = dense()) return m->transpose() * G;
  return std::get<SparseStore>(store_).by_col.transpose() * G;
}

Eigen::RowVectorXd Design::row_times(Index i,
                                     const Eigen::Ref<const Matrix>& B) const {
  if (const Matrix* m = dense()) return m->row(i) * B;
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(B.cols());
  for (SparseRows::InnerIterator it(std::get<SparseStore>(store_).by_row, i); it; ++it) {
    out.noalias() += it.value() * B.row(it.index());
  }
  return out;
}

Matrix Design::gather_rows(std::span<const Index> rows) const {
  const Index b = static_cast<Index>(rows.size());
  Matrix out(b, cols_);
  if (const Matrix* m = dense()) {
    // Column-major source: walk each column once.
    for (Index j = 0; j < cols_; ++j) {
      for (Index k = 0; k < b; ++k) out(k, j) = (*m)(rows[static_cast<std::size_t>(k)], j);
    }
    return out;
  }
  out.setZero();
  const SparseRows& csr = std::get<SparseStore>(store_).by_row;
  for (Index k = 0; k < b; ++k) {
    for (SparseRows::InnerIterator it(csr, rows[static_cast<std::size_t>(k)]); it; ++it) {
      out(k, it.index()) = it.value();
    }
  }
  return out;
}

void Design::add_outer(Index i, const Eigen::Ref<const Eigen::RowVectorXd>& g,
                       Eigen::Ref<Matrix> out) const {
  if (const Matrix* m = dense()) {
    out.noalias() += m->row(i).transpose() * g;
    return;
  }
  for (SparseRows::InnerIterator it(std::get<SparseStore>(store_).by_row, i); it; ++it) {
    out.row(it.index()).noalias() += it.value() * g;
  }
}

Design Design::select_columns(std::span<const Index> cols) const {
  for (Index c : cols) {
    if (c < 0 || c >= cols_) throw Error("column index out of range");
  }
  if (const Matrix* m = dense()) {
    Matrix out(rows_, static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m->col(cols[k]);
    return Design(std::move(out));
  }
  const SparseCols& src = std::get<SparseStore>(store_).by_col;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    for (SparseCols::InnerIterator it(src, cols[k]); it; ++it) {
      triplets.emplace_back(it.index(), static_cast<Index>(k), it.value());
    }
  }
  SparseRows out(rows_, static_cast<Index>(cols.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return Design(std::move(out));
}

Matrix Design::to_dense() const {
  if (const Matrix* m = dense()) return *m;
  return Matrix(std::get<SparseStore>(store_).by_row);
}

ProblemData::ProblemData(Design X, Matrix Y, LossKind kind)
    : X_(std::move(X)), Y_(std::move(Y)), kind_(kind) {
  if (Y_.rows() != X_.rows()) throw Error("X and Y must have the same number of rows");
  if (Y_.cols() < 1) throw Error("Y must have at least one column");
  if (!Y_.allFinite()) throw Error("targets have non-finite entries");
  if (kind_ == LossKind::multinomial) {
    for (Index i = 0; i < Y_.rows(); ++i) {
      double sum = 0.0;
      for (Index j = 0; j < Y_.cols(); ++j) {
        const double y = Y_(i, j);
        if (y != 0.0 && y != 1.0) throw Error("multinomial targets must be one-hot");
        sum += y;
      }
      if (sum != 1.0) throw Error("multinomial targets must be one-hot");
    }
  }
}

ProblemData ProblemData::select_features(std::span<const Index> cols) const {
  return ProblemData(X_.select_columns(cols), Y_, kind_);
}

}  // namespace gowl
