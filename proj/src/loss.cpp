#include <gowl/loss.hpp>

#include <cmath>
#include <random>

namespace gowl {
namespace {

constexpr double kSimplexTol = 1e-9;

void check_coefficients(const ProblemData& data, const Eigen::Ref<const Matrix>& B) {
  if (B.rows() != data.d() || B.cols() != data.q()) {
    throw Error("coefficient matrix has wrong dimensions");
  }
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  const double m = z.maxCoeff();
  return m + std::log((z.array() - m).exp().sum());
}

Eigen::RowVectorXd softmax(const Eigen::Ref<const Eigen::RowVectorXd>& z) {
  const double m = z.maxCoeff();
  Eigen::RowVectorXd e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace

double loss_from_predictions(LossKind kind, const Eigen::Ref<const Matrix>& Z,
                             const Eigen::Ref<const Matrix>& Y) {
  switch (kind) {
    case LossKind::squared:
      return 0.5 * (Y - Z).squaredNorm();
    case LossKind::multinomial: {
      double total = 0.0;
      for (Index i = 0; i < Z.rows(); ++i) {
        total += log_sum_exp(Z.row(i)) - Y.row(i).dot(Z.row(i));
      }
      return total;
    }
  }
  throw Error("unsupported loss kind");
}

Eigen::RowVectorXd sample_gradient(LossKind kind,
                                   const Eigen::Ref<const Eigen::RowVectorXd>& z,
                                   const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  switch (kind) {
    case LossKind::squared:
      return z - y;
    case LossKind::multinomial:
      return softmax(z) - y;
  }
  throw Error("unsupported loss kind");
}

DualMatrix dual_from_predictions(LossKind kind, const Eigen::Ref<const Matrix>& Z,
                                 const Eigen::Ref<const Matrix>& Y) {
  if (kind == LossKind::squared) return Z - Y;
  DualMatrix theta(Z.rows(), Z.cols());
  for (Index i = 0; i < Z.rows(); ++i) theta.row(i) = sample_gradient(kind, Z.row(i), Y.row(i));
  return theta;
}

double primal_loss(const ProblemData& data, const Eigen::Ref<const Matrix>& B) {
  check_coefficients(data, B);
  return loss_from_predictions(data.kind(), data.X().multiply(B), data.Y());
}

DualMatrix dual_candidate(const ProblemData& data, const Eigen::Ref<const Matrix>& B) {
  check_coefficients(data, B);
  return dual_from_predictions(data.kind(), data.X().multiply(B), data.Y());
}

double dual_objective(const ProblemData& data, const Eigen::Ref<const Matrix>& theta) {
  const Matrix& Y = data.Y();
  if (theta.rows() != Y.rows() || theta.cols() != Y.cols()) {
    throw Error("dual matrix has wrong dimensions");
  }
  switch (data.kind()) {
    case LossKind::squared:
      return -(0.5 * theta.squaredNorm() + theta.cwiseProduct(Y).sum());
    case LossKind::multinomial: {
      double total = 0.0;
      Eigen::RowVectorXd p(Y.cols());
      for (Index i = 0; i < Y.rows(); ++i) {
        p = theta.row(i) + Y.row(i);
        if (p.minCoeff() < -kSimplexTol) throw Error("infeasible dual point");
        p = p.cwiseMax(0.0);
        const double s = p.sum();
        if (std::abs(s - 1.0) > kSimplexTol) throw Error("infeasible dual point");
        p /= s;
        for (Index j = 0; j < p.size(); ++j) {
          if (p[j] > 0.0) total -= p[j] * std::log(p[j]);
        }
      }
      return total;
    }
  }
  throw Error("unsupported loss kind");
}

CoefficientMatrix loss_gradient(const ProblemData& data, const Eigen::Ref<const Matrix>& B) {
  return data.X().transpose_multiply(dual_candidate(data, B));
}

Matrix batch_residuals(const ProblemData& data, const Eigen::Ref<const Matrix>& Z_batch,
                       std::span<const Index> indices) {
  Matrix G = Z_batch;
  if (data.kind() == LossKind::multinomial) {
    const Eigen::VectorXd shift = G.rowwise().maxCoeff();
    G = (G.colwise() - shift).array().exp().matrix();
    G.array().colwise() /= G.rowwise().sum().array();
  }
  for (Index k = 0; k < G.rows(); ++k) {
    G.row(k) -= data.Y().row(indices[static_cast<std::size_t>(k)]);
  }
  return G;
}

CoefficientMatrix minibatch_gradient(const ProblemData& data,
                                     const Eigen::Ref<const Matrix>& B,
                                     std::span<const Index> indices) {
  check_coefficients(data, B);
  if (indices.empty()) throw Error("empty mini-batch");
  for (Index i : indices) {
    if (i < 0 || i >= data.n()) throw Error("mini-batch index out of range");
  }
  if (data.X().dense()) {
    const Matrix Xb = data.X().gather_rows(indices);
    return Xb.transpose() * batch_residuals(data, Xb * B, indices);
  }
  CoefficientMatrix out = CoefficientMatrix::Zero(data.d(), data.q());
  for (Index i : indices) {
    const Eigen::RowVectorXd z = data.X().row_times(i, B);
    data.X().add_outer(i, sample_gradient(data.kind(), z, data.Y().row(i)), out);
  }
  return out;
}

double strong_concavity_modulus(LossKind kind) {
  switch (kind) {
    case LossKind::squared:
      return 1.0;
    case LossKind::multinomial:
      // Negative entropy is 1-strongly convex on the simplex w.r.t. ||.||_1,
      // hence also w.r.t. ||.||_2.
      return 1.0;
  }
  throw Error("unsupported loss kind");
}

double spectral_norm_squared(const Design& X, double tol, int max_iter) {
  if (X.cols() == 0 || X.rows() == 0) throw Error("degenerate design");
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> normal;
  Matrix v(X.cols(), 1);
  for (Index j = 0; j < v.rows(); ++j) v(j, 0) = normal(rng);
  v /= v.norm();

  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Matrix w = X.transpose_multiply(X.multiply(v));
    const double norm = w.norm();
    if (norm == 0.0) break;
    const double prev = estimate;
    estimate = norm;
    v = w / norm;
    if (std::abs(estimate - prev) <= tol * estimate) break;
  }
  if (!(estimate > 0.0)) throw Error("degenerate design");
  return estimate;
}

double gradient_step_constant(const ProblemData& data) {
  const double s2 = spectral_norm_squared(data.X());
  return data.kind() == LossKind::multinomial ? 0.5 * s2 : s2;
}

}  // namespace gowl
