#pragma once

#include <gowl/problem.hpp>

#include <span>

namespace gowl {

// Losses are sums over samples, F(B) = sum_i f_i(x_i^T B):
//   squared:      f_i(z) = 1/2 ||Y_i - z||^2
//   multinomial:  f_i(z) = -<Y_i, z> + log sum_j exp(z_j)

/// F(B).
double primal_loss(const ProblemData& data, const Eigen::Ref<const Matrix>& B);

/// Row i is grad f_i(x_i^T B): XB - Y, or softmax(XB) - Y.
DualMatrix dual_candidate(const ProblemData& data, const Eigen::Ref<const Matrix>& B);

/**
 * D(Theta) = -sum_i f*_i(Theta_i).
 *
 * Multinomial points need Theta_i + Y_i on the probability simplex; entries
 * down to -1e-9 are clipped and row sums within 1e-9 of one renormalized.
 * Anything further out throws "infeasible dual point".
 */
double dual_objective(const ProblemData& data, const Eigen::Ref<const Matrix>& theta);

/// grad F(B) = X^T dual_candidate(B).
CoefficientMatrix loss_gradient(const ProblemData& data, const Eigen::Ref<const Matrix>& B);

/// Partial-sum gradient sum_{i in indices} x_i grad f_i(x_i^T B). Repeated
/// indices count once per occurrence.
CoefficientMatrix minibatch_gradient(const ProblemData& data,
                                     const Eigen::Ref<const Matrix>& B,
                                     std::span<const Index> indices);

/// Strong-concavity modulus of the dual objective. Both losses give 1.
double strong_concavity_modulus(LossKind kind);

/// Lipschitz constant of grad F: sigma_max(X)^2, halved for multinomial.
/// Throws "degenerate design" for a zero matrix.
double gradient_step_constant(const ProblemData& data);

/// Largest singular value of X squared, by power iteration on X^T X.
double spectral_norm_squared(const Design& X, double tol = 1e-6, int max_iter = 500);

// Forms taking the linear predictor Z = XB directly, for solvers that cache Z.
double loss_from_predictions(LossKind kind, const Eigen::Ref<const Matrix>& Z,
                             const Eigen::Ref<const Matrix>& Y);
DualMatrix dual_from_predictions(LossKind kind, const Eigen::Ref<const Matrix>& Z,
                                 const Eigen::Ref<const Matrix>& Y);
/// Row k holds grad f_i at Z_batch.row(k), with i = indices[k].
Matrix batch_residuals(const ProblemData& data, const Eigen::Ref<const Matrix>& Z_batch,
                       std::span<const Index> indices);
/// grad f_i at the single row z.
Eigen::RowVectorXd sample_gradient(LossKind kind, const Eigen::Ref<const Eigen::RowVectorXd>& z,
                                   const Eigen::Ref<const Eigen::RowVectorXd>& y);

}  // namespace gowl
