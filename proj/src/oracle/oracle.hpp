#pragma once

// Brute-force reference computations. Nothing here calls the production
// prox, PAVA or screening code.

#include <gowl/problem.hpp>

namespace gowl::oracle {

/// Isotonic (non-increasing) least squares by enumerating every split of
/// the sequence into consecutive blocks. Exponential; n <= 16.
Vector pava_enumerate(const Vector& z);

/// 1/2 ||x - v||^2 + t * sum_i w_i |x|_[i]
double owl_prox_objective(const Vector& x, const Vector& v, const Vector& w, double t);

/// 1/2 ||X - B||_F^2 + t * sum_i w_i ||X||_[i]
double group_prox_objective(const Matrix& X, const Matrix& B, const Vector& w, double t);

/**
 * Exact OWL prox by enumerating every ordered partition of the coordinates
 * into equal-magnitude clusters (the last possibly pinned at zero) and
 * keeping the candidate with the lowest objective. d <= 7.
 */
Vector owl_prox_enumerate(const Vector& v, const Vector& w, double t);

/// Group prox through the enumerated vector prox on row norms, scaling each
/// row along its own direction.
Matrix group_prox_enumerate(const Matrix& B, const Vector& w, double t);

/// Central finite differences of F(B) (the smooth loss only).
Matrix finite_difference_gradient(const ProblemData& data, const Matrix& B, double h = 1e-6);

/// F(B) evaluated densely from scratch.
double dense_loss(const Matrix& X, const Matrix& Y, LossKind kind, const Matrix& B);

/// sigma_max(X)^2 from a full SVD.
double svd_sigma_max_squared(const Matrix& X);

/// Least squares through the normal equations (X^T X) B = X^T Y.
Matrix normal_equations(const Matrix& X, const Matrix& Y);

/// Largest alpha on a uniform grid of `steps` points in (0, 1] for which
/// every cumulative constraint holds for alpha * scores.
double grid_feasibility_scale(const Vector& scores, const Vector& w, int steps);

/// Row norms of X^T Theta computed with explicit loops.
Vector dense_scores(const Matrix& X, const Matrix& theta);

}  // namespace gowl::oracle
