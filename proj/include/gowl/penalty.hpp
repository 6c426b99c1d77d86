#pragma once

#include <gowl/types.hpp>

namespace gowl {

/// Euclidean projection of z onto the cone of non-increasing sequences
/// (pool adjacent violators). Throws on an empty input.
Vector pava_nonincreasing(const Eigen::Ref<const Vector>& z);

/**
 * Proximal operator of t * OWL at v:
 *   argmin_x 1/2 ||x - v||^2 + t * sum_i w_i |x|_[i]
 * where |x|_[1] >= |x|_[2] >= ... Ties in |v| are broken by index so the
 * result is deterministic.
 */
Vector owl_prox(const Eigen::Ref<const Vector>& v, const WeightVector& w,
                double t);

/// Row-wise Group OWL prox: row norms go through owl_prox, directions kept.
/// Zero rows stay zero.
CoefficientMatrix group_owl_prox(const Eigen::Ref<const Matrix>& B,
                                 const WeightVector& w, double t);

/// sum_i w_i * r_[i] over the sorted row norms r of B.
double group_owl_norm(const Eigen::Ref<const Matrix>& B,
                      const WeightVector& w);

/// OWL norm of a nonnegative vector of magnitudes (sorted internally).
double owl_norm(const Eigen::Ref<const Vector>& magnitudes,
                const WeightVector& w);

}  // namespace gowl
