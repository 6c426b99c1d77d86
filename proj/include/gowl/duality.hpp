#pragma once

#include <gowl/loss.hpp>
#include <gowl/penalty.hpp>

namespace gowl {

class ActiveSet;

/// ||x_i^T Theta||_2 per feature.
struct DualScores {
  Vector values;
};

/// Primal/dual values at (B, Theta) and the safe radius sqrt(2 gap / L)
/// bounding ||Theta - Theta*||_F.
struct GapCertificate {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double radius = 0.0;
  double scale = 1.0;
};

/// Scores for every feature column of data.
DualScores dual_scores(const ProblemData& data, const Eigen::Ref<const Matrix>& theta);

/// Scores for the features of `active`, with data holding all d columns.
DualScores dual_scores(const ProblemData& data, const Eigen::Ref<const Matrix>& theta,
                       const ActiveSet& active);

/// Row norms of X^T Theta, when the product is already at hand.
DualScores scores_from_correlations(const Eigen::Ref<const Matrix>& xt_theta);

/**
 * Largest alpha in (0, 1] with alpha * Theta in the dual feasible set, i.e.
 *   sum_{j<=i} alpha * s_[j] <= sum_{j<=i} w_j   for every i,
 * with s sorted non-increasingly. Cumulative sums use compensated summation.
 * Throws when zero weights face nonzero scores.
 */
double feasibility_scale(const DualScores& scores, const WeightVector& w);

/// Largest violation of the cumulative constraints (<= 0 when feasible).
double max_constraint_violation(const DualScores& scores, const WeightVector& w);

/// Certificate for a feasible Theta. Throws "duality violation" when the gap
/// is below -max(1e-10, 64 eps |P|).
GapCertificate duality_gap(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                           const Eigen::Ref<const Matrix>& theta_scaled,
                           const WeightVector& w, double scale = 1.0);

/// Everything a solver needs from one dual evaluation at B.
struct DualPoint {
  DualMatrix theta;     // scaled, feasible
  DualScores scores;    // of the scaled theta
  GapCertificate cert;
};

/**
 * Dual point from predictions Z = XB and correlations X^T Theta_raw that the
 * caller already holds: Theta = alpha * Theta_raw, alpha = feasibility_scale.
 * `skip_scaling` leaves alpha at 1; it exists for fault-injection checks.
 */
DualPoint certify(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                  const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& theta_raw,
                  const Eigen::Ref<const Matrix>& xt_theta_raw, const WeightVector& w,
                  bool skip_scaling = false);

/// certify() computing every product from scratch.
DualPoint certify(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                  const WeightVector& w);

}  // namespace gowl
