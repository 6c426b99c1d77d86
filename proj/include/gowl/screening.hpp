#pragma once

#include <gowl/duality.hpp>

#include <span>
#include <vector>

namespace gowl {

/// Surviving features: original ids (0-based, strictly increasing) and their
/// column norms. Position k of the active set is column k of the compact
/// problem.
class ActiveSet {
 public:
  ActiveSet() = default;
  ActiveSet(std::vector<Index> original_indices, Vector feature_norms);

  /// Every feature of a problem with the given column norms.
  static ActiveSet full(const Vector& feature_norms);

  Index size() const noexcept { return static_cast<Index>(ids_.size()); }
  bool empty() const noexcept { return ids_.empty(); }
  const std::vector<Index>& original_indices() const noexcept { return ids_; }
  const Vector& feature_norms() const noexcept { return norms_; }

  /// Subset given by positions into this set (ascending).
  ActiveSet keep(std::span<const Index> positions) const;

 private:
  std::vector<Index> ids_;
  Vector norms_;
};

struct ScreeningEvent {
  Index outer_iteration = 0;
  std::vector<Index> removed;  // original ids
  Index active_after = 0;
  double gap_at_test = 0.0;
};

/// Original ids of active features with
///   scores[k] + ||x_k|| * radius < w[|A| - 1]
/// (strict). `scores` is aligned with the active positions; w holds at
/// least |A| weights.
std::vector<Index> screening_sweep(const DualScores& scores, double radius,
                                   const ActiveSet& active, const WeightVector& w);

struct FixpointResult {
  ActiveSet active;
  std::vector<Index> kept_positions;  // into the input active set
  std::vector<ScreeningEvent> events;
  bool changed = false;
};

/**
 * Repeats the sweep with the same scores and radius, moving the threshold to
 * the |A'|-th weight after every removal, until a sweep removes nothing.
 * Emits one event per removing sweep, or a single empty event when the first
 * sweep removes nothing.
 */
FixpointResult screening_fixpoint(const DualScores& scores, const GapCertificate& cert,
                                  const ActiveSet& active, const WeightVector& w,
                                  Index outer_iteration);

/// Compact problem over the kept columns: design columns, coefficient rows,
/// and the |keep| largest weights.
struct RestrictedProblem {
  ProblemData data;
  CoefficientMatrix B;
  WeightVector w;
};

RestrictedProblem restrict_problem(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                                   const WeightVector& w, std::span<const Index> keep);

/// Scatter compact rows to their original ids in a d x q zero matrix.
CoefficientMatrix expand(const Eigen::Ref<const Matrix>& B_compact, const ActiveSet& active,
                         Index d);

}  // namespace gowl
