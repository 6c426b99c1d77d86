#include <gowl/screening.hpp>

#include <numeric>

namespace gowl {

ActiveSet::ActiveSet(std::vector<Index> original_indices, Vector feature_norms)
    : ids_(std::move(original_indices)), norms_(std::move(feature_norms)) {
  if (static_cast<Index>(ids_.size()) != norms_.size()) {
    throw Error("active set: ids and norms differ in length");
  }
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    if (ids_[k] < 0 || (k > 0 && ids_[k] <= ids_[k - 1])) {
      throw Error("active set ids must be strictly increasing and nonnegative");
    }
  }
}

ActiveSet ActiveSet::full(const Vector& feature_norms) {
  std::vector<Index> ids(static_cast<std::size_t>(feature_norms.size()));
  std::iota(ids.begin(), ids.end(), Index{0});
  return ActiveSet(std::move(ids), feature_norms);
}

ActiveSet ActiveSet::keep(std::span<const Index> positions) const {
  std::vector<Index> ids;
  ids.reserve(positions.size());
  Vector norms(static_cast<Index>(positions.size()));
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Index p = positions[k];
    if (p < 0 || p >= size()) throw Error("active set position out of range");
    ids.push_back(ids_[static_cast<std::size_t>(p)]);
    norms[static_cast<Index>(k)] = norms_[p];
  }
  return ActiveSet(std::move(ids), std::move(norms));
}

std::vector<Index> screening_sweep(const DualScores& scores, double radius,
                                   const ActiveSet& active, const WeightVector& w) {
  if (scores.values.size() != active.size()) throw Error("scores and active set differ in length");
  std::vector<Index> out;
  if (active.empty()) return out;
  if (w.size() < active.size()) throw Error("fewer weights than active features");
  const double threshold = w[active.size() - 1];
  for (Index k = 0; k < active.size(); ++k) {
    if (scores.values[k] + active.feature_norms()[k] * radius < threshold) {
      out.push_back(active.original_indices()[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

FixpointResult screening_fixpoint(const DualScores& scores, const GapCertificate& cert,
                                  const ActiveSet& active, const WeightVector& w,
                                  Index outer_iteration) {
  const Index d = active.size();
  if (scores.values.size() != d) throw Error("scores and active set differ in length");
  if (w.size() < d) throw Error("fewer weights than active features");

  std::vector<char> alive(static_cast<std::size_t>(d), 1);
  Index remaining = d;
  FixpointResult result;

  while (remaining > 0) {
    const double threshold = w[remaining - 1];
    ScreeningEvent ev;
    ev.outer_iteration = outer_iteration;
    ev.gap_at_test = cert.gap;
    for (Index k = 0; k < d; ++k) {
      if (!alive[static_cast<std::size_t>(k)]) continue;
      if (scores.values[k] + active.feature_norms()[k] * cert.radius < threshold) {
        alive[static_cast<std::size_t>(k)] = 0;
        ev.removed.push_back(active.original_indices()[static_cast<std::size_t>(k)]);
      }
    }
    if (ev.removed.empty()) break;
    remaining -= static_cast<Index>(ev.removed.size());
    ev.active_after = remaining;
    result.events.push_back(std::move(ev));
    // Same scores against the same threshold cannot remove anything more.
    if (remaining > 0 && w[remaining - 1] == threshold) break;
  }

  if (result.events.empty()) {
    ScreeningEvent ev;
    ev.outer_iteration = outer_iteration;
    ev.gap_at_test = cert.gap;
    ev.active_after = d;
    result.events.push_back(std::move(ev));
  }

  for (Index k = 0; k < d; ++k) {
    if (alive[static_cast<std::size_t>(k)]) result.kept_positions.push_back(k);
  }
  result.changed = remaining != d;
  result.active = result.changed ? active.keep(result.kept_positions) : active;
  return result;
}

RestrictedProblem restrict_problem(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                                   const WeightVector& w, std::span<const Index> keep) {
  if (B.rows() != data.d() || w.size() != data.d()) throw Error("restrict: dimension mismatch");
  CoefficientMatrix compact(static_cast<Index>(keep.size()), B.cols());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] < 0 || keep[k] >= data.d()) throw Error("restrict: index out of range");
    compact.row(static_cast<Index>(k)) = B.row(keep[k]);
  }
  return RestrictedProblem{data.select_features(keep), std::move(compact),
                           w.head(static_cast<Index>(keep.size()))};
}

CoefficientMatrix expand(const Eigen::Ref<const Matrix>& B_compact, const ActiveSet& active,
                         Index d) {
  if (B_compact.rows() != active.size()) throw Error("expand: row count differs from active set");
  CoefficientMatrix out = CoefficientMatrix::Zero(d, B_compact.cols());
  for (Index k = 0; k < active.size(); ++k) {
    const Index id = active.original_indices()[static_cast<std::size_t>(k)];
    if (id < 0 || id >= d) throw Error("expand: index out of range");
    out.row(id) = B_compact.row(k);
  }
  return out;
}

}  // namespace gowl
