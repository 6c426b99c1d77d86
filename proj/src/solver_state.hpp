#pragma once

// Bookkeeping shared by the batch and stochastic drivers.

#include <gowl/solver.hpp>

#include <chrono>
#include <optional>

namespace gowl::detail {

/// The shrinking problem a solver works on, plus the map back to the
/// original feature ids.
class CompactState {
 public:
  CompactState(const ProblemData& full, const WeightVector& w)
      : full_(full), w_(w), active_(ActiveSet::full(full.feature_norms())) {}

  const ProblemData& data() const { return owned_ ? *owned_ : full_; }
  const WeightVector& w() const { return w_; }
  const ActiveSet& active() const { return active_; }

  /// Drops the screened columns; returns B restricted to the survivors.
  CoefficientMatrix shrink(const FixpointResult& fx, const Eigen::Ref<const Matrix>& B) {
    RestrictedProblem r = restrict_problem(data(), B, w_, fx.kept_positions);
    owned_.emplace(std::move(r.data));
    w_ = std::move(r.w);
    active_ = fx.active;
    return std::move(r.B);
  }

 private:
  const ProblemData& full_;
  std::optional<ProblemData> owned_;
  WeightVector w_;
  ActiveSet active_;
};

/// Latches once the warm-up condition is met.
class ScreeningSchedule {
 public:
  ScreeningSchedule(bool enabled, const Warmup& warmup, Index every)
      : enabled_(enabled), warmup_(warmup), every_(every) {}

  bool due(Index outer, const GapCertificate& cert, double initial_primal) {
    if (!enabled_) return false;
    if (!started_) {
      const double bar = warmup_.gap_below.value_or(warmup_.gap_ratio * initial_primal);
      if (outer > warmup_.iterations || cert.gap <= bar) {
        started_ = true;
        first_ = outer;
      }
    }
    return started_ && (outer - first_) % every_ == 0;
  }

 private:
  bool enabled_;
  Warmup warmup_;
  Index every_;
  bool started_ = false;
  Index first_ = 0;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline TraceRow make_row(Index iteration, double seconds, const GapCertificate& cert,
                         Index active, Index d) {
  TraceRow row;
  row.iteration = iteration;
  row.wall_time_s = seconds;
  row.primal = cert.primal_value;
  row.dual = cert.dual_value;
  row.gap = cert.gap;
  row.active_count = active;
  row.screened_cumulative = d - active;
  return row;
}

void validate_common(const ProblemData& data, const WeightVector& w, double gap_tolerance,
                     Index screen_every);

}  // namespace gowl::detail
