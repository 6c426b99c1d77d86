#pragma once

#include <gowl/screening.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace gowl {

/// Screening is skipped until the outer iteration exceeds `iterations`, or
/// the gap first drops to `gap_below` (default: gap_ratio times the primal
/// value at the zero start), whichever comes first.
struct Warmup {
  Index iterations = 10;
  double gap_ratio = 10.0;
  std::optional<double> gap_below;
};

struct TraceRow {
  Index iteration = 0;
  double wall_time_s = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  Index active_count = 0;
  Index screened_cumulative = 0;
  /// Fraction of the optimum's inactive features screened so far. NaN until
  /// backfilled, since it needs the optimum's support.
  double screening_rate = std::numeric_limits<double>::quiet_NaN();
};

struct SolverTrace {
  std::vector<TraceRow> rows;

  /// Fills screening_rate = screened / inactive_at_optimum, clamped to
  /// [0, 1]; 1 when the optimum has no inactive features.
  void backfill_screening_rate(Index inactive_at_optimum);
};

struct ApgdConfig {
  Index max_outer_iterations = 100000;
  double gap_tolerance = 1e-6;
  bool screening_enabled = true;
  Warmup warmup;
  Index screen_every = 1;
  std::optional<double> step_size_override;
  /// Test-only fault injection: use unscaled (possibly infeasible) dual points.
  bool fault_skip_scaling = false;
};

struct SpgdConfig {
  /// 0 picks min(32, n).
  Index batch_size = 0;
  Index inner_iterations = 30;
  /// Defaults to 1 / (inner_iterations * L_F).
  std::optional<double> step_size;
  Index max_outer_iterations = 100000;
  double gap_tolerance = 1e-6;
  std::uint64_t seed = 0;
  bool screening_enabled = true;
  Warmup warmup;
  Index screen_every = 1;
  bool fault_skip_scaling = false;
};

struct Solution {
  CoefficientMatrix B;  // d x q, screened rows are zero
  Index iterations = 0;
  double final_gap = 0.0;
  double final_primal = 0.0;
  bool converged = false;
  SolverTrace trace;
  std::vector<ScreeningEvent> active_history;  // events that removed features
  ActiveSet final_active;
  double step_size = 0.0;
  Index restarts = 0;
  /// Largest objective increase caused by dropping screened rows.
  double max_restart_increase = 0.0;
  /// Every feature id screened during the run, in removal order.
  std::vector<Index> screened_features() const;
};

/// Accelerated proximal gradient with dynamic safe screening. Starts from
/// B = 0; restarts momentum whenever the active set shrinks.
Solution solve_apgd(const ProblemData& data, const WeightVector& w, const ApgdConfig& config);

/// Variance-reduced stochastic proximal gradient with screening at every
/// outer (snapshot) iteration.
Solution solve_spgd(const ProblemData& data, const WeightVector& w, const SpgdConfig& config);

/// Stochastic direction of one inner step:
///   (grad F_I(B_inner) - grad F_I(B_snapshot)) / |I| + full_grad
/// with grad F_I the partial sum over the mini-batch I.
CoefficientMatrix variance_reduced_direction(const ProblemData& data,
                                             const Eigen::Ref<const Matrix>& B_inner,
                                             const Eigen::Ref<const Matrix>& B_snapshot,
                                             const Eigen::Ref<const Matrix>& full_grad,
                                             std::span<const Index> minibatch);

/// Rows of B with L2 norm above `tol`.
std::vector<Index> nonzero_rows(const Eigen::Ref<const Matrix>& B, double tol = 0.0);

/// P(B) = F(B) + J(B).
double objective(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                 const WeightVector& w);

}  // namespace gowl
