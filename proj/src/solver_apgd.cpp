#include "solver_state.hpp"

#include <algorithm>
#include <cmath>

namespace gowl {

namespace detail {

void validate_common(const ProblemData& data, const WeightVector& w, double gap_tolerance,
                     Index screen_every) {
  if (w.size() != data.d()) throw Error("weight vector length must equal the number of features");
  if (!(gap_tolerance > 0.0)) throw Error("gap tolerance must be positive");
  if (screen_every < 1) throw Error("screen_every must be at least 1");
}

}  // namespace detail

void SolverTrace::backfill_screening_rate(Index inactive_at_optimum) {
  for (TraceRow& row : rows) {
    if (inactive_at_optimum <= 0) {
      row.screening_rate = 1.0;
    } else {
      row.screening_rate = std::clamp(static_cast<double>(row.screened_cumulative) /
                                          static_cast<double>(inactive_at_optimum),
                                      0.0, 1.0);
    }
  }
}

std::vector<Index> Solution::screened_features() const {
  std::vector<Index> out;
  for (const ScreeningEvent& ev : active_history) {
    out.insert(out.end(), ev.removed.begin(), ev.removed.end());
  }
  return out;
}

std::vector<Index> nonzero_rows(const Eigen::Ref<const Matrix>& B, double tol) {
  std::vector<Index> out;
  for (Index i = 0; i < B.rows(); ++i) {
    if (B.row(i).norm() > tol) out.push_back(i);
  }
  return out;
}

double objective(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                 const WeightVector& w) {
  return primal_loss(data, B) + group_owl_norm(B, w);
}

Solution solve_apgd(const ProblemData& data, const WeightVector& w, const ApgdConfig& config) {
  detail::validate_common(data, w, config.gap_tolerance, config.screen_every);
  if (config.step_size_override && !(*config.step_size_override > 0.0)) {
    throw Error("step size must be positive");
  }
  const double step = config.step_size_override.value_or(1.0 / gradient_step_constant(data));
  const Index d = data.d();

  detail::Stopwatch clock;
  detail::CompactState state(data, w);
  detail::ScreeningSchedule schedule(config.screening_enabled, config.warmup,
                                     config.screen_every);

  CoefficientMatrix B = CoefficientMatrix::Zero(d, data.q());
  Matrix Z = Matrix::Zero(data.n(), data.q());
  CoefficientMatrix B_hat = B;
  Matrix Z_hat = Z;
  bool hat_is_current = true;  // B_hat == B exactly
  double t = 1.0;
  double initial_primal = 0.0;

  Solution sol;
  sol.step_size = step;

  for (Index k = 0;; ++k) {
    const ProblemData& cur = state.data();
    const DualMatrix theta_raw = dual_from_predictions(cur.kind(), Z, cur.Y());
    Matrix grad = cur.X().transpose_multiply(theta_raw);

    DualPoint dp;
    try {
      dp = certify(cur, B, Z, theta_raw, grad, state.w(), config.fault_skip_scaling);
    } catch (const DivergenceError&) {
      throw DivergenceError("step size too large");
    }
    if (k == 0) initial_primal = dp.cert.primal_value;
    sol.final_gap = dp.cert.gap;
    sol.final_primal = dp.cert.primal_value;

    if (dp.cert.gap <= config.gap_tolerance || k >= config.max_outer_iterations) {
      sol.converged = dp.cert.gap <= config.gap_tolerance;
      sol.trace.rows.push_back(detail::make_row(k, clock.seconds(), dp.cert,
                                                state.active().size(), d));
      sol.iterations = k;
      break;
    }

    if (schedule.due(k, dp.cert, initial_primal)) {
      FixpointResult fx = screening_fixpoint(dp.scores, dp.cert, state.active(), state.w(), k);
      if (fx.changed) {
        for (ScreeningEvent& ev : fx.events) sol.active_history.push_back(std::move(ev));
        B = state.shrink(fx, B);
        Z = state.data().X().multiply(B);
        const ProblemData& shrunk = state.data();
        const double after = loss_from_predictions(shrunk.kind(), Z, shrunk.Y()) +
                             group_owl_norm(B, state.w());
        sol.max_restart_increase =
            std::max(sol.max_restart_increase, after - dp.cert.primal_value);
        B_hat = B;
        Z_hat = Z;
        hat_is_current = false;  // grad belongs to the unrestricted B
        t = 1.0;
        ++sol.restarts;
      }
    }
    sol.trace.rows.push_back(detail::make_row(k, clock.seconds(), dp.cert,
                                              state.active().size(), d));

    const ProblemData& active = state.data();
    if (!hat_is_current) {
      grad = active.X().transpose_multiply(dual_from_predictions(active.kind(), Z_hat, active.Y()));
    }
    CoefficientMatrix B_next = group_owl_prox(B_hat - step * grad, state.w(), step);
    if (!B_next.allFinite()) throw DivergenceError("step size too large");
    Matrix Z_next = active.X().multiply(B_next);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    if (beta == 0.0) {
      B_hat = B_next;
      Z_hat = Z_next;
    } else {
      B_hat = B_next + beta * (B_next - B);
      Z_hat = Z_next + beta * (Z_next - Z);
    }
    hat_is_current = beta == 0.0;
    B = std::move(B_next);
    Z = std::move(Z_next);
    t = t_next;
  }

  sol.final_active = state.active();
  sol.B = expand(B, state.active(), d);
  return sol;
}

}  // namespace gowl
