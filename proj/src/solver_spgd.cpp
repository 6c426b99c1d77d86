#include "solver_state.hpp"

#include <algorithm>
#include <random>

namespace gowl {

CoefficientMatrix variance_reduced_direction(const ProblemData& data,
                                             const Eigen::Ref<const Matrix>& B_inner,
                                             const Eigen::Ref<const Matrix>& B_snapshot,
                                             const Eigen::Ref<const Matrix>& full_grad,
                                             std::span<const Index> minibatch) {
  const double inv_batch = 1.0 / static_cast<double>(minibatch.size());
  if (data.X().dense()) {
    // One gather serves both gradients; equal iterates cancel exactly.
    const Matrix Xb = data.X().gather_rows(minibatch);
    const Matrix diff = data.kind() == LossKind::squared
                            ? Matrix(Xb * (B_inner - B_snapshot))  // residuals are affine in B
                            : Matrix(batch_residuals(data, Xb * B_inner, minibatch) -
                                     batch_residuals(data, Xb * B_snapshot, minibatch));
    return (Xb.transpose() * diff) * inv_batch + full_grad;
  }
  return (minibatch_gradient(data, B_inner, minibatch) -
          minibatch_gradient(data, B_snapshot, minibatch)) *
             inv_batch +
         full_grad;
}

Solution solve_spgd(const ProblemData& data, const WeightVector& w, const SpgdConfig& config) {
  detail::validate_common(data, w, config.gap_tolerance, config.screen_every);
  const Index n = data.n();
  const Index d = data.d();
  const Index batch = config.batch_size == 0 ? std::min<Index>(32, n) : config.batch_size;
  if (batch < 1 || batch > n) throw Error("batch size must lie in [1, n]");
  if (config.inner_iterations < 1) throw Error("inner iterations must be at least 1");
  if (config.step_size && !(*config.step_size > 0.0)) throw Error("step size must be positive");
  const double gamma = config.step_size.value_or(
      1.0 / (static_cast<double>(config.inner_iterations) * gradient_step_constant(data)));

  detail::Stopwatch clock;
  detail::CompactState state(data, w);
  detail::ScreeningSchedule schedule(config.screening_enabled, config.warmup,
                                     config.screen_every);
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Index> minibatch(static_cast<std::size_t>(batch));

  CoefficientMatrix B = CoefficientMatrix::Zero(d, data.q());
  double initial_primal = 0.0;
  Solution sol;
  sol.step_size = gamma;

  for (Index k = 0;; ++k) {
    Matrix Z = state.data().X().multiply(B);
    DualMatrix theta_raw = dual_from_predictions(data.kind(), Z, data.Y());
    Matrix full_grad = state.data().X().transpose_multiply(theta_raw);

    DualPoint dp;
    try {
      dp = certify(state.data(), B, Z, theta_raw, full_grad, state.w(),
                   config.fault_skip_scaling);
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
        theta_raw = dual_from_predictions(data.kind(), Z, data.Y());
        full_grad = state.data().X().transpose_multiply(theta_raw);
        const double after = loss_from_predictions(data.kind(), Z, data.Y()) +
                             group_owl_norm(B, state.w());
        sol.max_restart_increase =
            std::max(sol.max_restart_increase, after - dp.cert.primal_value);
        ++sol.restarts;
      }
    }
    sol.trace.rows.push_back(detail::make_row(k, clock.seconds(), dp.cert,
                                              state.active().size(), d));

    const ProblemData& active = state.data();
    CoefficientMatrix B_inner = B;
    for (Index t = 0; t < config.inner_iterations; ++t) {
      for (Index& i : minibatch) i = pick(rng);
      const CoefficientMatrix v =
          variance_reduced_direction(active, B_inner, B, full_grad, minibatch);
      B_inner = group_owl_prox(B_inner - gamma * v, state.w(), gamma);
    }
    if (!B_inner.allFinite()) throw DivergenceError("step size too large");
    B = std::move(B_inner);
  }

  sol.final_active = state.active();
  sol.B = expand(B, state.active(), d);
  return sol;
}

}  // namespace gowl
