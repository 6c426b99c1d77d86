#include <gowl/data.hpp>
#include <gowl/solver.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>

using namespace gowl;

namespace {

ApgdConfig apgd_config(double tol, bool screening) {
  ApgdConfig c;
  c.gap_tolerance = tol;
  c.screening_enabled = screening;
  return c;
}

SpgdConfig spgd_config(double tol, bool screening, std::uint64_t seed = 1) {
  SpgdConfig c;
  c.gap_tolerance = tol;
  c.screening_enabled = screening;
  c.seed = seed;
  return c;
}

SyntheticProblem small_synthetic(LossKind kind, std::uint64_t seed, Index n = 40, Index d = 60) {
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.q = 3;
  spec.support_size = 6;
  spec.group_count = 2;
  spec.seed = seed;
  return synth_correlated(spec, kind);
}

WeightVector tuned_weights(const ProblemData& data, double p) {
  return oscar_weights(data.d(), OscarSpec::scaled(p), &data);
}

}  // namespace

TEST(Apgd, ZeroWeightsGiveLeastSquares) {
  std::mt19937_64 rng(31);
  const ProblemData data = fixtures::random_problem(rng, 30, 10, 2, LossKind::squared);
  const WeightVector w(Vector::Zero(10));
  ApgdConfig c = apgd_config(1e-12, true);
  c.max_outer_iterations = 3000;
  const Solution sol = solve_apgd(data, w, c);
  const Matrix ref = oracle::normal_equations(data.X().to_dense(), data.Y());
  EXPECT_LT((sol.B - ref).cwiseAbs().maxCoeff(), 1e-5);
  // Only Theta = 0 is dual feasible, so the certificate stays loose.
  EXPECT_FALSE(sol.converged);
  EXPECT_TRUE(sol.active_history.empty());
}

TEST(Apgd, ScreeningDoesNotChangeTheSolution) {
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    const SyntheticProblem sp = small_synthetic(kind, 32);
    const WeightVector w = tuned_weights(sp.data, 0.1);
    const Solution on = solve_apgd(sp.data, w, apgd_config(1e-10, true));
    const Solution off = solve_apgd(sp.data, w, apgd_config(1e-10, false));
    ASSERT_TRUE(on.converged);
    ASSERT_TRUE(off.converged);
    EXPECT_NEAR(objective(sp.data, on.B, w), objective(sp.data, off.B, w), 1e-8);
    EXPECT_FALSE(on.screened_features().empty()) << to_string(kind);
    EXPECT_TRUE(off.screened_features().empty());
    EXPECT_LE(on.final_gap, 1e-10);
  }
}

TEST(Apgd, ScreenedFeaturesAreZeroAtAHighAccuracyReference) {
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const SyntheticProblem sp = small_synthetic(kind, 100 + seed);
      const WeightVector w = tuned_weights(sp.data, 0.05 + 0.05 * static_cast<double>(seed));
      const Solution ref = solve_apgd(sp.data, w, apgd_config(1e-11, false));
      const Solution run = solve_apgd(sp.data, w, apgd_config(1e-6, true));
      ASSERT_TRUE(ref.converged);
      for (Index id : run.screened_features()) {
        EXPECT_LT(ref.B.row(id).norm(), 1e-6) << "feature " << id;
      }
    }
  }
}

TEST(Apgd, TraceIsConsistent) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 33);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const Solution sol = solve_apgd(sp.data, w, apgd_config(1e-6, true));
  ASSERT_TRUE(sol.converged);
  ASSERT_EQ(static_cast<Index>(sol.trace.rows.size()), sol.iterations + 1);
  EXPECT_LE(sol.trace.rows.back().gap, 1e-6);
  Index previous_active = sp.data.d();
  for (std::size_t k = 0; k < sol.trace.rows.size(); ++k) {
    const TraceRow& row = sol.trace.rows[k];
    EXPECT_EQ(row.iteration, static_cast<Index>(k));
    EXPECT_GE(row.gap, -1e-10);
    EXPECT_LE(row.active_count, previous_active);
    EXPECT_EQ(row.active_count + row.screened_cumulative, sp.data.d());
    previous_active = row.active_count;
  }
  EXPECT_EQ(sol.final_active.size(), sol.trace.rows.back().active_count);
}

TEST(Apgd, ScreeningDoesNotSlowConvergenceMuch) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 34, 50, 200);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const Solution on = solve_apgd(sp.data, w, apgd_config(1e-8, true));
  const Solution off = solve_apgd(sp.data, w, apgd_config(1e-8, false));
  EXPECT_LE(static_cast<double>(on.iterations), 1.1 * static_cast<double>(off.iterations) + 10.0);
}

TEST(Apgd, IterationCapReportsNotConverged) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 35);
  ApgdConfig c = apgd_config(1e-12, true);
  c.max_outer_iterations = 3;
  const Solution sol = solve_apgd(sp.data, tuned_weights(sp.data, 0.1), c);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 3);
}

TEST(Apgd, RejectsBadConfiguration) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 36);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  ApgdConfig c;
  c.gap_tolerance = 0.0;
  EXPECT_THROW(solve_apgd(sp.data, w, c), Error);
  c = ApgdConfig{};
  c.step_size_override = -1.0;
  EXPECT_THROW(solve_apgd(sp.data, w, c), Error);
  EXPECT_THROW(solve_apgd(sp.data, WeightVector(Vector::Ones(3)), ApgdConfig{}), Error);
}

TEST(Apgd, OversizedStepDiverges) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 37);
  ApgdConfig c = apgd_config(1e-6, false);
  c.step_size_override = 1e3;
  c.max_outer_iterations = 100000;
  EXPECT_THROW(solve_apgd(sp.data, tuned_weights(sp.data, 0.01), c), DivergenceError);
}

TEST(Spgd, FullBatchSingleInnerStepIsOneProximalGradientStep) {
  const SyntheticProblem sp = small_synthetic(LossKind::multinomial, 38);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const double gamma = 0.5 / gradient_step_constant(sp.data);

  SpgdConfig s = spgd_config(1e-12, false);
  s.batch_size = sp.data.n();
  s.inner_iterations = 1;
  s.step_size = gamma;
  s.max_outer_iterations = 1;
  const Solution spgd = solve_spgd(sp.data, w, s);

  const Matrix B0 = Matrix::Zero(sp.data.d(), sp.data.q());
  const Matrix direct = group_owl_prox(B0 - gamma * loss_gradient(sp.data, B0), w, gamma);
  EXPECT_LT((spgd.B - direct).cwiseAbs().maxCoeff(), 1e-10);

  ApgdConfig a = apgd_config(1e-12, false);
  a.step_size_override = gamma;
  a.max_outer_iterations = 1;
  EXPECT_LT((solve_apgd(sp.data, w, a).B - direct).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spgd, DirectionIsExactAtTheSnapshot) {
  std::mt19937_64 rng(39);
  const ProblemData data = fixtures::random_problem(rng, 20, 6, 3, LossKind::multinomial);
  const Matrix B = fixtures::random_matrix(rng, 6, 3);
  const Matrix g = loss_gradient(data, B);
  const std::vector<Index> batch{3, 3, 7, 19};
  EXPECT_EQ(variance_reduced_direction(data, B, B, g, batch), g);
}

TEST(Spgd, DirectionHasTheExpectedMean) {
  // E[v] = (grad F(B_inner) - grad F(B)) / n + grad F(B) for uniform draws
  // with replacement.
  std::mt19937_64 rng(40);
  const Index n = 15;
  const ProblemData data = fixtures::random_problem(rng, n, 4, 2, LossKind::squared);
  const Matrix B = fixtures::random_matrix(rng, 4, 2);
  const Matrix B_inner = fixtures::random_matrix(rng, 4, 2);
  const Matrix g = loss_gradient(data, B);
  const Matrix expected = (loss_gradient(data, B_inner) - g) / static_cast<double>(n) + g;

  const int draws = 10000;
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<Index> batch(5);
  Matrix sum = Matrix::Zero(4, 2);
  Matrix sum_sq = Matrix::Zero(4, 2);
  for (int k = 0; k < draws; ++k) {
    for (Index& i : batch) i = pick(rng);
    const Matrix v = variance_reduced_direction(data, B_inner, B, g, batch);
    sum += v;
    sum_sq += v.cwiseProduct(v);
  }
  const Matrix mean = sum / draws;
  const Matrix var = sum_sq / draws - mean.cwiseProduct(mean);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const double se = std::sqrt(std::max(var(i, j), 0.0) / draws);
      EXPECT_LE(std::abs(mean(i, j) - expected(i, j)), 3.0 * se + 1e-12) << i << "," << j;
    }
  }
}

TEST(Spgd, SameSeedGivesIdenticalRuns) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 41);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const Solution a = solve_spgd(sp.data, w, spgd_config(1e-6, true, 9));
  const Solution b = solve_spgd(sp.data, w, spgd_config(1e-6, true, 9));
  ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
  EXPECT_EQ(a.B, b.B);
  for (std::size_t k = 0; k < a.trace.rows.size(); ++k) {
    EXPECT_EQ(a.trace.rows[k].primal, b.trace.rows[k].primal);
    EXPECT_EQ(a.trace.rows[k].dual, b.trace.rows[k].dual);
    EXPECT_EQ(a.trace.rows[k].active_count, b.trace.rows[k].active_count);
  }
  EXPECT_EQ(a.screened_features(), b.screened_features());
}

TEST(Spgd, AgreesWithApgd) {
  SyntheticSpec spec;
  spec.n = 200;
  spec.d = 50;
  spec.q = 2;
  spec.support_size = 8;
  spec.group_count = 2;
  spec.seed = 42;
  const SyntheticProblem sp = synth_correlated(spec, LossKind::squared);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const Solution s = solve_spgd(sp.data, w, spgd_config(1e-7, true, 3));
  const Solution a = solve_apgd(sp.data, w, apgd_config(1e-7, true));
  ASSERT_TRUE(s.converged);
  ASSERT_TRUE(a.converged);
  EXPECT_NEAR(objective(sp.data, s.B, w), objective(sp.data, a.B, w), 1e-5);
}

TEST(Spgd, ScreeningDoesNotChangeTheObjective) {
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    const SyntheticProblem sp = small_synthetic(kind, 43);
    const WeightVector w = tuned_weights(sp.data, 0.1);
    const Solution on = solve_spgd(sp.data, w, spgd_config(1e-10, true));
    const Solution off = solve_spgd(sp.data, w, spgd_config(1e-10, false));
    ASSERT_TRUE(on.converged);
    ASSERT_TRUE(off.converged);
    EXPECT_NEAR(objective(sp.data, on.B, w), objective(sp.data, off.B, w), 1e-8);
  }
}

TEST(Spgd, RejectsBadConfiguration) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 44);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  SpgdConfig c;
  c.batch_size = sp.data.n() + 1;
  EXPECT_THROW(solve_spgd(sp.data, w, c), Error);
  c = SpgdConfig{};
  c.inner_iterations = 0;
  EXPECT_THROW(solve_spgd(sp.data, w, c), Error);
  c = SpgdConfig{};
  c.step_size = 0.0;
  EXPECT_THROW(solve_spgd(sp.data, w, c), Error);
}

TEST(Restriction, SolvingTheRestrictedProblemMatchesTheFullSolve) {
  const SyntheticProblem sp = small_synthetic(LossKind::squared, 45);
  const WeightVector w = tuned_weights(sp.data, 0.1);
  const Solution full = solve_apgd(sp.data, w, apgd_config(1e-11, false));
  const std::vector<Index> keep = nonzero_rows(full.B, 1e-8);
  ASSERT_FALSE(keep.empty());
  const RestrictedProblem r =
      restrict_problem(sp.data, Matrix::Zero(sp.data.d(), sp.data.q()), w, keep);
  const Solution part = solve_apgd(r.data, r.w, apgd_config(1e-11, false));
  const Matrix back = expand(part.B, ActiveSet(keep, r.data.feature_norms()), sp.data.d());
  EXPECT_LT((back - full.B).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(objective(sp.data, back, w), objective(sp.data, full.B, w), 1e-9);
}

TEST(Helpers, NonzeroRowsAndBackfill) {
  Matrix B = Matrix::Zero(4, 2);
  B(1, 0) = 1.0;
  B(3, 1) = 1e-9;
  EXPECT_EQ(nonzero_rows(B), (std::vector<Index>{1, 3}));
  EXPECT_EQ(nonzero_rows(B, 1e-6), std::vector<Index>{1});

  SolverTrace trace;
  trace.rows.resize(2);
  trace.rows[0].screened_cumulative = 2;
  trace.rows[1].screened_cumulative = 5;
  trace.backfill_screening_rate(4);
  EXPECT_EQ(trace.rows[0].screening_rate, 0.5);
  EXPECT_EQ(trace.rows[1].screening_rate, 1.0);
  trace.backfill_screening_rate(0);
  EXPECT_EQ(trace.rows[0].screening_rate, 1.0);
}
