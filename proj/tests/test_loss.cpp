#include <gowl/duality.hpp>
#include <gowl/loss.hpp>

#include <gtest/gtest.h>
#include <Eigen/Dense>

#include "oracle.hpp"
#include "support.hpp"

#include <cmath>
#include <numeric>

using namespace gowl;

namespace {

ProblemData dense_problem(Matrix X, Matrix Y, LossKind kind) {
  return ProblemData(Design(std::move(X)), std::move(Y), kind);
}

double relative_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST(PrimalLoss, WorkedExamples) {
  const ProblemData sq = dense_problem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), LossKind::squared);
  EXPECT_DOUBLE_EQ(primal_loss(sq, Matrix::Zero(2, 2)), 1.0);
  EXPECT_DOUBLE_EQ(primal_loss(sq, Matrix::Identity(2, 2)), 0.0);

  Matrix y(1, 2);
  y << 0, 1;
  const ProblemData mn = dense_problem(Matrix::Ones(1, 3), y, LossKind::multinomial);
  EXPECT_NEAR(primal_loss(mn, Matrix::Zero(3, 2)), std::log(2.0), 1e-15);
  EXPECT_THROW(primal_loss(mn, Matrix::Zero(2, 2)), Error);
}

TEST(PrimalLoss, LogSumExpIsStableForLargeScores) {
  Matrix y(1, 2);
  y << 1, 0;
  const ProblemData mn = dense_problem(Matrix::Ones(1, 1), y, LossKind::multinomial);
  Matrix B(1, 2);
  B << 1000.0, 0.0;
  EXPECT_NEAR(primal_loss(mn, B), std::log1p(std::exp(-1000.0)), 1e-12);
  B << 0.0, 1000.0;
  EXPECT_NEAR(primal_loss(mn, B), 1000.0, 1e-9);
}

TEST(DualCandidate, WorkedExamples) {
  std::mt19937_64 rng(3);
  const Matrix X = fixtures::random_matrix(rng, 4, 3);
  const Matrix Y = fixtures::random_matrix(rng, 4, 2);
  const ProblemData sq = dense_problem(X, Y, LossKind::squared);
  EXPECT_LT((dual_candidate(sq, Matrix::Zero(3, 2)) + Y).norm(), 1e-15);

  const Matrix B = fixtures::random_matrix(rng, 3, 2);
  const ProblemData fit = dense_problem(X, X * B, LossKind::squared);
  EXPECT_LT(dual_candidate(fit, B).norm(), 1e-12);

  Matrix y(1, 2);
  y << 1, 0;
  const ProblemData mn = dense_problem(Matrix::Ones(1, 2), y, LossKind::multinomial);
  Matrix expected(1, 2);
  expected << -0.5, 0.5;
  EXPECT_LT((dual_candidate(mn, Matrix::Zero(2, 2)) - expected).norm(), 1e-15);
}

TEST(DualCandidate, MultinomialRowsSumToZeroAndScalingStaysOnSimplex) {
  std::mt19937_64 rng(4);
  const ProblemData mn = fixtures::random_problem(rng, 20, 5, 4, LossKind::multinomial);
  const DualMatrix theta = dual_candidate(mn, fixtures::random_matrix(rng, 5, 4, 2.0));
  EXPECT_LT(theta.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
  for (double alpha : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const Matrix p = alpha * theta + mn.Y();
    EXPECT_GE(p.minCoeff(), 0.0);
    EXPECT_LT((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-14);
    EXPECT_NO_THROW(dual_objective(mn, alpha * theta));
  }
}

TEST(DualObjective, WorkedExamples) {
  const Matrix Y = Matrix::Identity(2, 2);
  const ProblemData sq = dense_problem(Matrix::Identity(2, 2), Y, LossKind::squared);
  EXPECT_DOUBLE_EQ(dual_objective(sq, -Y), 1.0);
  EXPECT_DOUBLE_EQ(dual_objective(sq, Matrix::Zero(2, 2)), 0.0);

  Matrix y(1, 2);
  y << 1, 0;
  const ProblemData mn = dense_problem(Matrix::Ones(1, 3), y, LossKind::multinomial);
  const Matrix theta = Matrix::Constant(1, 2, 0.5) - y;
  EXPECT_NEAR(dual_objective(mn, theta), std::log(2.0), 1e-15);

  // Entropy of the uniform point equals P(0) = log 2, and the scaled
  // candidate at B = 0 certifies a nonnegative gap.
  const WeightVector w(Vector::Constant(3, 0.1));
  const DualPoint dp = certify(mn, Matrix::Zero(3, 2), w);
  EXPECT_GE(dp.cert.gap, 0.0);
}

TEST(DualObjective, RejectsPointsOffTheSimplex) {
  Matrix y(1, 2);
  y << 1, 0;
  const ProblemData mn = dense_problem(Matrix::Ones(1, 1), y, LossKind::multinomial);
  Matrix bad(1, 2);
  bad << -1.1, 1.1;  // p = [-0.1, 1.1]
  try {
    dual_objective(mn, bad);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "infeasible dual point");
  }
  bad << 0.0, 0.5;  // row sum 1.5
  EXPECT_THROW(dual_objective(mn, bad), Error);
  bad << -1.0 - 5e-10, 1.0;  // within tolerance
  EXPECT_NO_THROW(dual_objective(mn, bad));
}

TEST(LossGradient, SquaredAtZeroIsMinusXtY) {
  std::mt19937_64 rng(6);
  const ProblemData sq = fixtures::random_problem(rng, 6, 4, 2, LossKind::squared);
  const Matrix X = sq.X().to_dense();
  EXPECT_LT((loss_gradient(sq, Matrix::Zero(4, 2)) + X.transpose() * sq.Y()).norm(), 1e-12);
}

TEST(LossGradient, MultinomialAtZeroUsesUniformProbabilities) {
  Matrix X(4, 2);
  X << 1, 2, -1, 0, 2, -1, -2, -1;  // columns sum to zero
  Matrix Y(4, 2);
  Y << 1, 0, 0, 1, 1, 0, 0, 1;
  const ProblemData mn = dense_problem(X, Y, LossKind::multinomial);
  const Matrix expected = X.transpose() * (Matrix::Constant(4, 2, 0.5) - Y);
  EXPECT_LT((loss_gradient(mn, Matrix::Zero(2, 2)) - expected).norm(), 1e-14);
}

TEST(LossGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    for (int trial = 0; trial < 5; ++trial) {
      const ProblemData data = fixtures::random_problem(rng, 5, 4, 3, kind);
      const Matrix B = fixtures::random_matrix(rng, 4, 3);
      EXPECT_LT(relative_error(loss_gradient(data, B), oracle::finite_difference_gradient(data, B)), 1e-5);
    }
  }
}

TEST(MinibatchGradient, ConsistencyProperties) {
  std::mt19937_64 rng(9);
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    const ProblemData data = fixtures::random_problem(rng, 8, 5, 3, kind);
    const Matrix B = fixtures::random_matrix(rng, 5, 3);
    std::vector<Index> all(8);
    std::iota(all.begin(), all.end(), Index{0});
    EXPECT_LT((minibatch_gradient(data, B, all) - loss_gradient(data, B)).norm(), 1e-12);

    const std::vector<Index> one{3};
    const Matrix g = minibatch_gradient(data, B, one);
    Eigen::JacobiSVD<Matrix> svd(g);
    EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));

    const std::vector<Index> left{0, 2, 5};
    const std::vector<Index> right{1, 7};
    const std::vector<Index> both{0, 2, 5, 1, 7};
    EXPECT_LT((minibatch_gradient(data, B, both) - minibatch_gradient(data, B, left) -
               minibatch_gradient(data, B, right)).norm(),
              1e-12);

    EXPECT_THROW(minibatch_gradient(data, B, std::vector<Index>{}), Error);
    EXPECT_THROW(minibatch_gradient(data, B, std::vector<Index>{8}), Error);
    EXPECT_THROW(minibatch_gradient(data, B, std::vector<Index>{-1}), Error);
  }
}

TEST(StrongConcavity, ModulusIsOneForBothLosses) {
  EXPECT_EQ(strong_concavity_modulus(LossKind::squared), 1.0);
  EXPECT_EQ(strong_concavity_modulus(LossKind::multinomial), 1.0);
  EXPECT_THROW(strong_concavity_modulus(static_cast<LossKind>(7)), Error);
}

TEST(StrongConcavity, NegativeEntropyIsOneStronglyConvexOnSimplex) {
  // h(p) >= h(r) + <grad h(r), p - r> + 1/2 ||p - r||^2 for h = sum p log p.
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unif(1e-3, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const Index q = 2 + trial % 5;
    Vector p(q), r(q);
    for (Index j = 0; j < q; ++j) {
      p[j] = unif(rng);
      r[j] = unif(rng);
    }
    p /= p.sum();
    r /= r.sum();
    const double hp = (p.array() * p.array().log()).sum();
    const double hr = (r.array() * r.array().log()).sum();
    const double lin = ((r.array().log() + 1.0) * (p - r).array()).sum();
    EXPECT_GE(hp - hr - lin, 0.5 * (p - r).squaredNorm() - 1e-12);
  }
}

TEST(GradientStepConstant, KnownAndRandomDesigns) {
  const Matrix Y = Matrix::Ones(3, 1);
  EXPECT_NEAR(gradient_step_constant(dense_problem(Matrix::Identity(3, 3), Y, LossKind::squared)), 1.0, 1e-9);
  EXPECT_NEAR(gradient_step_constant(dense_problem(2.0 * Matrix::Identity(3, 3), Y, LossKind::squared)), 4.0, 1e-9);

  std::mt19937_64 rng(12);
  const Matrix X = fixtures::random_matrix(rng, 20, 10);
  const double svd = oracle::svd_sigma_max_squared(X);
  const ProblemData sq = dense_problem(X, fixtures::random_matrix(rng, 20, 2), LossKind::squared);
  EXPECT_NEAR(gradient_step_constant(sq), svd, 1e-4 * svd);
  const ProblemData mn = dense_problem(X, fixtures::random_one_hot(rng, 20, 3), LossKind::multinomial);
  EXPECT_NEAR(gradient_step_constant(mn), 0.5 * svd, 1e-4 * svd);

  try {
    gradient_step_constant(dense_problem(Matrix::Zero(3, 2), Y, LossKind::squared));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "degenerate design");
  }
}

TEST(WeakDuality, GapIsNonnegativeForRandomFeasiblePoints) {
  std::mt19937_64 rng(13);
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    for (int trial = 0; trial < 40; ++trial) {
      const ProblemData data = fixtures::random_problem(rng, 12, 8, 3, kind);
      const WeightVector w = fixtures::random_weights(rng, 8, 3.0);
      const Matrix B = fixtures::random_matrix(rng, 8, 3);
      const Matrix other = fixtures::random_matrix(rng, 8, 3);
      const DualMatrix raw = dual_candidate(data, other);
      const double alpha = feasibility_scale(dual_scores(data, raw), w);
      const double primal = primal_loss(data, B) + group_owl_norm(B, w);
      EXPECT_GE(primal - dual_objective(data, alpha * raw), -1e-10);
    }
  }
}
