#include <gowl/duality.hpp>
#include <gowl/screening.hpp>
#include <gowl/solver.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

#include <algorithm>

using namespace gowl;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

WeightVector weights(std::initializer_list<double> xs) { return WeightVector(vec(xs)); }

GapCertificate cert_with_radius(double radius) {
  GapCertificate c;
  c.radius = radius;
  c.gap = 0.5 * radius * radius;
  return c;
}

// X = I makes the problem separable: B* = group_owl_prox(Y, w, 1).
ProblemData identity_problem(const Matrix& Y) {
  return ProblemData(Design(Matrix::Identity(Y.rows(), Y.rows())), Y, LossKind::squared);
}

}  // namespace

TEST(ScreeningSweep, WorkedExample) {
  // 0.5 + 1 * 0.2 = 0.7 < 0.8.
  const ActiveSet one({0}, vec({1.0}));
  EXPECT_EQ(screening_sweep(DualScores{vec({0.5})}, 0.2, one, weights({0.8})),
            std::vector<Index>{0});
  EXPECT_TRUE(screening_sweep(DualScores{vec({0.5})}, 1e6, one, weights({0.8})).empty());
}

TEST(ScreeningSweep, EqualityIsNotScreened) {
  const ActiveSet one({4}, vec({1.0}));
  EXPECT_TRUE(screening_sweep(DualScores{vec({0.5})}, 0.25, one, weights({0.75})).empty());
  EXPECT_EQ(screening_sweep(DualScores{vec({0.5})}, 0.25, one, weights({0.7500001})),
            std::vector<Index>{4});
}

TEST(ScreeningSweep, UsesWeightAtActiveSize) {
  // Threshold is w[|A| - 1] = 1 even though w has more entries.
  const ActiveSet two({1, 3}, vec({1.0, 2.0}));
  const auto removed = screening_sweep(DualScores{vec({0.5, 0.5})}, 0.3, two, weights({5, 1, 0.1}));
  EXPECT_EQ(removed, std::vector<Index>{1});  // 0.5 + 0.3 < 1 but 0.5 + 0.6 > 1
}

TEST(ScreeningFixpoint, IdentityDesignReachesTheSupportInTwoEvents) {
  // Row norms 5, 1.5, 0.5 and w = (3, 2, 1): the prox keeps only row 0.
  // Optimal scores are (3, 1.5, 0.5); thresholds 1, then 2, then 3 (strict).
  Matrix Y = Matrix::Zero(3, 2);
  Y.row(0) << 3, 4;
  Y.row(1) << 1.5, 0;
  Y.row(2) << 0, 0.5;
  const ProblemData data = identity_problem(Y);
  const WeightVector w = weights({3, 2, 1});
  const Matrix B_opt = group_owl_prox(Y, w, 1.0);
  ASSERT_EQ(nonzero_rows(B_opt, 1e-12), std::vector<Index>{0});

  const DualPoint dp = certify(data, B_opt, w);
  EXPECT_NEAR(dp.cert.gap, 0.0, 1e-12);
  const FixpointResult fx =
      screening_fixpoint(dp.scores, dp.cert, ActiveSet::full(data.feature_norms()), w, 7);
  ASSERT_EQ(fx.events.size(), 2u);
  EXPECT_EQ(fx.events[0].removed, std::vector<Index>{2});
  EXPECT_EQ(fx.events[0].active_after, 2);
  EXPECT_EQ(fx.events[1].removed, std::vector<Index>{1});
  EXPECT_EQ(fx.events[1].active_after, 1);
  EXPECT_EQ(fx.events[0].outer_iteration, 7);
  EXPECT_EQ(fx.active.original_indices(), std::vector<Index>{0});
  EXPECT_EQ(fx.kept_positions, std::vector<Index>{0});
  EXPECT_TRUE(fx.changed);
}

TEST(ScreeningFixpoint, NothingRemovedGivesOneEmptyEvent) {
  const ActiveSet all = ActiveSet::full(vec({1, 1, 1}));
  const FixpointResult fx =
      screening_fixpoint(DualScores{vec({2, 2, 2})}, cert_with_radius(0.1), all, weights({3, 2, 1}), 0);
  ASSERT_EQ(fx.events.size(), 1u);
  EXPECT_TRUE(fx.events[0].removed.empty());
  EXPECT_EQ(fx.events[0].active_after, 3);
  EXPECT_FALSE(fx.changed);
  EXPECT_EQ(fx.active.original_indices(), all.original_indices());
}

TEST(ScreeningFixpoint, ConstantWeightsNeedOneSweep) {
  const ActiveSet all = ActiveSet::full(vec({1, 1, 1}));
  const FixpointResult fx =
      screening_fixpoint(DualScores{vec({0.5, 2, 0.2})}, cert_with_radius(0.0), all, weights({1, 1, 1}), 0);
  ASSERT_EQ(fx.events.size(), 1u);
  EXPECT_EQ(fx.events[0].removed, (std::vector<Index>{0, 2}));
  EXPECT_EQ(fx.active.original_indices(), std::vector<Index>{1});
}

TEST(ScreeningFixpoint, HugeRadiusKeepsEverything) {
  const ActiveSet all = ActiveSet::full(vec({1, 2, 3}));
  const FixpointResult fx =
      screening_fixpoint(DualScores{vec({0, 0, 0})}, cert_with_radius(1e9), all, weights({3, 2, 1}), 0);
  EXPECT_FALSE(fx.changed);
  EXPECT_EQ(fx.active.size(), 3);
}

TEST(ScreeningFixpoint, SmallerRadiusNeverScreensLess) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 15;
    Vector s(d), norms(d);
    for (Index i = 0; i < d; ++i) {
      s[i] = unif(rng);
      norms[i] = 0.5 + unif(rng);
    }
    const WeightVector w = fixtures::random_weights(rng, d, 2.0);
    const ActiveSet all = ActiveSet::full(norms);
    const double r = unif(rng);
    const FixpointResult big = screening_fixpoint(DualScores{s}, cert_with_radius(r), all, w, 0);
    const FixpointResult small = screening_fixpoint(DualScores{s}, cert_with_radius(0.5 * r), all, w, 0);
    EXPECT_LE(small.active.size(), big.active.size());
    for (Index id : small.active.original_indices()) {
      const auto& kept = big.active.original_indices();
      EXPECT_TRUE(std::find(kept.begin(), kept.end(), id) != kept.end());
    }
  }
}

TEST(ActiveSet, ValidatesAndSubsets) {
  EXPECT_THROW(ActiveSet({2, 1}, vec({1, 1})), Error);
  EXPECT_THROW(ActiveSet({1, 1}, vec({1, 1})), Error);
  EXPECT_THROW(ActiveSet({1}, vec({1, 1})), Error);
  const ActiveSet a({0, 3, 5}, vec({1, 2, 3}));
  const std::vector<Index> pos{0, 2};
  const ActiveSet b = a.keep(pos);
  EXPECT_EQ(b.original_indices(), (std::vector<Index>{0, 5}));
  EXPECT_EQ(b.feature_norms(), vec({1, 3}));
}

TEST(RestrictProblem, KeepsColumnsRowsAndLeadingWeights) {
  std::mt19937_64 rng(22);
  const ProblemData data = fixtures::random_problem(rng, 6, 3, 2, LossKind::squared);
  const Matrix B = fixtures::random_matrix(rng, 3, 2);
  const WeightVector w = weights({3, 2, 1});

  const std::vector<Index> all{0, 1, 2};
  const RestrictedProblem same = restrict_problem(data, B, w, all);
  EXPECT_EQ(same.B, B);
  EXPECT_EQ(same.w.values(), w.values());
  EXPECT_EQ(same.data.X().to_dense(), data.X().to_dense());

  const std::vector<Index> one{1};
  const RestrictedProblem r = restrict_problem(data, B, w, one);
  EXPECT_EQ(r.data.d(), 1);
  EXPECT_EQ(r.B, B.row(1));
  EXPECT_EQ(r.w.values(), vec({3}));
  EXPECT_EQ(r.data.X().to_dense(), data.X().to_dense().col(1));
}

TEST(Expand, ScattersRowsBack) {
  const ActiveSet a({1, 3}, vec({1, 1}));
  Matrix compact(2, 2);
  compact << 1, 2, 3, 4;
  const Matrix full = expand(compact, a, 5);
  Matrix expected = Matrix::Zero(5, 2);
  expected.row(1) << 1, 2;
  expected.row(3) << 3, 4;
  EXPECT_EQ(full, expected);
  EXPECT_EQ(expand(Matrix::Zero(0, 2), ActiveSet(), 4), Matrix::Zero(4, 2));
  EXPECT_THROW(expand(compact, a, 3), Error);
  EXPECT_THROW(expand(Matrix::Zero(3, 2), a, 5), Error);
}

TEST(Screening, SafeAtTheOptimumOfIdentityDesigns) {
  // For X = I the optimum is a prox: screened rows must be zero there.
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + trial % 8;
    const Matrix Y = fixtures::random_matrix(rng, d, 2, 2.0);
    const ProblemData data = identity_problem(Y);
    const WeightVector w = fixtures::random_weights(rng, d, 3.0);
    const Matrix B_opt = group_owl_prox(Y, w, 1.0);
    // A perturbed iterate gives a positive radius.
    const Matrix B = B_opt + 0.05 * fixtures::random_matrix(rng, d, 2);
    const DualPoint dp = certify(data, B, w);
    const FixpointResult fx =
        screening_fixpoint(dp.scores, dp.cert, ActiveSet::full(data.feature_norms()), w, 0);
    for (const ScreeningEvent& ev : fx.events) {
      for (Index id : ev.removed) EXPECT_LT(B_opt.row(id).norm(), 1e-12) << "trial " << trial;
    }
  }
}
