#pragma once

#include <gowl/problem.hpp>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gowl {

/// A problem plus the class labels behind its one-hot columns (multinomial
/// only; ascending).
struct LabelledProblem {
  ProblemData data;
  std::vector<double> class_labels;
};

struct LibsvmOptions {
  LossKind kind = LossKind::multinomial;
  /// Lower bound on d when trailing features never appear.
  Index min_features = 0;
};

/**
 * LIBSVM sparse text: "label idx:val idx:val ..." with 1-based, strictly
 * increasing indices. Multinomial labels map to one-hot rows over the
 * ascending distinct labels; regression rows may carry several targets
 * separated by commas. Blank lines and '#' comments are ignored.
 */
LabelledProblem parse_libsvm(std::istream& in, const LibsvmOptions& options);
LabelledProblem read_libsvm(const std::string& path, const LibsvmOptions& options);

/// Inverse of parse_libsvm; values printed with 17 significant digits.
void write_libsvm(std::ostream& out, const ProblemData& data,
                  std::span<const double> class_labels);

struct CsvOptions {
  LossKind kind = LossKind::squared;
  /// Leading target columns for regression; multinomial uses one label column.
  Index targets = 1;
  bool header = false;
  bool standardize = true;
};

/// Dense comma-separated rows: targets first, then features.
LabelledProblem parse_csv(std::istream& in, const CsvOptions& options);
LabelledProblem read_csv(const std::string& path, const CsvOptions& options);

/// Columns shifted to zero mean and scaled to unit (population) variance.
/// Constant columns become zero.
Matrix standardize_columns(Matrix X);

struct SyntheticSpec {
  Index n = 100;
  Index d = 1000;
  Index q = 3;
  Index support_size = 10;
  Index group_count = 5;
  double correlation = 0.5;  // within-group, in [0, 1)
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

struct SyntheticProblem {
  ProblemData data;
  std::vector<Index> support;  // ascending
  std::vector<std::vector<Index>> groups;
  CoefficientMatrix B_true;
};

/**
 * Grouped-correlation design with a known row-sparse truth.
 *
 * Support columns are split into groups sharing a latent factor, giving
 * within-group correlation about rho; other columns are independent. After
 * column standardization, B_true gets equal row norms within each group and
 * Y = X B_true + noise (regression) or one-hot draws from softmax(X B_true).
 */
SyntheticProblem synth_correlated(const SyntheticSpec& spec, LossKind kind);

/// OSCAR weights lambda_i = alpha1 + alpha2 (d - i), either with explicit
/// alphas or data-driven: alpha1 = p * max_i ||x_i^T Y||_2, alpha2 = alpha1 / d.
struct OscarSpec {
  enum class Mode { explicit_alphas, data_driven };
  Mode mode = Mode::explicit_alphas;
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  double p = 0.0;

  static OscarSpec with_alphas(double alpha1, double alpha2);
  static OscarSpec scaled(double p);
  /// p = index * exp(-tau), index in {1, 2, 3}.
  static OscarSpec sparsity_index(int index, double tau);
};

WeightVector oscar_weights(Index d, const OscarSpec& spec, const ProblemData* data = nullptr);

/// max_i ||x_i^T Y||_2.
double max_feature_correlation(const ProblemData& data);

}  // namespace gowl
