#include <gowl/data.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

namespace gowl {
namespace {

double parse_double(std::string_view tok, std::size_t line) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + std::string(tok) + "'", line);
  }
  return v;
}

long long parse_index(std::string_view tok, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("bad feature index '" + std::string(tok) + "'", line);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Builds one-hot targets from raw labels over their ascending distinct values.
Matrix one_hot(const std::vector<double>& labels, std::vector<double>& classes) {
  classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  Matrix Y = Matrix::Zero(static_cast<Index>(labels.size()), static_cast<Index>(classes.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), labels[i]);
    Y(static_cast<Index>(i), static_cast<Index>(it - classes.begin())) = 1.0;
  }
  return Y;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace

LabelledProblem parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;              // multinomial
  std::vector<std::vector<double>> targets;  // regression
  Index max_index = 0;
  std::string raw;
  std::size_t line_no = 0;
  Index row = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> tokens;
    for (std::size_t pos = 0; pos < line.size();) {
      const std::size_t next = line.find_first_of(" \t", pos);
      const std::string_view tok = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      if (!tok.empty()) tokens.push_back(tok);
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }

    if (options.kind == LossKind::multinomial) {
      labels.push_back(parse_double(tokens[0], line_no));
    } else {
      std::vector<double> t;
      for (std::string_view part : split(tokens[0], ',')) t.push_back(parse_double(part, line_no));
      if (!targets.empty() && t.size() != targets.front().size()) {
        throw ParseError("inconsistent number of targets", line_no);
      }
      targets.push_back(std::move(t));
    }

    long long prev = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const std::size_t colon = tokens[k].find(':');
      if (colon == std::string_view::npos) throw ParseError("expected idx:val", line_no);
      const long long idx = parse_index(tokens[k].substr(0, colon), line_no);
      if (idx < 1) throw ParseError("feature indices are 1-based", line_no);
      if (idx <= prev) throw ParseError("feature indices must be strictly increasing", line_no);
      prev = idx;
      const double val = parse_double(tokens[k].substr(colon + 1), line_no);
      triplets.emplace_back(row, static_cast<Index>(idx - 1), val);
      max_index = std::max<Index>(max_index, static_cast<Index>(idx));
    }
    ++row;
  }
  if (row == 0) throw ParseError("no samples", 0);

  const Index d = std::max(max_index, options.min_features);
  Design::SparseRows X(row, d);
  X.setFromTriplets(triplets.begin(), triplets.end());

  std::vector<double> classes;
  Matrix Y;
  if (options.kind == LossKind::multinomial) {
    Y = one_hot(labels, classes);
  } else {
    Y.resize(row, static_cast<Index>(targets.front().size()));
    for (Index i = 0; i < row; ++i) {
      for (Index j = 0; j < Y.cols(); ++j) Y(i, j) = targets[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return LabelledProblem{ProblemData(Design(std::move(X)), std::move(Y), options.kind),
                         std::move(classes)};
}

LabelledProblem read_libsvm(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in = open_or_throw(path);
  return parse_libsvm(in, options);
}

void write_libsvm(std::ostream& out, const ProblemData& data,
                  std::span<const double> class_labels) {
  const bool multinomial = data.kind() == LossKind::multinomial;
  if (multinomial && static_cast<Index>(class_labels.size()) != data.q()) {
    throw Error("need one class label per target column");
  }
  const Design::SparseRows* csr = data.X().sparse_rows();
  const Matrix* dense = data.X().dense();
  for (Index i = 0; i < data.n(); ++i) {
    if (multinomial) {
      Index cls = 0;
      data.Y().row(i).maxCoeff(&cls);
      out << format_double(class_labels[static_cast<std::size_t>(cls)]);
    } else {
      for (Index j = 0; j < data.q(); ++j) {
        if (j) out << ',';
        out << format_double(data.Y()(i, j));
      }
    }
    if (csr) {
      for (Design::SparseRows::InnerIterator it(*csr, i); it; ++it) {
        out << ' ' << it.index() + 1 << ':' << format_double(it.value());
      }
    } else {
      for (Index j = 0; j < dense->cols(); ++j) {
        const double v = (*dense)(i, j);
        if (v != 0.0) out << ' ' << j + 1 << ':' << format_double(v);
      }
    }
    out << '\n';
  }
}

LabelledProblem parse_csv(std::istream& in, const CsvOptions& options) {
  const Index label_cols = options.kind == LossKind::multinomial ? 1 : options.targets;
  if (label_cols < 1) throw Error("need at least one target column");
  std::vector<std::vector<double>> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool skipped_header = !options.header;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> values;
    for (std::string_view cell : split(line, ',')) values.push_back(parse_double(trim(cell), line_no));
    if (static_cast<Index>(values.size()) <= label_cols) throw ParseError("row has no feature columns", line_no);
    if (!rows.empty() && values.size() != rows.front().size()) throw ParseError("ragged row", line_no);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no samples", 0);

  const Index n = static_cast<Index>(rows.size());
  const Index width = static_cast<Index>(rows.front().size());
  Matrix X(n, width - label_cols);
  Matrix T(n, label_cols);
  for (Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < label_cols; ++j) T(i, j) = r[static_cast<std::size_t>(j)];
    for (Index j = label_cols; j < width; ++j) X(i, j - label_cols) = r[static_cast<std::size_t>(j)];
  }
  if (options.standardize) X = standardize_columns(std::move(X));

  std::vector<double> classes;
  Matrix Y;
  if (options.kind == LossKind::multinomial) {
    std::vector<double> labels(T.data(), T.data() + n);
    Y = one_hot(labels, classes);
  } else {
    Y = std::move(T);
  }
  return LabelledProblem{ProblemData(Design(std::move(X)), std::move(Y), options.kind),
                         std::move(classes)};
}

LabelledProblem read_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in = open_or_throw(path);
  return parse_csv(in, options);
}

Matrix standardize_columns(Matrix X) {
  const double n = static_cast<double>(X.rows());
  for (Index j = 0; j < X.cols(); ++j) {
    auto col = X.col(j);
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0) {
      col /= sd;
    } else {
      col.setZero();
    }
  }
  return X;
}

SyntheticProblem synth_correlated(const SyntheticSpec& spec, LossKind kind) {
  if (spec.n < 1 || spec.d < 1 || spec.q < 1) throw Error("n, d and q must be positive");
  if (spec.support_size < 0 || spec.support_size > spec.d) throw Error("support_size exceeds d");
  if (spec.support_size > 0 && (spec.group_count < 1 || spec.group_count > spec.support_size)) {
    throw Error("group_count must lie in [1, support_size]");
  }
  if (!(spec.correlation >= 0.0 && spec.correlation < 1.0)) throw Error("correlation must lie in [0, 1)");
  if (!(spec.noise_sigma >= 0.0)) throw Error("noise_sigma must be nonnegative");
  if (kind == LossKind::multinomial && spec.q < 2) throw Error("multinomial needs q >= 2");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(1.0, 2.0);

  std::vector<Index> ids(static_cast<std::size_t>(spec.d));
  std::iota(ids.begin(), ids.end(), Index{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<Index> support(ids.begin(), ids.begin() + spec.support_size);
  std::sort(support.begin(), support.end());

  // Contiguous split of the support into groups of near-equal size.
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(spec.support_size ? spec.group_count : 0));
  for (Index k = 0; k < spec.support_size; ++k) {
    groups[static_cast<std::size_t>(k * spec.group_count / spec.support_size)].push_back(support[static_cast<std::size_t>(k)]);
  }

  Matrix X(spec.n, spec.d);
  for (Index j = 0; j < spec.d; ++j) {
    for (Index i = 0; i < spec.n; ++i) X(i, j) = normal(rng);
  }
  const double shared = std::sqrt(spec.correlation);
  const double own = std::sqrt(1.0 - spec.correlation);
  for (const auto& group : groups) {
    Vector latent(spec.n);
    for (Index i = 0; i < spec.n; ++i) latent[i] = normal(rng);
    for (Index j : group) X.col(j) = shared * latent + own * X.col(j);
  }
  X = standardize_columns(std::move(X));

  CoefficientMatrix B_true = CoefficientMatrix::Zero(spec.d, spec.q);
  for (const auto& group : groups) {
    const double magnitude = uniform(rng);
    for (Index j : group) {
      Eigen::RowVectorXd dir(spec.q);
      for (Index c = 0; c < spec.q; ++c) dir[c] = normal(rng);
      B_true.row(j) = magnitude * dir / dir.norm();
    }
  }

  const Matrix scores = X * B_true;
  Matrix Y;
  if (kind == LossKind::squared) {
    Y = scores;
    if (spec.noise_sigma > 0.0) {
      for (Index i = 0; i < Y.rows(); ++i) {
        for (Index c = 0; c < Y.cols(); ++c) Y(i, c) += spec.noise_sigma * normal(rng);
      }
    }
  } else {
    Y = Matrix::Zero(spec.n, spec.q);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Index i = 0; i < spec.n; ++i) {
      const double m = scores.row(i).maxCoeff();
      Eigen::RowVectorXd p = (scores.row(i).array() - m).exp().matrix();
      p /= p.sum();
      const double u = unit(rng);
      double acc = 0.0;
      Index cls = spec.q - 1;
      for (Index c = 0; c < spec.q; ++c) {
        acc += p[c];
        if (u < acc) {
          cls = c;
          break;
        }
      }
      Y(i, cls) = 1.0;
    }
  }

  return SyntheticProblem{ProblemData(Design(std::move(X)), std::move(Y), kind), std::move(support),
                          std::move(groups), std::move(B_true)};
}

OscarSpec OscarSpec::with_alphas(double alpha1, double alpha2) {
  OscarSpec s;
  s.mode = Mode::explicit_alphas;
  s.alpha1 = alpha1;
  s.alpha2 = alpha2;
  return s;
}

OscarSpec OscarSpec::scaled(double p) {
  OscarSpec s;
  s.mode = Mode::data_driven;
  s.p = p;
  return s;
}

OscarSpec OscarSpec::sparsity_index(int index, double tau) {
  if (index < 1 || index > 3) throw Error("sparsity index must be 1, 2 or 3");
  return scaled(static_cast<double>(index) * std::exp(-tau));
}

double max_feature_correlation(const ProblemData& data) {
  const Matrix corr = data.X().transpose_multiply(data.Y());
  return corr.rows() ? corr.rowwise().norm().maxCoeff() : 0.0;
}

WeightVector oscar_weights(Index d, const OscarSpec& spec, const ProblemData* data) {
  if (d < 1) throw Error("d must be positive");
  double alpha1 = spec.alpha1;
  double alpha2 = spec.alpha2;
  if (spec.mode == OscarSpec::Mode::data_driven) {
    if (!data) throw Error("data-driven OSCAR weights need the problem data");
    if (data->d() != d) throw Error("data has a different number of features");
    if (spec.p < 0.0) throw Error("negative alpha");
    alpha1 = spec.p * max_feature_correlation(*data);
    alpha2 = alpha1 / static_cast<double>(d);
  }
  if (alpha1 < 0.0 || alpha2 < 0.0) throw Error("negative alpha");
  Vector w(d);
  for (Index k = 0; k < d; ++k) w[k] = alpha1 + alpha2 * static_cast<double>(d - 1 - k);
  return WeightVector(std::move(w));
}

}  // namespace gowl
