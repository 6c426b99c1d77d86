#include "oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace gowl::oracle {
namespace {

double sorted_weighted_sum(Vector mags, const Vector& w) {
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double s = 0.0;
  for (Index i = 0; i < mags.size(); ++i) s += w[i] * mags[i];
  return s;
}

}  // namespace

Vector pava_enumerate(const Vector& z) {
  const Index n = z.size();
  if (n == 0 || n > 16) throw Error("pava_enumerate: size out of range");
  double best = std::numeric_limits<double>::infinity();
  Vector best_x;
  // Bit k set: a block boundary between k and k+1.
  for (unsigned long mask = 0; mask < (1UL << (n - 1)); ++mask) {
    Vector x(n);
    Index start = 0;
    for (Index k = 0; k < n; ++k) {
      const bool boundary = k == n - 1 || (mask >> k) & 1UL;
      if (!boundary) continue;
      const double mean = z.segment(start, k - start + 1).mean();
      x.segment(start, k - start + 1).setConstant(mean);
      start = k + 1;
    }
    bool monotone = true;
    for (Index k = 0; k + 1 < n; ++k) monotone = monotone && x[k] >= x[k + 1];
    if (!monotone) continue;
    const double err = (x - z).squaredNorm();
    if (err < best) {
      best = err;
      best_x = x;
    }
  }
  return best_x;
}

double owl_prox_objective(const Vector& x, const Vector& v, const Vector& w, double t) {
  return 0.5 * (x - v).squaredNorm() + t * sorted_weighted_sum(x.cwiseAbs(), w);
}

double group_prox_objective(const Matrix& X, const Matrix& B, const Vector& w, double t) {
  return 0.5 * (X - B).squaredNorm() + t * sorted_weighted_sum(X.rowwise().norm(), w);
}

Vector owl_prox_enumerate(const Vector& v, const Vector& w, double t) {
  const Index d = v.size();
  if (d == 0 || d > 7) throw Error("owl_prox_enumerate: size out of range");
  const Vector mag = v.cwiseAbs();

  double best = owl_prox_objective(Vector::Zero(d), v, w, t);
  Vector best_x = Vector::Zero(d);

  // rank[i] = cluster of coordinate i; clusters ordered by decreasing magnitude.
  std::vector<Index> rank(static_cast<std::size_t>(d), 0);
  std::function<void(Index)> visit = [&](Index i) {
    if (i < d) {
      for (Index r = 0; r < d; ++r) {
        rank[static_cast<std::size_t>(i)] = r;
        visit(i + 1);
      }
      return;
    }
    const Index clusters = *std::max_element(rank.begin(), rank.end()) + 1;
    std::vector<Index> size(static_cast<std::size_t>(clusters), 0);
    std::vector<double> sum_v(static_cast<std::size_t>(clusters), 0.0);
    for (Index k = 0; k < d; ++k) {
      ++size[static_cast<std::size_t>(rank[static_cast<std::size_t>(k)])];
      sum_v[static_cast<std::size_t>(rank[static_cast<std::size_t>(k)])] += mag[k];
    }
    if (std::find(size.begin(), size.end(), 0) != size.end()) return;  // not surjective

    std::vector<double> level(static_cast<std::size_t>(clusters));
    Index pos = 0;
    for (Index c = 0; c < clusters; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      const double mean_w = w.segment(pos, size[cs]).mean();
      level[cs] = std::max(0.0, sum_v[cs] / static_cast<double>(size[cs]) - t * mean_w);
      pos += size[cs];
    }
    for (int pin_last = 0; pin_last < 2; ++pin_last) {
      Vector x(d);
      for (Index k = 0; k < d; ++k) {
        const Index c = rank[static_cast<std::size_t>(k)];
        const double m = (pin_last && c == clusters - 1) ? 0.0 : level[static_cast<std::size_t>(c)];
        x[k] = v[k] < 0.0 ? -m : m;
      }
      const double obj = owl_prox_objective(x, v, w, t);
      if (obj < best) {
        best = obj;
        best_x = x;
      }
    }
  };
  visit(0);
  return best_x;
}

Matrix group_prox_enumerate(const Matrix& B, const Vector& w, double t) {
  const Vector norms = B.rowwise().norm();
  const Vector s = owl_prox_enumerate(norms, w, t);
  Matrix out = Matrix::Zero(B.rows(), B.cols());
  for (Index i = 0; i < B.rows(); ++i) {
    if (norms[i] > 0.0) out.row(i) = B.row(i) * (s[i] / norms[i]);
  }
  return out;
}

double dense_loss(const Matrix& X, const Matrix& Y, LossKind kind, const Matrix& B) {
  double total = 0.0;
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < Y.cols(); ++j) {
      double z = 0.0;
      for (Index k = 0; k < X.cols(); ++k) z += X(i, k) * B(k, j);
      if (kind == LossKind::squared) {
        total += 0.5 * (Y(i, j) - z) * (Y(i, j) - z);
      } else {
        total -= Y(i, j) * z;
      }
    }
    if (kind == LossKind::multinomial) {
      double acc = 0.0;
      for (Index j = 0; j < Y.cols(); ++j) {
        double z = 0.0;
        for (Index k = 0; k < X.cols(); ++k) z += X(i, k) * B(k, j);
        acc += std::exp(z);
      }
      total += std::log(acc);
    }
  }
  return total;
}

Matrix finite_difference_gradient(const ProblemData& data, const Matrix& B, double h) {
  const Matrix X = data.X().to_dense();
  Matrix G(B.rows(), B.cols());
  Matrix P = B;
  for (Index i = 0; i < B.rows(); ++i) {
    for (Index j = 0; j < B.cols(); ++j) {
      const double step = h * std::max(1.0, std::abs(B(i, j)));
      P(i, j) = B(i, j) + step;
      const double up = dense_loss(X, data.Y(), data.kind(), P);
      P(i, j) = B(i, j) - step;
      const double down = dense_loss(X, data.Y(), data.kind(), P);
      P(i, j) = B(i, j);
      G(i, j) = (up - down) / (2.0 * step);
    }
  }
  return G;
}

double svd_sigma_max_squared(const Matrix& X) {
  Eigen::JacobiSVD<Matrix> svd(X);
  const double s = svd.singularValues()(0);
  return s * s;
}

Matrix normal_equations(const Matrix& X, const Matrix& Y) {
  return (X.transpose() * X).ldlt().solve(X.transpose() * Y);
}

double grid_feasibility_scale(const Vector& scores, const Vector& w, int steps) {
  Vector sorted = scores;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double best = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double alpha = static_cast<double>(k) / steps;
    double cs = 0.0;
    double cw = 0.0;
    bool ok = true;
    for (Index i = 0; i < sorted.size(); ++i) {
      cs += alpha * sorted[i];
      cw += w[i];
      if (cs > cw + 1e-12) {
        ok = false;
        break;
      }
    }
    if (ok) best = alpha;
  }
  return best;
}

Vector dense_scores(const Matrix& X, const Matrix& theta) {
  Vector out(X.cols());
  for (Index f = 0; f < X.cols(); ++f) {
    double sq = 0.0;
    for (Index j = 0; j < theta.cols(); ++j) {
      double acc = 0.0;
      for (Index i = 0; i < X.rows(); ++i) acc += X(i, f) * theta(i, j);
      sq += acc * acc;
    }
    out[f] = std::sqrt(sq);
  }
  return out;
}

}  // namespace gowl::oracle
