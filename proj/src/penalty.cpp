#include <gowl/penalty.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gowl {
namespace {

// Permutation sorting magnitudes in descending order, ties by index.
std::vector<Index> descending_order(const Eigen::Ref<const Vector>& mag) {
  std::vector<Index> order(static_cast<std::size_t>(mag.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return mag[a] > mag[b]; });
  return order;
}

void check_step(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error("prox step must be positive");
}

}  // namespace

Vector pava_nonincreasing(const Eigen::Ref<const Vector>& z) {
  const Index n = z.size();
  if (n == 0) throw Error("empty sequence");

  struct Block {
    double sum;
    Index count;
    double mean() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    blocks.push_back({z[i], 1});
    while (blocks.size() > 1) {
      const Block& cur = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.mean() >= cur.mean()) break;
      Block merged{prev.sum + cur.sum, prev.count + cur.count};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }

  Vector out(n);
  Index pos = 0;
  for (const Block& b : blocks) {
    out.segment(pos, b.count).setConstant(b.mean());
    pos += b.count;
  }
  return out;
}

Vector owl_prox(const Eigen::Ref<const Vector>& v, const WeightVector& w,
                double t) {
  if (v.size() != w.size()) throw Error("owl_prox: length mismatch");
  check_step(t);
  const Index d = v.size();
  if (d == 0) return Vector(0);

  const Vector mag = v.cwiseAbs();
  const std::vector<Index> order = descending_order(mag);

  Vector shifted(d);
  for (Index k = 0; k < d; ++k) shifted[k] = mag[order[k]] - t * w[k];
  const Vector fitted = pava_nonincreasing(shifted).cwiseMax(0.0);

  Vector out(d);
  for (Index k = 0; k < d; ++k) {
    const Index i = order[k];
    out[i] = v[i] < 0.0 ? -fitted[k] : fitted[k];
  }
  return out;
}

CoefficientMatrix group_owl_prox(const Eigen::Ref<const Matrix>& B,
                                 const WeightVector& w, double t) {
  if (B.rows() != w.size()) throw Error("group_owl_prox: dimension mismatch");
  check_step(t);
  const Vector norms = B.rowwise().norm();
  const Vector shrunk = owl_prox(norms, w, t);

  CoefficientMatrix out(B.rows(), B.cols());
  for (Index i = 0; i < B.rows(); ++i) {
    if (norms[i] > 0.0 && shrunk[i] > 0.0) {
      out.row(i) = B.row(i) * (shrunk[i] / norms[i]);
    } else {
      out.row(i).setZero();
    }
  }
  return out;
}

double owl_norm(const Eigen::Ref<const Vector>& magnitudes,
                const WeightVector& w) {
  if (magnitudes.size() != w.size()) throw Error("owl_norm: dimension mismatch");
  Vector sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted.dot(w.values());
}

double group_owl_norm(const Eigen::Ref<const Matrix>& B,
                      const WeightVector& w) {
  if (B.rows() != w.size()) throw Error("group_owl_norm: dimension mismatch");
  return owl_norm(B.rowwise().norm(), w);
}

}  // namespace gowl
