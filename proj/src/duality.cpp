#include <gowl/duality.hpp>
#include <gowl/screening.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gowl {
namespace {

// Neumaier running sum; cumulative values stay accurate for long vectors.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Vector sorted_descending(const Vector& v) {
  Vector s = v;
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

GapCertificate make_certificate(double primal, double dual, LossKind kind, double scale,
                                bool check) {
  GapCertificate cert;
  cert.primal_value = primal;
  cert.dual_value = dual;
  cert.gap = primal - dual;
  cert.scale = scale;
  if (!std::isfinite(cert.gap)) throw DivergenceError("non-finite duality gap");
  const double slack = std::max(1e-10, 64.0 * std::numeric_limits<double>::epsilon() * std::abs(primal));
  if (check && cert.gap < -slack) throw Error("duality violation");
  cert.radius = std::sqrt(2.0 * std::max(cert.gap, 0.0) / strong_concavity_modulus(kind));
  return cert;
}

}  // namespace

DualScores scores_from_correlations(const Eigen::Ref<const Matrix>& xt_theta) {
  return DualScores{xt_theta.rowwise().norm()};
}

DualScores dual_scores(const ProblemData& data, const Eigen::Ref<const Matrix>& theta) {
  return scores_from_correlations(data.X().transpose_multiply(theta));
}

DualScores dual_scores(const ProblemData& data, const Eigen::Ref<const Matrix>& theta,
                       const ActiveSet& active) {
  const Matrix corr = data.X().transpose_multiply(theta);
  Vector out(active.size());
  for (Index k = 0; k < active.size(); ++k) {
    const Index j = active.original_indices()[static_cast<std::size_t>(k)];
    if (j < 0 || j >= data.d()) throw Error("active index out of range");
    out[k] = corr.row(j).norm();
  }
  return DualScores{out};
}

double feasibility_scale(const DualScores& scores, const WeightVector& w) {
  if (scores.values.size() != w.size()) throw Error("feasibility_scale: length mismatch");
  const Vector s = sorted_descending(scores.values);
  CompensatedSum cum_s;
  CompensatedSum cum_w;
  double alpha = 1.0;
  for (Index i = 0; i < s.size(); ++i) {
    cum_s.add(s[i]);
    cum_w.add(w[i]);
    const double cs = cum_s.value();
    if (cs <= 0.0) continue;
    alpha = std::min(alpha, cum_w.value() / cs);
  }
  if (!(alpha > 0.0)) throw Error("no feasible scaling");
  if (alpha < 1.0) alpha *= 1.0 - 8.0 * std::numeric_limits<double>::epsilon();
  return alpha;
}

double max_constraint_violation(const DualScores& scores, const WeightVector& w) {
  if (scores.values.size() != w.size()) throw Error("length mismatch");
  const Vector s = sorted_descending(scores.values);
  CompensatedSum cum_s;
  CompensatedSum cum_w;
  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < s.size(); ++i) {
    cum_s.add(s[i]);
    cum_w.add(w[i]);
    worst = std::max(worst, cum_s.value() - cum_w.value());
  }
  return s.size() ? worst : 0.0;
}

GapCertificate duality_gap(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                           const Eigen::Ref<const Matrix>& theta_scaled,
                           const WeightVector& w, double scale) {
  const double primal = primal_loss(data, B) + group_owl_norm(B, w);
  const double dual = dual_objective(data, theta_scaled);
  return make_certificate(primal, dual, data.kind(), scale, true);
}

DualPoint certify(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                  const Eigen::Ref<const Matrix>& Z, const Eigen::Ref<const Matrix>& theta_raw,
                  const Eigen::Ref<const Matrix>& xt_theta_raw, const WeightVector& w,
                  bool skip_scaling) {
  DualScores raw = scores_from_correlations(xt_theta_raw);
  double alpha = 1.0;
  if (!skip_scaling) {
    try {
      alpha = feasibility_scale(raw, w);
    } catch (const Error&) {
      alpha = 0.0;  // zero weights: only Theta = 0 is feasible
    }
  }
  DualPoint point;
  point.theta = alpha * theta_raw;
  point.scores.values = alpha * raw.values;
  const double primal = loss_from_predictions(data.kind(), Z, data.Y()) + group_owl_norm(B, w);
  const double dual = dual_objective(data, point.theta);
  point.cert = make_certificate(primal, dual, data.kind(), alpha, !skip_scaling);
  return point;
}

DualPoint certify(const ProblemData& data, const Eigen::Ref<const Matrix>& B,
                  const WeightVector& w) {
  const Matrix Z = data.X().multiply(B);
  const DualMatrix raw = dual_from_predictions(data.kind(), Z, data.Y());
  return certify(data, B, Z, raw, data.X().transpose_multiply(raw), w);
}

}  // namespace gowl
