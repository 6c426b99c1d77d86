#include "verify.hpp"

#include <gowl/data.hpp>
#include <gowl/duality.hpp>
#include <gowl/solver.hpp>

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace gowl::verify {
namespace {

// Tracks the first failure of one property.
class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, std::uint64_t seed, const std::string& what) {
    if (ok || !result_.passed) return;
    result_.passed = false;
    result_.seed = seed;
    result_.detail = what;
  }
  void fail(std::uint64_t seed, const std::string& what) { expect(false, seed, what); }
  const PropertyResult& result() const { return result_; }

 private:
  PropertyResult result_;
};

std::string fmt(const char* label, double value) {
  std::ostringstream out;
  out << label << " = " << value;
  return out.str();
}

Vector random_vector(std::mt19937_64& rng, Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Vector random_weights(std::mt19937_64& rng, Index d, double scale) {
  std::uniform_real_distribution<double> unif(0.0, scale);
  Vector w(d);
  for (Index i = 0; i < d; ++i) w[i] = unif(rng);
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

ProblemData random_problem(std::mt19937_64& rng, Index n, Index d, Index q, LossKind kind) {
  Matrix X = random_matrix(rng, n, d, 1.0);
  Matrix Y;
  if (kind == LossKind::squared) {
    Y = random_matrix(rng, n, q, 1.0);
  } else {
    std::uniform_int_distribution<Index> pick(0, q - 1);
    Y = Matrix::Zero(n, q);
    for (Index i = 0; i < n; ++i) Y(i, pick(rng)) = 1.0;
  }
  return ProblemData(Design(std::move(X)), std::move(Y), kind);
}

PropertyResult check_pava(const Options& o) {
  Check c("pava_matches_enumeration");
  const int count = o.quick ? 100 : 300;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    const Vector z = random_vector(rng, 1 + k % 10, 1.0);
    const double err = (pava_nonincreasing(z) - oracle::pava_enumerate(z)).norm();
    c.expect(err <= 1e-10, seed, fmt("distance", err));
  }
  return c.result();
}

PropertyResult check_prox(const Options& o) {
  Check c("group_prox_matches_brute_force");
  const int count = o.quick ? 60 : 200;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = o.seed + 1000 + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    const Index d = 1 + k % 6;
    const Index q = 1 + k % 3;
    const Matrix B = random_matrix(rng, d, q, 2.0);
    const Vector w = random_weights(rng, d, 1.5);
    const double t = 0.5 + 0.25 * (k % 4);
    const Matrix got = group_owl_prox(B, WeightVector(w), t);
    const Matrix ref = oracle::group_prox_enumerate(B, w, t);
    const double gap = oracle::group_prox_objective(got, B, w, t) -
                       oracle::group_prox_objective(ref, B, w, t);
    const double dist = (got - ref).norm();
    c.expect(gap <= 1e-6 && dist <= 1e-5, seed,
             fmt("objective excess", gap) + ", " + fmt("distance", dist));
  }
  return c.result();
}

PropertyResult check_gradient(const Options& o) {
  Check c("gradient_matches_finite_differences");
  const int count = o.quick ? 10 : 20;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = o.seed + 2000 + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    const LossKind kind = k % 2 ? LossKind::multinomial : LossKind::squared;
    const ProblemData data = random_problem(rng, 8, 5, 3, kind);
    const Matrix B = random_matrix(rng, 5, 3, 1.0);
    const Matrix fd = oracle::finite_difference_gradient(data, B);
    const double rel = (loss_gradient(data, B) - fd).norm() / std::max(1.0, fd.norm());
    c.expect(rel <= 1e-5, seed, fmt("relative error", rel));
  }
  return c.result();
}

PropertyResult check_feasibility(const Options& o) {
  Check c("scaled_dual_point_is_feasible");
  const int count = o.quick ? 100 : 500;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t seed = o.seed + 3000 + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(seed);
    const Index d = 1 + k % 50;
    const Vector s = random_vector(rng, d, 2.0).cwiseAbs();
    const WeightVector w(random_weights(rng, d, 1.0));
    const double alpha = feasibility_scale(DualScores{s}, w);
    const double violation = max_constraint_violation(DualScores{alpha * s}, w);
    c.expect(violation <= 1e-12, seed, fmt("constraint violation", violation));
  }
  return c.result();
}

struct SolverChecks {
  Check gap{"duality_gap_nonnegative"};
  Check safety{"screening_is_safe"};
  Check equivalence{"screening_preserves_objective"};
};

void check_trace(Check& c, const Solution& sol, std::uint64_t seed, const char* who) {
  for (const TraceRow& row : sol.trace.rows) {
    c.expect(row.gap >= -1e-10, seed,
             std::string(who) + " iteration " + std::to_string(row.iteration) + ": " +
                 fmt("gap", row.gap));
  }
}

void solver_instance(const Options& o, SolverChecks& checks, std::uint64_t seed, LossKind kind,
                     Index n, Index d) {
  std::mt19937_64 rng(seed);
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.q = 3;
  spec.support_size = std::min<Index>(8, d);
  spec.group_count = 2;
  spec.seed = seed;
  const SyntheticProblem sp = synth_correlated(spec, kind);
  std::uniform_real_distribution<double> scale(0.2, 0.45);
  const WeightVector w = oscar_weights(d, OscarSpec::scaled(scale(rng)), &sp.data);

  ApgdConfig ref_cfg;
  ref_cfg.gap_tolerance = 1e-10;
  ref_cfg.screening_enabled = false;
  const Solution ref = solve_apgd(sp.data, w, ref_cfg);
  check_trace(checks.gap, ref, seed, "reference");

  ApgdConfig apgd_cfg = ref_cfg;
  apgd_cfg.screening_enabled = true;
  apgd_cfg.fault_skip_scaling = o.fault_skip_scaling;
  SpgdConfig spgd_cfg;
  spgd_cfg.gap_tolerance = 1e-9;
  spgd_cfg.seed = seed;
  spgd_cfg.fault_skip_scaling = o.fault_skip_scaling;

  const Solution apgd = solve_apgd(sp.data, w, apgd_cfg);
  const Solution spgd = solve_spgd(sp.data, w, spgd_cfg);
  for (const Solution* sol : {&apgd, &spgd}) {
    const char* who = sol == &apgd ? "apgd" : "spgd";
    if (!o.fault_skip_scaling) check_trace(checks.gap, *sol, seed, who);
    for (Index id : sol->screened_features()) {
      const double norm = ref.B.row(id).norm();
      checks.safety.expect(norm <= 1e-8, seed,
                           std::string(who) + " screened feature " + std::to_string(id) +
                               " with " + fmt("reference row norm", norm));
    }
  }
  // The rule must be safe at any primal point, not only along solver paths.
  const ActiveSet all = ActiveSet::full(sp.data.feature_norms());
  for (double t : {0.0, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    const Matrix B = t * ref.B;
    const Matrix Z = sp.data.X().multiply(B);
    const DualMatrix raw = dual_from_predictions(kind, Z, sp.data.Y());
    const DualPoint dp = certify(sp.data, B, Z, raw, sp.data.X().transpose_multiply(raw), w,
                                 o.fault_skip_scaling);
    const FixpointResult fx = screening_fixpoint(dp.scores, dp.cert, all, w, 0);
    for (const ScreeningEvent& ev : fx.events) {
      for (Index id : ev.removed) {
        const double norm = ref.B.row(id).norm();
        checks.safety.expect(norm <= 1e-8, seed,
                             "rule at t = " + std::to_string(t) + " screened feature " +
                                 std::to_string(id) + " with " + fmt("reference row norm", norm));
      }
    }
  }

  const double p_ref = objective(sp.data, ref.B, w);
  const double diff = std::abs(objective(sp.data, apgd.B, w) - p_ref);
  checks.equivalence.expect(diff <= 1e-8, seed, fmt("apgd objective difference", diff));
  if (o.quick) return;
  SpgdConfig plain = spgd_cfg;
  plain.screening_enabled = false;
  plain.fault_skip_scaling = false;
  const double spgd_diff = std::abs(objective(sp.data, spgd.B, w) -
                                    objective(sp.data, solve_spgd(sp.data, w, plain).B, w));
  checks.equivalence.expect(spgd_diff <= 1e-8, seed, fmt("spgd objective difference", spgd_diff));
}

std::vector<PropertyResult> check_solvers(const Options& o) {
  SolverChecks checks;
  const std::vector<std::pair<Index, Index>> sizes =
      o.quick ? std::vector<std::pair<Index, Index>>{{30, 50}, {60, 80}}
              : std::vector<std::pair<Index, Index>>{{30, 50}, {100, 50}, {50, 200}, {100, 200}};
  const int per_size = o.quick ? 3 : 4;
  std::uint64_t seed = o.seed + 4000;
  for (LossKind kind : {LossKind::squared, LossKind::multinomial}) {
    for (const auto& [n, d] : sizes) {
      for (int k = 0; k < per_size; ++k, ++seed) {
        try {
          solver_instance(o, checks, seed, kind, n, d);
        } catch (const std::exception& e) {
          checks.safety.fail(seed, std::string("solver error: ") + e.what());
        }
      }
    }
  }
  return {checks.gap.result(), checks.safety.result(), checks.equivalence.result()};
}

}  // namespace

std::vector<PropertyResult> run_all(const Options& options,
                                    const std::function<void(const PropertyResult&)>& on_result) {
  std::vector<PropertyResult> results;
  auto report = [&](PropertyResult r) {
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  };
  report(check_pava(options));
  report(check_prox(options));
  report(check_gradient(options));
  report(check_feasibility(options));
  for (PropertyResult& r : check_solvers(options)) report(std::move(r));
  return results;
}

}  // namespace gowl::verify
