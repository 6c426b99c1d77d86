#include <gowl/gowl.h>

#include <gowl/data.hpp>
#include <gowl/solver.hpp>

#include "verify.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cstring>
#include <fstream>
#include <new>
#include <optional>
#include <string>

struct gowl_problem {
  gowl::ProblemData data;
  std::vector<double> class_labels;
  std::vector<gowl::Index> true_support;
  bool has_truth = false;
};

struct gowl_weights {
  gowl::WeightVector w;
};

struct gowl_solution {
  gowl::Solution sol;
  double wall_time_s = 0.0;
};

namespace {

thread_local std::string last_error;

gowl_status fail(gowl_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps exceptions from the core onto status codes.
template <class F>
gowl_status guarded(F&& body) {
  try {
    body();
    return GOWL_OK;
  } catch (const gowl::ParseError& e) {
    return fail(GOWL_ERR_PARSE, e.what());
  } catch (const gowl::IoError& e) {
    return fail(GOWL_ERR_IO, e.what());
  } catch (const gowl::DivergenceError& e) {
    return fail(GOWL_ERR_DIVERGED, e.what());
  } catch (const gowl::Error& e) {
    const std::string what = e.what();
    if (what == "duality violation" || what == "infeasible dual point") {
      return fail(GOWL_ERR_NUMERIC, what);
    }
    return fail(GOWL_ERR_INVALID_ARGUMENT, what);
  } catch (const std::bad_alloc&) {
    return fail(GOWL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GOWL_ERR_INTERNAL, e.what());
  }
}

gowl::LossKind to_kind(gowl_loss loss) {
  switch (loss) {
    case GOWL_LOSS_SQUARED:
      return gowl::LossKind::squared;
    case GOWL_LOSS_MULTINOMIAL:
      return gowl::LossKind::multinomial;
  }
  throw gowl::Error("unknown loss");
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) throw gowl::Error(std::string(what) + " must not be null");
}

template <class T, class U>
size_t copy_out(const std::vector<T>& src, U* out, size_t capacity) {
  if (out) {
    const size_t m = std::min(capacity, src.size());
    for (size_t i = 0; i < m; ++i) out[i] = static_cast<U>(src[i]);
  }
  return src.size();
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

extern "C" {

const char* gowl_last_error(void) { return last_error.c_str(); }

const char* gowl_version(void) { return "0.1.0"; }

const char* gowl_status_string(gowl_status status) {
  switch (status) {
    case GOWL_OK:
      return "ok";
    case GOWL_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case GOWL_ERR_PARSE:
      return "parse error";
    case GOWL_ERR_IO:
      return "i/o error";
    case GOWL_ERR_DIVERGED:
      return "diverged";
    case GOWL_ERR_NUMERIC:
      return "numerical failure";
    case GOWL_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void gowl_set_num_threads(int threads) {
  if (threads > 0) Eigen::setNbThreads(threads);
}

gowl_status gowl_problem_from_dense(const double* X, const double* Y, int64_t n, int64_t d,
                                    int64_t q, gowl_loss loss, gowl_problem** out) {
  return guarded([&] {
    require(X, "X");
    require(Y, "Y");
    require(out, "out");
    if (n < 1 || d < 1 || q < 1) throw gowl::Error("n, d and q must be positive");
    gowl::Matrix x = Eigen::Map<const RowMajor>(X, n, d);
    gowl::Matrix y = Eigen::Map<const RowMajor>(Y, n, q);
    *out = new gowl_problem{gowl::ProblemData(gowl::Design(std::move(x)), std::move(y), to_kind(loss)),
                            {}, {}, false};
  });
}

gowl_status gowl_problem_read_libsvm(const char* path, gowl_loss loss, int64_t min_features,
                                     gowl_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    gowl::LibsvmOptions options;
    options.kind = to_kind(loss);
    options.min_features = min_features;
    gowl::LabelledProblem p = gowl::read_libsvm(path, options);
    *out = new gowl_problem{std::move(p.data), std::move(p.class_labels), {}, false};
  });
}

gowl_status gowl_problem_read_csv(const char* path, gowl_loss loss, int64_t targets, int header,
                                  int standardize, gowl_problem** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    gowl::CsvOptions options;
    options.kind = to_kind(loss);
    options.targets = targets;
    options.header = header != 0;
    options.standardize = standardize != 0;
    gowl::LabelledProblem p = gowl::read_csv(path, options);
    *out = new gowl_problem{std::move(p.data), std::move(p.class_labels), {}, false};
  });
}

void gowl_synth_spec_default(gowl_synth_spec* spec) {
  if (!spec) return;
  const gowl::SyntheticSpec s;
  *spec = gowl_synth_spec{s.n, s.d, s.q, s.support_size, s.group_count, s.correlation,
                          s.noise_sigma, s.seed};
}

gowl_status gowl_problem_synthetic(const gowl_synth_spec* spec, gowl_loss loss,
                                   gowl_problem** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    gowl::SyntheticSpec s;
    s.n = spec->n;
    s.d = spec->d;
    s.q = spec->q;
    s.support_size = spec->support_size;
    s.group_count = spec->group_count;
    s.correlation = spec->correlation;
    s.noise_sigma = spec->noise_sigma;
    s.seed = spec->seed;
    gowl::SyntheticProblem p = gowl::synth_correlated(s, to_kind(loss));
    std::vector<double> labels;
    if (p.data.kind() == gowl::LossKind::multinomial) {
      for (gowl::Index c = 0; c < p.data.q(); ++c) labels.push_back(static_cast<double>(c));
    }
    *out = new gowl_problem{std::move(p.data), std::move(labels), std::move(p.support), true};
  });
}

void gowl_problem_free(gowl_problem* problem) { delete problem; }

gowl_status gowl_problem_shape(const gowl_problem* problem, int64_t* n, int64_t* d, int64_t* q) {
  return guarded([&] {
    require(problem, "problem");
    if (n) *n = problem->data.n();
    if (d) *d = problem->data.d();
    if (q) *q = problem->data.q();
  });
}

gowl_loss gowl_problem_loss(const gowl_problem* problem) {
  return problem && problem->data.kind() == gowl::LossKind::multinomial ? GOWL_LOSS_MULTINOMIAL
                                                                         : GOWL_LOSS_SQUARED;
}

int gowl_problem_is_sparse(const gowl_problem* problem) {
  return problem && problem->data.X().sparse_rows() != nullptr;
}

size_t gowl_problem_class_labels(const gowl_problem* problem, double* out, size_t capacity) {
  return problem ? copy_out(problem->class_labels, out, capacity) : 0;
}

size_t gowl_problem_true_support(const gowl_problem* problem, int64_t* out, size_t capacity) {
  return problem ? copy_out(problem->true_support, out, capacity) : 0;
}

int gowl_problem_has_truth(const gowl_problem* problem) { return problem && problem->has_truth; }

gowl_status gowl_problem_write_libsvm(const gowl_problem* problem, const char* path) {
  return guarded([&] {
    require(problem, "problem");
    require(path, "path");
    std::ofstream file(path);
    if (!file) throw gowl::IoError(std::string("cannot write '") + path + "'");
    gowl::write_libsvm(file, problem->data, problem->class_labels);
    if (!file) throw gowl::IoError(std::string("write failed for '") + path + "'");
  });
}

gowl_status gowl_problem_max_correlation(const gowl_problem* problem, double* out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    *out = gowl::max_feature_correlation(problem->data);
  });
}

gowl_status gowl_weights_oscar(int64_t d, double alpha1, double alpha2, gowl_weights** out) {
  return guarded([&] {
    require(out, "out");
    *out = new gowl_weights{gowl::oscar_weights(d, gowl::OscarSpec::with_alphas(alpha1, alpha2))};
  });
}

gowl_status gowl_weights_oscar_scaled(const gowl_problem* problem, double p, gowl_weights** out) {
  return guarded([&] {
    require(problem, "problem");
    require(out, "out");
    *out = new gowl_weights{
        gowl::oscar_weights(problem->data.d(), gowl::OscarSpec::scaled(p), &problem->data)};
  });
}

gowl_status gowl_weights_from_array(const double* values, int64_t d, gowl_weights** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    if (d < 1) throw gowl::Error("d must be positive");
    *out = new gowl_weights{gowl::WeightVector(Eigen::Map<const gowl::Vector>(values, d))};
  });
}

void gowl_weights_free(gowl_weights* weights) { delete weights; }

int64_t gowl_weights_size(const gowl_weights* weights) { return weights ? weights->w.size() : 0; }

size_t gowl_weights_values(const gowl_weights* weights, double* out, size_t capacity) {
  if (!weights) return 0;
  const gowl::Vector& v = weights->w.values();
  return copy_out(std::vector<double>(v.begin(), v.end()), out, capacity);
}

void gowl_solver_config_default(gowl_solver_config* config) {
  if (!config) return;
  const gowl::ApgdConfig a;
  const gowl::SpgdConfig s;
  *config = gowl_solver_config{GOWL_SOLVER_APGD,
                               a.gap_tolerance,
                               a.max_outer_iterations,
                               1,
                               a.screen_every,
                               a.warmup.iterations,
                               a.warmup.gap_ratio,
                               0.0,
                               s.batch_size,
                               s.inner_iterations,
                               s.seed,
                               0};
}

gowl_status gowl_solve(const gowl_problem* problem, const gowl_weights* weights,
                       const gowl_solver_config* config, gowl_solution** out) {
  return guarded([&] {
    require(problem, "problem");
    require(weights, "weights");
    require(config, "config");
    require(out, "out");
    gowl::Warmup warmup;
    warmup.iterations = config->warmup_iterations;
    warmup.gap_ratio = config->warmup_gap_ratio;
    const std::optional<double> step =
        config->step_size > 0.0 ? std::optional<double>(config->step_size) : std::nullopt;

    const auto start = std::chrono::steady_clock::now();
    gowl::Solution sol;
    if (config->solver == GOWL_SOLVER_APGD) {
      gowl::ApgdConfig c;
      c.gap_tolerance = config->gap_tolerance;
      c.max_outer_iterations = config->max_outer_iterations;
      c.screening_enabled = config->screening != 0;
      c.screen_every = config->screen_every;
      c.warmup = warmup;
      c.step_size_override = step;
      c.fault_skip_scaling = config->fault_skip_scaling != 0;
      sol = gowl::solve_apgd(problem->data, weights->w, c);
    } else if (config->solver == GOWL_SOLVER_SPGD) {
      gowl::SpgdConfig c;
      c.gap_tolerance = config->gap_tolerance;
      c.max_outer_iterations = config->max_outer_iterations;
      c.screening_enabled = config->screening != 0;
      c.screen_every = config->screen_every;
      c.warmup = warmup;
      c.step_size = step;
      c.batch_size = config->batch_size;
      c.inner_iterations = config->inner_iterations;
      c.seed = config->seed;
      c.fault_skip_scaling = config->fault_skip_scaling != 0;
      sol = gowl::solve_spgd(problem->data, weights->w, c);
    } else {
      throw gowl::Error("unknown solver");
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *out = new gowl_solution{std::move(sol), elapsed};
  });
}

void gowl_solution_free(gowl_solution* solution) { delete solution; }

gowl_status gowl_solution_get_info(const gowl_solution* solution, gowl_solution_info* info) {
  return guarded([&] {
    require(solution, "solution");
    require(info, "info");
    const gowl::Solution& s = solution->sol;
    *info = gowl_solution_info{s.converged ? 1 : 0, s.iterations,     s.final_gap,
                               s.final_primal,      s.final_active.size(), s.step_size,
                               s.restarts,          s.max_restart_increase, solution->wall_time_s,
                               s.B.rows(),          s.B.cols()};
  });
}

size_t gowl_solution_coefficients(const gowl_solution* solution, double* out, size_t capacity) {
  if (!solution) return 0;
  const gowl::Matrix& B = solution->sol.B;
  const size_t count = static_cast<size_t>(B.size());
  if (out) {
    const RowMajor rm = B;
    std::memcpy(out, rm.data(), std::min(capacity, count) * sizeof(double));
  }
  return count;
}

size_t gowl_solution_nonzero_rows(const gowl_solution* solution, double tol, int64_t* out,
                                  size_t capacity) {
  return solution ? copy_out(gowl::nonzero_rows(solution->sol.B, tol), out, capacity) : 0;
}

size_t gowl_solution_trace_length(const gowl_solution* solution) {
  return solution ? solution->sol.trace.rows.size() : 0;
}

gowl_status gowl_solution_trace_row(const gowl_solution* solution, size_t k, gowl_trace_row* row) {
  return guarded([&] {
    require(solution, "solution");
    require(row, "row");
    if (k >= solution->sol.trace.rows.size()) throw gowl::Error("trace row out of range");
    const gowl::TraceRow& r = solution->sol.trace.rows[k];
    *row = gowl_trace_row{r.iteration, r.wall_time_s,  r.primal,
                          r.dual,      r.gap,          r.active_count,
                          r.screened_cumulative,       r.screening_rate};
  });
}

gowl_status gowl_solution_backfill_screening_rate(gowl_solution* solution,
                                                  int64_t inactive_at_optimum) {
  return guarded([&] {
    require(solution, "solution");
    solution->sol.trace.backfill_screening_rate(inactive_at_optimum);
  });
}

size_t gowl_solution_event_count(const gowl_solution* solution) {
  return solution ? solution->sol.active_history.size() : 0;
}

gowl_status gowl_solution_event(const gowl_solution* solution, size_t k,
                                gowl_screening_event* event) {
  return guarded([&] {
    require(solution, "solution");
    require(event, "event");
    if (k >= solution->sol.active_history.size()) throw gowl::Error("event out of range");
    const gowl::ScreeningEvent& e = solution->sol.active_history[k];
    *event = gowl_screening_event{e.outer_iteration, e.active_after, e.gap_at_test,
                                  e.removed.size()};
  });
}

size_t gowl_solution_event_removed(const gowl_solution* solution, size_t k, int64_t* out,
                                   size_t capacity) {
  if (!solution || k >= solution->sol.active_history.size()) return 0;
  return copy_out(solution->sol.active_history[k].removed, out, capacity);
}

gowl_status gowl_objective(const gowl_problem* problem, const gowl_weights* weights,
                           const double* B, double* out) {
  return guarded([&] {
    require(problem, "problem");
    require(weights, "weights");
    require(B, "B");
    require(out, "out");
    const gowl::Matrix b = Eigen::Map<const RowMajor>(B, problem->data.d(), problem->data.q());
    *out = gowl::objective(problem->data, b, weights->w);
  });
}

void gowl_verify_options_default(gowl_verify_options* options) {
  if (!options) return;
  const gowl::verify::Options o;
  *options = gowl_verify_options{o.quick ? 1 : 0, o.fault_skip_scaling ? 1 : 0, o.seed};
}

gowl_status gowl_verify(const gowl_verify_options* options, gowl_verify_callback callback,
                        void* user, int* all_passed) {
  return guarded([&] {
    gowl::verify::Options o;
    if (options) {
      o.quick = options->quick != 0;
      o.fault_skip_scaling = options->fault_skip_scaling != 0;
      o.seed = options->seed;
    }
    bool ok = true;
    gowl::verify::run_all(o, [&](const gowl::verify::PropertyResult& r) {
      ok = ok && r.passed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.seed, r.detail.c_str(), user);
    });
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
