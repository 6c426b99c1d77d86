// Command-line front end: train, bench and verify on top of the C API.

#include <gowl/gowl.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitError = 1;
constexpr int kExitIterationCap = 2;
constexpr int kExitUsage = 64;
constexpr int kExitNoInput = 66;

constexpr const char* kTraceHeader =
    "iteration,wall_time_s,primal,dual,gap,active_count,screened_cumulative,screening_rate";

// Flag values that parse but make no sense (exit 64).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data that cannot be read or parsed (exit 66).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(gowl_status s, const std::string& context) {
  if (s != GOWL_OK) throw std::runtime_error(context + ": " + gowl_last_error());
}

struct ProblemDeleter {
  void operator()(gowl_problem* p) const { gowl_problem_free(p); }
};
struct WeightsDeleter {
  void operator()(gowl_weights* w) const { gowl_weights_free(w); }
};
struct SolutionDeleter {
  void operator()(gowl_solution* s) const { gowl_solution_free(s); }
};
using ProblemPtr = std::unique_ptr<gowl_problem, ProblemDeleter>;
using WeightsPtr = std::unique_ptr<gowl_weights, WeightsDeleter>;
using SolutionPtr = std::unique_ptr<gowl_solution, SolutionDeleter>;

// "k1=v1,k2=v2" -> map.
std::map<std::string, std::string> parse_pairs(const std::string& text, const std::string& what) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("bad " + what + " item '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number for '" + key + "': " + s);
  }
}

long long to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad integer for '" + key + "': " + s);
  }
}

struct RunOptions {
  std::string model = "regression";
  std::string solver = "apgd";
  std::string data;
  std::string format = "libsvm";
  std::string synth;
  std::string weights = "oscar:p=0.1";
  std::string screen = "on";
  double tol = 1e-6;
  std::uint64_t seed = 0;
  std::string out;
  long long targets = 1;
  bool header = false;
  bool no_standardize = false;
  long long min_features = 0;
  long long max_iter = 100000;
  long long batch = 0;
  long long inner = 30;
  double step = 0.0;
  long long screen_every = 1;
  long long warmup_iter = 10;
  double warmup_ratio = 10.0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--model", o.model, "regression or multinomial")
      ->check(CLI::IsMember({"regression", "multinomial"}))
      ->capture_default_str();
  cmd->add_option("--solver", o.solver, "apgd or spgd")
      ->check(CLI::IsMember({"apgd", "spgd"}))
      ->capture_default_str();
  auto* data = cmd->add_option("--data", o.data, "input file (LIBSVM or CSV)");
  auto* synth = cmd->add_option(
      "--synth", o.synth, "synthetic spec n=,d=,q=,support=,groups=,rho=,noise=[,seed=]");
  data->excludes(synth);
  synth->excludes(data);
  cmd->add_option("--format", o.format, "input format: libsvm or csv")
      ->check(CLI::IsMember({"libsvm", "csv"}))
      ->capture_default_str();
  cmd->add_option("--targets", o.targets, "leading target columns of CSV regression data")
      ->capture_default_str();
  cmd->add_flag("--header", o.header, "CSV input starts with a header row");
  cmd->add_flag("--no-standardize", o.no_standardize, "keep CSV columns unstandardized");
  cmd->add_option("--min-features", o.min_features, "pad LIBSVM data to this many features");
  cmd->add_option("--weights", o.weights,
                  "oscar:p=P | oscar:index=I,tau=T | oscar:alpha1=A,alpha2=B | file:PATH")
      ->capture_default_str();
  cmd->add_option("--screen", o.screen, "safe screening: on or off")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  cmd->add_option("--tol", o.tol, "duality-gap tolerance")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for synthetic data and SPGD sampling")
      ->capture_default_str();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--max-iter", o.max_iter, "outer iteration cap")->capture_default_str();
  cmd->add_option("--batch", o.batch, "SPGD mini-batch size (0: min(32, n))")
      ->capture_default_str();
  cmd->add_option("--inner", o.inner, "SPGD inner iterations per snapshot")->capture_default_str();
  cmd->add_option("--step", o.step, "step size (0: solver default)")->capture_default_str();
  cmd->add_option("--screen-every", o.screen_every, "screen every k outer iterations")
      ->capture_default_str();
  cmd->add_option("--warmup-iter", o.warmup_iter, "outer iterations before screening starts")
      ->capture_default_str();
  cmd->add_option("--warmup-ratio", o.warmup_ratio,
                  "screening also starts once gap <= ratio * initial primal")
      ->capture_default_str();
  cmd->add_option("--config", "key=value file mirroring the flags (flags given on the "
                              "command line win)");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splices "--key value" pairs from a key=value config file into the
// argument list, right after the subcommand, skipping keys that are already
// given as flags. Boolean flags take true/false values.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.size() < 2) return args;
  std::string path;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path + "'");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin() + 2, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) continue;
    if (key == "header" || key == "no-standardize" || key == "json" || key == "quick") {
      if (value == "true" || value == "1" || value == "on") extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(args.begin() + 2, extra.begin(), extra.end());
  return args;
}

gowl_loss loss_of(const RunOptions& o) {
  return o.model == "multinomial" ? GOWL_LOSS_MULTINOMIAL : GOWL_LOSS_SQUARED;
}

struct LoadedProblem {
  ProblemPtr problem;
  json source;
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t q = 0;
};

LoadedProblem load_problem(const RunOptions& o) {
  LoadedProblem lp;
  gowl_problem* raw = nullptr;
  if (!o.synth.empty()) {
    gowl_synth_spec spec;
    gowl_synth_spec_default(&spec);
    spec.seed = o.seed;
    for (const auto& [key, value] : parse_pairs(o.synth, "--synth")) {
      if (key == "n") {
        spec.n = to_int(value, key);
      } else if (key == "d") {
        spec.d = to_int(value, key);
      } else if (key == "q") {
        spec.q = to_int(value, key);
      } else if (key == "support") {
        spec.support_size = to_int(value, key);
      } else if (key == "groups") {
        spec.group_count = to_int(value, key);
      } else if (key == "rho") {
        spec.correlation = to_double(value, key);
      } else if (key == "noise") {
        spec.noise_sigma = to_double(value, key);
      } else if (key == "seed") {
        spec.seed = static_cast<std::uint64_t>(to_int(value, key));
      } else {
        throw UsageError("unknown --synth key '" + key + "'");
      }
    }
    if (gowl_problem_synthetic(&spec, loss_of(o), &raw) != GOWL_OK) {
      throw UsageError(std::string("--synth: ") + gowl_last_error());
    }
    lp.source = {{"kind", "synthetic"},     {"n", spec.n},
                 {"d", spec.d},             {"q", spec.q},
                 {"support", spec.support_size}, {"groups", spec.group_count},
                 {"rho", spec.correlation}, {"noise", spec.noise_sigma},
                 {"seed", spec.seed}};
  } else if (!o.data.empty()) {
    gowl_status s;
    if (o.format == "csv") {
      s = gowl_problem_read_csv(o.data.c_str(), loss_of(o), o.targets, o.header ? 1 : 0,
                                o.no_standardize ? 0 : 1, &raw);
    } else {
      s = gowl_problem_read_libsvm(o.data.c_str(), loss_of(o), o.min_features, &raw);
    }
    if (s == GOWL_ERR_IO || s == GOWL_ERR_PARSE) {
      throw InputError(o.data + ": " + gowl_last_error());
    }
    check(s, "loading " + o.data);
    lp.source = {{"kind", o.format}, {"path", o.data}};
  } else {
    throw UsageError("one of --data or --synth is required");
  }
  lp.problem.reset(raw);
  check(gowl_problem_shape(raw, &lp.n, &lp.d, &lp.q), "shape");
  return lp;
}

std::vector<double> read_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open weight file '" + path + "'");
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(to_double(tok, "weight file"));
  return values;
}

WeightsPtr make_weights(const RunOptions& o, const LoadedProblem& lp, json& echo) {
  gowl_weights* raw = nullptr;
  gowl_status s = GOWL_OK;
  const std::string& spec = o.weights;
  if (spec.rfind("file:", 0) == 0) {
    const std::vector<double> values = read_weight_file(spec.substr(5));
    if (static_cast<std::int64_t>(values.size()) != lp.d) {
      throw UsageError("weight file has " + std::to_string(values.size()) + " values, need " +
                       std::to_string(lp.d));
    }
    s = gowl_weights_from_array(values.data(), lp.d, &raw);
    echo = {{"kind", "file"}, {"path", spec.substr(5)}};
  } else if (spec.rfind("oscar:", 0) == 0) {
    const auto kv = parse_pairs(spec.substr(6), "--weights");
    if (kv.count("alpha1")) {
      const double a1 = to_double(kv.at("alpha1"), "alpha1");
      const double a2 = kv.count("alpha2") ? to_double(kv.at("alpha2"), "alpha2") : 0.0;
      s = gowl_weights_oscar(lp.d, a1, a2, &raw);
      echo = {{"kind", "oscar"}, {"alpha1", a1}, {"alpha2", a2}};
    } else if (kv.count("p")) {
      const double p = to_double(kv.at("p"), "p");
      s = gowl_weights_oscar_scaled(lp.problem.get(), p, &raw);
      echo = {{"kind", "oscar"}, {"p", p}};
    } else if (kv.count("index") && kv.count("tau")) {
      const long long index = to_int(kv.at("index"), "index");
      if (index < 1 || index > 3) throw UsageError("--weights index must be 1, 2 or 3");
      const double tau = to_double(kv.at("tau"), "tau");
      const double p = static_cast<double>(index) * std::exp(-tau);
      s = gowl_weights_oscar_scaled(lp.problem.get(), p, &raw);
      echo = {{"kind", "oscar"}, {"index", index}, {"tau", tau}, {"p", p}};
    } else {
      throw UsageError("--weights oscar: needs p=, index=/tau= or alpha1=");
    }
  } else {
    throw UsageError("unknown --weights spec '" + spec + "'");
  }
  if (s != GOWL_OK) throw UsageError(std::string("--weights: ") + gowl_last_error());
  WeightsPtr w(raw);
  double largest = 0.0;
  if (gowl_weights_values(raw, &largest, 1) > 0) echo["largest_weight"] = largest;
  return w;
}

gowl_solver_config solver_config(const RunOptions& o, bool screening) {
  gowl_solver_config c;
  gowl_solver_config_default(&c);
  c.solver = o.solver == "spgd" ? GOWL_SOLVER_SPGD : GOWL_SOLVER_APGD;
  c.gap_tolerance = o.tol;
  c.max_outer_iterations = o.max_iter;
  c.screening = screening ? 1 : 0;
  c.screen_every = o.screen_every;
  c.warmup_iterations = o.warmup_iter;
  c.warmup_gap_ratio = o.warmup_ratio;
  c.step_size = o.step;
  c.batch_size = o.batch;
  c.inner_iterations = o.inner;
  c.seed = o.seed;
  return c;
}

void validate(const RunOptions& o) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  if (o.max_iter < 0) throw UsageError("--max-iter must be nonnegative");
  if (o.screen_every < 1) throw UsageError("--screen-every must be at least 1");
  if (o.inner < 1) throw UsageError("--inner must be at least 1");
  if (o.batch < 0) throw UsageError("--batch must be nonnegative");
  if (o.step < 0.0) throw UsageError("--step must be nonnegative");
}

json config_echo(const RunOptions& o) {
  return {{"model", o.model},
          {"solver", o.solver},
          {"screen", o.screen},
          {"tol", o.tol},
          {"seed", o.seed},
          {"max_iter", o.max_iter},
          {"batch", o.batch},
          {"inner", o.inner},
          {"step", o.step},
          {"screen_every", o.screen_every},
          {"warmup_iter", o.warmup_iter},
          {"warmup_ratio", o.warmup_ratio}};
}

SolutionPtr solve(const LoadedProblem& lp, const gowl_weights* w, const gowl_solver_config& c) {
  gowl_solution* raw = nullptr;
  check(gowl_solve(lp.problem.get(), w, &c, &raw), "solver");
  return SolutionPtr(raw);
}

gowl_solution_info info_of(const gowl_solution* s) {
  gowl_solution_info info;
  check(gowl_solution_get_info(s, &info), "solution info");
  return info;
}

std::vector<std::int64_t> nonzero_rows(const gowl_solution* s) {
  std::vector<std::int64_t> rows(gowl_solution_nonzero_rows(s, 0.0, nullptr, 0));
  gowl_solution_nonzero_rows(s, 0.0, rows.data(), rows.size());
  return rows;
}

std::vector<double> coefficients(const gowl_solution* s) {
  std::vector<double> B(gowl_solution_coefficients(s, nullptr, 0));
  gowl_solution_coefficients(s, B.data(), B.size());
  return B;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace(const gowl_solution* s, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kTraceHeader << '\n';
  const size_t rows = gowl_solution_trace_length(s);
  for (size_t k = 0; k < rows; ++k) {
    gowl_trace_row r;
    check(gowl_solution_trace_row(s, k, &r), "trace");
    out << r.iteration << ',' << number(r.wall_time_s) << ',' << number(r.primal) << ','
        << number(r.dual) << ',' << number(r.gap) << ',' << r.active_count << ','
        << r.screened_cumulative << ',' << number(r.screening_rate) << '\n';
  }
}

// Binary layout: 8-byte magic "GOWLSOL1", int64 d, int64 q, d*q doubles
// (row-major), all little-endian.
void write_solution(const gowl_solution* s, const fs::path& dir) {
  const gowl_solution_info info = info_of(s);
  const std::vector<double> B = coefficients(s);
  {
    std::ofstream out(dir / "solution.bin", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write solution.bin");
    out.write("GOWLSOL1", 8);
    const std::int64_t dims[2] = {info.d, info.q};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(B.data()),
              static_cast<std::streamsize>(B.size() * sizeof(double)));
  }
  std::ofstream csv(dir / "solution.csv");
  if (!csv) throw std::runtime_error("cannot write solution.csv");
  for (std::int64_t i = 0; i < info.d; ++i) {
    for (std::int64_t j = 0; j < info.q; ++j) {
      if (j) csv << ',';
      csv << number(B[static_cast<size_t>(i * info.q + j)]);
    }
    csv << '\n';
  }
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

fs::path prepare_out(const std::string& out) {
  if (out.empty()) return {};
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create '" + out + "': " + ec.message());
  return fs::path(out);
}

std::vector<double> class_labels(const gowl_problem* p) {
  std::vector<double> labels(gowl_problem_class_labels(p, nullptr, 0));
  gowl_problem_class_labels(p, labels.data(), labels.size());
  return labels;
}

std::vector<std::int64_t> true_support(const gowl_problem* p) {
  std::vector<std::int64_t> s(gowl_problem_true_support(p, nullptr, 0));
  gowl_problem_true_support(p, s.data(), s.size());
  return s;
}

json dataset_json(const LoadedProblem& lp) {
  json j = {{"n", lp.n},
            {"d", lp.d},
            {"q", lp.q},
            {"sparse", gowl_problem_is_sparse(lp.problem.get()) != 0},
            {"source", lp.source}};
  if (gowl_problem_loss(lp.problem.get()) == GOWL_LOSS_MULTINOMIAL) {
    j["class_labels"] = class_labels(lp.problem.get());
  }
  return j;
}

int cmd_train(const RunOptions& o) {
  validate(o);
  const LoadedProblem lp = load_problem(o);
  json weights_echo;
  const WeightsPtr w = make_weights(o, lp, weights_echo);
  const fs::path dir = prepare_out(o.out);

  const SolutionPtr sol = solve(lp, w.get(), solver_config(o, o.screen == "on"));
  const gowl_solution_info info = info_of(sol.get());
  const std::vector<std::int64_t> nz = nonzero_rows(sol.get());
  // The run's own final support stands in for the optimum's.
  check(gowl_solution_backfill_screening_rate(sol.get(), lp.d - static_cast<std::int64_t>(nz.size())),
        "backfill");

  json summary;
  summary["schema_version"] = 1;
  summary["command"] = "train";
  summary["config"] = config_echo(o);
  summary["config"]["weights"] = weights_echo;
  summary["dataset"] = dataset_json(lp);
  summary["solver"] = o.solver;
  summary["wall_time_seconds"] = info.wall_time_s;
  summary["iterations"] = info.iterations;
  summary["converged"] = info.converged != 0;
  summary["final_gap"] = info.final_gap;
  summary["final_primal"] = info.final_primal;
  summary["final_active_count"] = info.final_active;
  summary["nonzero_rows"] = nz;
  summary["nonzero_row_count"] = nz.size();
  summary["screening_events"] = gowl_solution_event_count(sol.get());
  summary["restarts"] = info.restarts;
  summary["step_size"] = info.step_size;
  summary["screening_rate_curve"] = dir.empty() ? json(nullptr) : json("trace.csv");
  if (gowl_problem_has_truth(lp.problem.get())) {
    const std::vector<std::int64_t> truth = true_support(lp.problem.get());
    summary["true_support"] = truth;
    summary["support_recovered"] = truth == nz;
  }

  if (!dir.empty()) {
    write_solution(sol.get(), dir);
    write_trace(sol.get(), dir / "trace.csv");
    write_json(summary, dir / "summary.json");
  }
  std::cout << summary.dump(2) << '\n';
  return info.converged ? kExitConverged : kExitIterationCap;
}

struct Timing {
  std::vector<double> wall;
  std::vector<std::int64_t> iterations;
  double objective = 0.0;
  bool all_converged = true;
};

json timing_json(const Timing& t) {
  const double n = static_cast<double>(t.wall.size());
  const double mean = std::accumulate(t.wall.begin(), t.wall.end(), 0.0) / n;
  json j = {{"mean_wall_s", mean},
            {"min_wall_s", *std::min_element(t.wall.begin(), t.wall.end())},
            {"wall_s", t.wall},
            {"iterations", t.iterations},
            {"objective", t.objective},
            {"all_converged", t.all_converged}};
  if (t.wall.size() > 1) {
    double ss = 0.0;
    for (double x : t.wall) ss += (x - mean) * (x - mean);
    j["std_wall_s"] = std::sqrt(ss / (n - 1.0));
  }
  return j;
}

int cmd_bench(const RunOptions& o, long long repeats, bool json_only) {
  validate(o);
  if (repeats < 1) throw UsageError("--repeats must be at least 1");
  const LoadedProblem lp = load_problem(o);
  json weights_echo;
  const WeightsPtr w = make_weights(o, lp, weights_echo);
  const fs::path dir = prepare_out(o.out);

  Timing off;
  Timing on;
  SolutionPtr last_off;
  SolutionPtr last_on;
  std::vector<double> b_off;
  std::vector<double> b_on;
  for (long long r = 0; r < repeats; ++r) {
    // Interleaved: off, on, off, on, ...
    for (bool screening : {false, true}) {
      SolutionPtr sol = solve(lp, w.get(), solver_config(o, screening));
      const gowl_solution_info info = info_of(sol.get());
      Timing& t = screening ? on : off;
      t.wall.push_back(info.wall_time_s);
      t.iterations.push_back(info.iterations);
      t.all_converged = t.all_converged && info.converged != 0;
      std::vector<double> B = coefficients(sol.get());
      check(gowl_objective(lp.problem.get(), w.get(), B.data(), &t.objective), "objective");
      (screening ? last_on : last_off) = std::move(sol);
      (screening ? b_on : b_off) = std::move(B);
    }
  }

  // The unscreened solution's support defines the inactive set.
  const std::vector<std::int64_t> reference_support = nonzero_rows(last_off.get());
  const std::int64_t inactive = lp.d - static_cast<std::int64_t>(reference_support.size());
  check(gowl_solution_backfill_screening_rate(last_on.get(), inactive), "backfill");
  double final_rate = 1.0;
  const size_t rows = gowl_solution_trace_length(last_on.get());
  if (rows > 0) {
    gowl_trace_row last;
    check(gowl_solution_trace_row(last_on.get(), rows - 1, &last), "trace");
    final_rate = last.screening_rate;
  }

  const double mean_off = timing_json(off)["mean_wall_s"].get<double>();
  const double mean_on = timing_json(on)["mean_wall_s"].get<double>();
  json report;
  report["schema_version"] = 1;
  report["command"] = "bench";
  report["config"] = config_echo(o);
  report["config"]["weights"] = weights_echo;
  report["config"]["repeats"] = repeats;
  report["dataset"] = dataset_json(lp);
  report["solver"] = o.solver;
  report["screen_off"] = timing_json(off);
  report["screen_on"] = timing_json(on);
  report["speedup_ratio"] = mean_off / mean_on;
  report["speedup_ratio_min"] = off.wall.size() ? timing_json(off)["min_wall_s"].get<double>() /
                                                      timing_json(on)["min_wall_s"].get<double>()
                                                : 0.0;
  report["objective_difference"] = std::abs(off.objective - on.objective);
  report["final_screening_rate"] = final_rate;
  report["reference_inactive_count"] = inactive;
  report["screening_rate_curve"] = dir.empty() ? json(nullptr) : json("trace.csv");

  if (!dir.empty()) {
    write_trace(last_on.get(), dir / "trace.csv");
    write_json(report, dir / "bench.json");
  }
  if (json_only) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::cout << std::left << std::setw(12) << "screening" << std::right << std::setw(14)
              << "mean wall s" << std::setw(14) << "min wall s" << std::setw(12) << "iterations"
              << std::setw(24) << "objective" << '\n';
    for (bool screening : {false, true}) {
      const Timing& t = screening ? on : off;
      const json j = timing_json(t);
      std::cout << std::left << std::setw(12) << (screening ? "on" : "off") << std::right
                << std::setw(14) << std::setprecision(4) << j["mean_wall_s"].get<double>()
                << std::setw(14) << j["min_wall_s"].get<double>() << std::setw(12)
                << t.iterations.back() << std::setw(24) << std::setprecision(15) << t.objective
                << '\n';
    }
    std::cout << std::setprecision(4) << "speedup ratio (mean): " << mean_off / mean_on << '\n'
              << "final screening rate: " << final_rate << '\n'
              << "objective difference: " << std::setprecision(3)
              << report["objective_difference"].get<double>() << '\n';
  }
  return off.all_converged && on.all_converged ? kExitConverged : kExitIterationCap;
}

int cmd_verify(bool quick, const std::string& fault, std::uint64_t seed) {
  gowl_verify_options options;
  gowl_verify_options_default(&options);
  options.quick = quick ? 1 : 0;
  if (!fault.empty()) {
    if (fault != "skip-scaling") throw UsageError("unknown --fault '" + fault + "'");
    options.fault_skip_scaling = 1;
  }
  if (seed != 0) options.seed = seed;
  int all_passed = 0;
  auto report = [](const char* property, int passed, uint64_t failing_seed, const char* detail,
                   void*) {
    if (passed) {
      std::cout << "PASS " << property << '\n';
    } else {
      std::cout << "FAIL " << property << " (seed " << failing_seed << "): " << detail << '\n';
    }
    std::cout.flush();
  };
  check(gowl_verify(&options, report, nullptr, &all_passed), "verify");
  return all_passed ? kExitConverged : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("GOWL_NUM_THREADS")) {
    gowl_set_num_threads(std::atoi(threads));
  }

  CLI::App app{"Group OWL regression and classification with safe screening"};
  app.require_subcommand(1);

  RunOptions train_opts;
  CLI::App* train = app.add_subcommand("train", "fit one model and write its artifacts");
  add_run_options(train, train_opts);

  RunOptions bench_opts;
  long long repeats = 5;
  bool json_only = false;
  CLI::App* bench = app.add_subcommand("bench", "time screening off vs on, interleaved");
  add_run_options(bench, bench_opts);
  bench->add_option("--repeats,-r", repeats, "trials per setting")->capture_default_str();
  bench->add_flag("--json", json_only, "print the JSON report instead of a table");

  bool quick = false;
  std::string fault;
  std::uint64_t verify_seed = 0;
  CLI::App* verify = app.add_subcommand("verify", "run the randomized property checks");
  verify->add_flag("--quick", quick, "reduced suite");
  verify->add_option("--fault", fault, "test-only fault injection: skip-scaling");
  verify->add_option("--seed", verify_seed, "base seed (0: built-in)");

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoInput;
  }
  std::vector<char*> cargs;
  for (std::string& a : args) cargs.push_back(a.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_opts);
    if (*bench) return cmd_bench(bench_opts, repeats, json_only);
    if (*verify) return cmd_verify(quick, fault, verify_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
