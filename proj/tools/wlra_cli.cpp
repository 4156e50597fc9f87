// Command-line harness: data preparation, SVD start, solver runs and merged
// comparisons. Talks to the library only through the C interface.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "wlra/wlra.h"

namespace {

struct ProblemDeleter {
  void operator()(wlra_problem* p) const { wlra_problem_free(p); }
};
struct TraceDeleter {
  void operator()(wlra_trace* t) const { wlra_trace_free(t); }
};
using ProblemPtr = std::unique_ptr<wlra_problem, ProblemDeleter>;
using TracePtr = std::unique_ptr<wlra_trace, TraceDeleter>;

/// Thrown after a library call fails; main prints it and exits non-zero.
struct CliError {
  std::string message;
};

void check(wlra_status s, const std::string& context) {
  if (s == WLRA_OK) return;
  std::string msg = context.empty() ? "" : context + ": ";
  msg += wlra_last_error();
  if (s == WLRA_ERR_LAMBDA_OUT_OF_RANGE && msg.find("--lambda") == std::string::npos) {
    msg = "--lambda: " + msg;
  }
  throw CliError{msg};
}

struct InputFlags {
  std::string path;
  bool one_based = false;
  int64_t rows = 0;
  int64_t cols = 0;

  void add(CLI::App* app, bool dims = true) {
    app->add_option("--in", path, "Triplet CSV (header row,col,value)")->required();
    app->add_flag("--one-based", one_based, "Input indices start at 1");
    if (dims) {
      app->add_option("--rows", rows, "Override the row count")->check(CLI::PositiveNumber);
      app->add_option("--cols", cols, "Override the column count")->check(CLI::PositiveNumber);
    }
  }

  ProblemPtr load() const {
    wlra_problem* p = nullptr;
    check(wlra_problem_load_triplets(path.c_str(), one_based ? 1 : 0, rows, cols, &p), "");
    return ProblemPtr(p);
  }
};

/// Flags shared by `run` and `compare`.
struct RunFlags {
  std::string algorithm = "sgd-manifold";
  int64_t k = 0;
  double lambda = 0.0;
  double bigK = 0.0;
  bool bigK_preset = false;
  double iota = 0.0;
  double alpha_bar = 1.0;
  double beta = 0.5;
  uint64_t seed = 0;
  int64_t iters = -1;
  double seconds = -1.0;
  int64_t trace_every = 0;
  std::string phi_mode = "constant";
  bool deterministic = false;
  bool grad_norm = false;
  std::string name;

  bool has_lambda = false;
  bool has_bigK = false;
  bool has_iota = false;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* bigK_opt = nullptr;
  CLI::Option* iota_opt = nullptr;

  /// Records which optional values were given, on the command line or in
  /// the config file.
  void finalize() {
    has_lambda = lambda_opt->count() > 0;
    has_bigK = bigK_opt->count() > 0;
    has_iota = iota_opt->count() > 0;
  }

  void add(CLI::App* app, bool with_algorithm) {
    if (with_algorithm) {
      app->add_option("--algorithm", algorithm,
                      "sgd-manifold, sgd-euclidean, sgd-pw, als-manifold, als-euclidean, als-pw")
          ->capture_default_str();
      app->add_option("--name", name, "Column name used by compare");
    }
    app->add_option("--k", k, "Rank cap")->required()->check(CLI::PositiveNumber);
    lambda_opt = app->add_option("--lambda", lambda, "Regularization weight (> 0)");
    bigK_opt = app->add_option("--bigK", bigK, "Step-size safety factor K >= 1 (SGD)");
    app->add_flag("--bigK-preset", bigK_preset,
                  "Use the reference K for the nearest lambda (tuned to one data sample)");
    iota_opt = app->add_option("--iota", iota, "Armijo sufficient-decrease factor (ALS)");
    app->add_option("--alpha-bar", alpha_bar, "Initial Armijo step")->capture_default_str();
    app->add_option("--beta", beta, "Armijo backtracking factor")->capture_default_str();
    app->add_option("--seed", seed, "RNG seed")->capture_default_str();
    auto* it = app->add_option("--iters", iters, "Iteration budget (default 1000)");
    auto* sec = app->add_option("--seconds", seconds, "Wall-clock budget");
    it->excludes(sec);
    app->add_option("--trace-every", trace_every, "Record every N iterations (SGD 10, ALS 1)");
    app->add_option("--phi-mode", phi_mode, "constant, exact or tilde (SGD)")
        ->check(CLI::IsMember({"constant", "exact", "tilde"}))
        ->capture_default_str();
    app->add_flag("--deterministic", deterministic,
                  "Write elapsed_seconds as 0 so output depends on the seed only");
    app->add_flag("--grad-norm", grad_norm, "Record the full-gradient norm (SGD)");
  }

  wlra_experiment to_experiment() const {
    wlra_experiment e;
    wlra_experiment_defaults(&e);
    check(wlra_algorithm_from_string(algorithm.c_str(), &e.algorithm), "--algorithm");
    e.k = k;
    if (has_lambda) {
      if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        std::ostringstream os;
        os << "--lambda must be positive, got " << lambda;
        throw CliError{os.str()};
      }
      e.has_lambda = 1;
      e.lambda = lambda;
    }
    if (has_bigK) {
      e.has_bigK = 1;
      e.bigK = bigK;
    } else if (bigK_preset) {
      if (!e.has_lambda) throw CliError{"--bigK-preset needs --lambda"};
      e.has_bigK = 1;
      e.bigK = wlra_bigK_preset(e.algorithm, lambda);
      std::cerr << "warning: K=" << e.bigK
                << " is the reference value for the nearest lambda; it was tuned to a "
                   "specific data sample\n";
    }
    if (has_iota) {
      e.has_iota = 1;
      e.iota = iota;
    }
    e.alpha_bar = alpha_bar;
    e.beta = beta;
    e.seed = seed;
    if (seconds >= 0.0) {
      e.max_seconds = seconds;
      e.max_iterations = -1;
    } else {
      e.max_iterations = iters >= 0 ? iters : 1000;
    }
    e.trace_every = trace_every;
    e.phi_mode = phi_mode == "exact"   ? WLRA_PHI_EXACT
                 : phi_mode == "tilde" ? WLRA_PHI_TILDE
                                       : WLRA_PHI_CONSTANT;
    e.record_grad_norm = grad_norm ? 1 : 0;
    e.deterministic = deterministic ? 1 : 0;
    return e;
  }
};

void print_dims(const wlra_problem* p, const std::string& what) {
  int64_t m = 0, n = 0, nnz = 0;
  check(wlra_problem_dims(p, &m, &n, &nnz), "");
  std::printf("%s: %lld x %lld, %lld observed (density %.6g)\n", what.c_str(),
              static_cast<long long>(m), static_cast<long long>(n), static_cast<long long>(nnz),
              static_cast<double>(nnz) / (static_cast<double>(m) * static_cast<double>(n)));
}

void write_matrix_csv(const std::string& path, const double* data, int64_t rows, int64_t cols) {
  std::ofstream out(path, std::ios::binary);
  out.imbue(std::locale::classic());
  out.precision(17);
  if (!out) throw CliError{"cannot write '" + path + "'"};
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) {
      out << (j ? "," : "") << data[j * rows + i];
    }
    out << '\n';
  }
}

/// "key=value,key=value" overrides for one member of a comparison.
RunFlags apply_spec(RunFlags base, const std::string& text) {
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CliError{"--spec item '" + item + "' is not key=value"};
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      if (key == "algorithm") base.algorithm = val;
      else if (key == "name") base.name = val;
      else if (key == "lambda") {
        base.lambda = std::stod(val);
        base.has_lambda = true;
      } else if (key == "bigK") {
        base.bigK = std::stod(val);
        base.has_bigK = true;
      } else if (key == "iota") {
        base.iota = std::stod(val);
        base.has_iota = true;
      } else if (key == "seed") base.seed = std::stoull(val);
      else if (key == "alpha-bar") base.alpha_bar = std::stod(val);
      else if (key == "beta") base.beta = std::stod(val);
      else if (key == "phi-mode") base.phi_mode = val;
      else throw CliError{"--spec: unknown key '" + key + "'"};
    } catch (const std::logic_error&) {
      throw CliError{"--spec: bad value for '" + key + "': '" + val + "'"};
    }
  }
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  std::locale::global(std::locale::classic());
  CLI::App app{"Weighted low-rank approximation on Stiefel product manifolds"};
  app.require_subcommand(1);

  auto with_config = [](CLI::App* sub) {
    sub->set_config("--config", "", "key=value file mirroring the flags (flags win)");
    sub->allow_config_extras(CLI::config_extras_mode::error);
  };

  // synth
  wlra_synthetic_params synth;
  wlra_synthetic_defaults(&synth);
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Generate a seeded low-rank instance");
  with_config(c_synth);
  c_synth->add_option("--m", synth.m, "Rows")->capture_default_str();
  c_synth->add_option("--n", synth.n, "Columns")->capture_default_str();
  c_synth->add_option("--rank", synth.rank, "Rank of the ground truth")->capture_default_str();
  c_synth->add_option("--noise", synth.noise, "Gaussian noise level")->capture_default_str();
  c_synth->add_option("--observe", synth.observe_prob, "Probability a cell is observed")
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "RNG seed")->capture_default_str();
  c_synth->add_option("--out", synth_out, "Output triplet CSV")->required();

  // ingest
  InputFlags ingest_in;
  std::string ingest_out;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a triplet file, rewrite it 0-based");
  with_config(c_ingest);
  ingest_in.add(c_ingest);
  c_ingest->add_option("--out", ingest_out, "Normalized output CSV");

  // sample
  InputFlags sample_in;
  int64_t sample_rows = 0, sample_cols = 0;
  uint64_t sample_seed = 0;
  std::string sample_out;
  auto* c_sample = app.add_subcommand("sample", "Random row/column submatrix");
  with_config(c_sample);
  sample_in.add(c_sample, false);
  c_sample->add_option("--sample-rows", sample_rows, "Rows to keep")->required();
  c_sample->add_option("--sample-cols", sample_cols, "Columns to keep")->required();
  c_sample->add_option("--seed", sample_seed, "RNG seed")->capture_default_str();
  c_sample->add_option("--out", sample_out, "Output triplet CSV")->required();

  // init-svd
  InputFlags init_in;
  int64_t init_k = 0;
  std::string init_out;
  auto* c_init = app.add_subcommand("init-svd", "Truncated SVD start of the imputed matrix");
  with_config(c_init);
  init_in.add(c_init);
  c_init->add_option("--k", init_k, "Rank cap")->required()->check(CLI::PositiveNumber);
  c_init->add_option("--out", init_out, "Prefix for <prefix>_x.csv, _U.csv, _V.csv");

  // run
  InputFlags run_in;
  RunFlags run_flags;
  std::string run_out;
  auto* c_run = app.add_subcommand("run", "Run one solver from the SVD start");
  with_config(c_run);
  run_in.add(c_run);
  run_flags.add(c_run, true);
  c_run->add_option("--out", run_out, "Trace CSV (t,elapsed_seconds,cost_unregularized)")
      ->required();

  // compare
  InputFlags cmp_in;
  RunFlags cmp_flags;
  std::vector<std::string> cmp_specs;
  std::string cmp_align = "iteration";
  double cmp_bin = 0.1, cmp_horizon = 0.0;
  std::string cmp_out;
  auto* c_cmp = app.add_subcommand("compare", "Run several solvers and merge their traces");
  with_config(c_cmp);
  cmp_in.add(c_cmp);
  cmp_flags.add(c_cmp, false);
  c_cmp->add_option("--spec", cmp_specs,
                    "Per-run overrides: algorithm=...,name=...,lambda=...,bigK=...,iota=...,seed=...")
      ->required();
  c_cmp->add_option("--align", cmp_align, "iteration or time")
      ->check(CLI::IsMember({"iteration", "time"}))
      ->capture_default_str();
  c_cmp->add_option("--bin", cmp_bin, "Time bin width in seconds")->capture_default_str();
  c_cmp->add_option("--horizon", cmp_horizon, "Time horizon (default: longest run)");
  c_cmp->add_option("--out", cmp_out, "Merged CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_synth) {
      wlra_problem* p = nullptr;
      check(wlra_problem_synthetic(&synth, &p), "synth");
      ProblemPtr prob(p);
      check(wlra_problem_write_triplets(prob.get(), synth_out.c_str()), "synth");
      print_dims(prob.get(), synth_out);
    } else if (*c_ingest) {
      ProblemPtr prob = ingest_in.load();
      print_dims(prob.get(), ingest_in.path);
      if (!ingest_out.empty()) {
        check(wlra_problem_write_triplets(prob.get(), ingest_out.c_str()), "ingest");
      }
    } else if (*c_sample) {
      ProblemPtr prob = sample_in.load();
      wlra_problem* s = nullptr;
      check(wlra_problem_sample(prob.get(), sample_rows, sample_cols, sample_seed, &s), "sample");
      ProblemPtr sub(s);
      check(wlra_problem_write_triplets(sub.get(), sample_out.c_str()), "sample");
      print_dims(sub.get(), sample_out);
    } else if (*c_init) {
      ProblemPtr prob = init_in.load();
      int64_t m = 0, n = 0;
      check(wlra_problem_dims(prob.get(), &m, &n, nullptr), "");
      std::vector<double> x(static_cast<size_t>(init_k));
      std::vector<double> U(static_cast<size_t>(m * init_k)), V(static_cast<size_t>(n * init_k));
      double cost = 0.0;
      check(wlra_init_svd(prob.get(), init_k, x.data(), U.data(), V.data(), &cost), "init-svd");
      std::printf("singular values:");
      for (double v : x) std::printf(" %.17g", v);
      std::printf("\ninitial unregularized cost: %.17g\n", cost);
      if (!init_out.empty()) {
        write_matrix_csv(init_out + "_x.csv", x.data(), init_k, 1);
        write_matrix_csv(init_out + "_U.csv", U.data(), m, init_k);
        write_matrix_csv(init_out + "_V.csv", V.data(), n, init_k);
      }
    } else if (*c_run) {
      ProblemPtr prob = run_in.load();
      run_flags.finalize();
      wlra_experiment e = run_flags.to_experiment();
      if (!run_flags.name.empty()) e.name = run_flags.name.c_str();
      wlra_trace* t = nullptr;
      check(wlra_run(prob.get(), &e, &t), run_flags.algorithm);
      TracePtr trace(t);
      check(wlra_trace_write_csv(trace.get(), run_out.c_str()), "run");
      wlra_trace_row last;
      check(wlra_trace_row_at(trace.get(), wlra_trace_size(trace.get()) - 1, &last), "run");
      std::printf("%s: t=%lld cost=%.17g rows=%zu\n", run_flags.algorithm.c_str(),
                  static_cast<long long>(last.t), last.cost_unregularized,
                  wlra_trace_size(trace.get()));
    } else if (*c_cmp) {
      ProblemPtr prob = cmp_in.load();
      cmp_flags.finalize();
      std::vector<TracePtr> traces;
      std::vector<RunFlags> members;
      for (const std::string& s : cmp_specs) members.push_back(apply_spec(cmp_flags, s));
      for (RunFlags& f : members) {
        wlra_experiment e = f.to_experiment();
        if (!f.name.empty()) e.name = f.name.c_str();
        wlra_trace* t = nullptr;
        check(wlra_run(prob.get(), &e, &t), f.name.empty() ? f.algorithm : f.name);
        traces.emplace_back(t);
      }
      std::vector<const wlra_trace*> raw;
      for (const TracePtr& t : traces) raw.push_back(t.get());
      check(wlra_compare_write_csv(raw.data(), raw.size(),
                                   cmp_align == "time" ? WLRA_ALIGN_TIME : WLRA_ALIGN_ITERATION,
                                   cmp_bin, cmp_horizon, cmp_out.c_str()),
            "compare");
      std::printf("merged %zu runs into %s\n", raw.size(), cmp_out.c_str());
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return 1;
  }
  return 0;
}
