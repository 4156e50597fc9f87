#include "wlra/wlra.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "wlra/data.hpp"
#include "wlra/experiment.hpp"
#include "wlra/model.hpp"
#include "wlra/svd.hpp"

struct wlra_problem {
  wlra::Observations obs;
};

struct wlra_trace {
  wlra::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

wlra_status map(wlra::ErrorCode c) {
  using wlra::ErrorCode;
  switch (c) {
    case ErrorCode::RankDeficient: return WLRA_ERR_RANK_DEFICIENT;
    case ErrorCode::ShapeMismatch: return WLRA_ERR_SHAPE_MISMATCH;
    case ErrorCode::NotOrthonormal: return WLRA_ERR_NOT_ORTHONORMAL;
    case ErrorCode::EmptySupport: return WLRA_ERR_EMPTY_SUPPORT;
    case ErrorCode::NonPositiveWeight: return WLRA_ERR_NON_POSITIVE_WEIGHT;
    case ErrorCode::LambdaOutOfRange: return WLRA_ERR_LAMBDA_OUT_OF_RANGE;
    case ErrorCode::InvalidWeights: return WLRA_ERR_INVALID_WEIGHTS;
    case ErrorCode::InvalidArgument: return WLRA_ERR_INVALID_ARGUMENT;
    case ErrorCode::InitNotConfined: return WLRA_ERR_INIT_NOT_CONFINED;
    case ErrorCode::BacktrackLimit: return WLRA_ERR_BACKTRACK_LIMIT;
    case ErrorCode::NegativeSingularValue: return WLRA_ERR_NEGATIVE_SINGULAR_VALUE;
    case ErrorCode::ParseError: return WLRA_ERR_PARSE;
    case ErrorCode::DuplicateEntry: return WLRA_ERR_DUPLICATE_ENTRY;
    case ErrorCode::IndexOutOfBounds: return WLRA_ERR_INDEX_OUT_OF_BOUNDS;
    case ErrorCode::InvalidDimensions: return WLRA_ERR_INVALID_DIMENSIONS;
    case ErrorCode::MismatchedData: return WLRA_ERR_MISMATCHED_DATA;
    case ErrorCode::IoError: return WLRA_ERR_IO;
  }
  return WLRA_ERR_INTERNAL;
}

template <class F>
wlra_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return WLRA_OK;
  } catch (const wlra::Error& e) {
    g_last_error = e.what();
    return map(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WLRA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return WLRA_ERR_INTERNAL;
  }
}

wlra_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return WLRA_ERR_NULL_ARGUMENT;
}

wlra::Algorithm to_cpp(wlra_algorithm a) {
  switch (a) {
    case WLRA_SGD_MANIFOLD: return wlra::Algorithm::SgdManifold;
    case WLRA_SGD_EUCLIDEAN: return wlra::Algorithm::SgdEuclidean;
    case WLRA_SGD_PW: return wlra::Algorithm::SgdPw;
    case WLRA_ALS_MANIFOLD: return wlra::Algorithm::AlsManifold;
    case WLRA_ALS_EUCLIDEAN: return wlra::Algorithm::AlsEuclidean;
    case WLRA_ALS_PW: return wlra::Algorithm::AlsPw;
  }
  wlra::fail(wlra::ErrorCode::InvalidArgument, "unknown algorithm");
}

}  // namespace

extern "C" {

const char* wlra_last_error(void) { return g_last_error.c_str(); }

const char* wlra_status_string(wlra_status status) {
  switch (status) {
    case WLRA_OK: return "ok";
    case WLRA_ERR_NULL_ARGUMENT: return "null argument";
    case WLRA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WLRA_ERR_RANK_DEFICIENT: return "rank deficient";
    case WLRA_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case WLRA_ERR_NOT_ORTHONORMAL: return "not orthonormal";
    case WLRA_ERR_EMPTY_SUPPORT: return "empty support";
    case WLRA_ERR_NON_POSITIVE_WEIGHT: return "non-positive weight";
    case WLRA_ERR_LAMBDA_OUT_OF_RANGE: return "lambda out of range";
    case WLRA_ERR_INVALID_WEIGHTS: return "invalid weights";
    case WLRA_ERR_INIT_NOT_CONFINED: return "initial point not confined";
    case WLRA_ERR_BACKTRACK_LIMIT: return "backtrack limit reached";
    case WLRA_ERR_NEGATIVE_SINGULAR_VALUE: return "negative singular value";
    case WLRA_ERR_PARSE: return "parse error";
    case WLRA_ERR_DUPLICATE_ENTRY: return "duplicate entry";
    case WLRA_ERR_INDEX_OUT_OF_BOUNDS: return "index out of bounds";
    case WLRA_ERR_INVALID_DIMENSIONS: return "invalid dimensions";
    case WLRA_ERR_MISMATCHED_DATA: return "mismatched data";
    case WLRA_ERR_IO: return "i/o error";
    case WLRA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

wlra_status wlra_algorithm_from_string(const char* name, wlra_algorithm* out) {
  if (!name) return null_argument("name");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto a = wlra::parse_algorithm(name);
    if (!a) {
      wlra::fail(wlra::ErrorCode::InvalidArgument,
                 std::string("unknown algorithm '") + name +
                     "' (expected sgd-manifold, sgd-euclidean, sgd-pw, als-manifold, "
                     "als-euclidean or als-pw)");
    }
    *out = static_cast<wlra_algorithm>(static_cast<int>(*a));
  });
}

const char* wlra_algorithm_name(wlra_algorithm algorithm) {
  switch (algorithm) {
    case WLRA_SGD_MANIFOLD:
    case WLRA_SGD_EUCLIDEAN:
    case WLRA_SGD_PW:
    case WLRA_ALS_MANIFOLD:
    case WLRA_ALS_EUCLIDEAN:
    case WLRA_ALS_PW:
      return wlra::to_string(to_cpp(algorithm));
  }
  return "unknown";
}

wlra_status wlra_problem_load_triplets(const char* path, int one_based, int64_t rows,
                                       int64_t cols, wlra_problem** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    wlra::LoadOptions opt;
    opt.one_based = one_based != 0;
    if (rows > 0) opt.rows = rows;
    if (cols > 0) opt.cols = cols;
    *out = new wlra_problem{wlra::load_triplets(path, opt)};
  });
}

wlra_status wlra_problem_write_triplets(const wlra_problem* problem, const char* path) {
  if (!problem) return null_argument("problem");
  if (!path) return null_argument("path");
  return guarded([&] { wlra::write_triplets(problem->obs, std::string(path)); });
}

void wlra_synthetic_defaults(wlra_synthetic_params* params) {
  if (!params) return;
  const wlra::SyntheticSpec d;
  params->m = d.m;
  params->n = d.n;
  params->rank = d.rank;
  params->noise = d.noise;
  params->observe_prob = d.observe_prob;
  params->seed = d.seed;
}

wlra_status wlra_problem_synthetic(const wlra_synthetic_params* params, wlra_problem** out) {
  if (!params) return null_argument("params");
  if (!out) return null_argument("out");
  return guarded([&] {
    wlra::SyntheticSpec s;
    s.m = params->m;
    s.n = params->n;
    s.rank = params->rank;
    s.noise = params->noise;
    s.observe_prob = params->observe_prob;
    s.seed = params->seed;
    *out = new wlra_problem{wlra::synthetic_instance(s)};
  });
}

wlra_status wlra_problem_sample(const wlra_problem* problem, int64_t rows, int64_t cols,
                                uint64_t seed, wlra_problem** out) {
  if (!problem) return null_argument("problem");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new wlra_problem{wlra::sample_submatrix(problem->obs, rows, cols, seed)};
  });
}

wlra_status wlra_problem_dims(const wlra_problem* problem, int64_t* m, int64_t* n,
                              int64_t* nnz) {
  if (!problem) return null_argument("problem");
  if (m) *m = problem->obs.rows();
  if (n) *n = problem->obs.cols();
  if (nnz) *nnz = static_cast<int64_t>(problem->obs.size());
  g_last_error.clear();
  return WLRA_OK;
}

void wlra_problem_free(wlra_problem* problem) { delete problem; }

wlra_status wlra_init_svd(const wlra_problem* problem, int64_t k, double* x0, double* U0,
                          double* V0, double* init_cost) {
  if (!problem) return null_argument("problem");
  return guarded([&] {
    const wlra::ProblemData data(problem->obs, wlra::build_binary_weights(problem->obs), k);
    const wlra::SvdInit init =
        wlra::truncated_svd_init(wlra::fill_missing_column_mean(data), k);
    const auto& U = init.point.U.matrix();
    const auto& V = init.point.V.matrix();
    if (x0) std::memcpy(x0, init.point.x.data(), sizeof(double) * static_cast<size_t>(k));
    if (U0) std::memcpy(U0, U.data(), sizeof(double) * static_cast<size_t>(U.size()));
    if (V0) std::memcpy(V0, V.data(), sizeof(double) * static_cast<size_t>(V.size()));
    if (init_cost) *init_cost = wlra::cost_unregularized(init.point, data);
  });
}

void wlra_experiment_defaults(wlra_experiment* spec) {
  if (!spec) return;
  std::memset(spec, 0, sizeof *spec);
  spec->algorithm = WLRA_SGD_MANIFOLD;
  spec->k = 1;
  spec->alpha_bar = 1.0;
  spec->beta = 0.5;
  spec->max_iterations = 1000;
  spec->max_seconds = -1.0;
  spec->trace_every = 0;
  spec->phi_mode = WLRA_PHI_CONSTANT;
}

wlra_status wlra_run(const wlra_problem* problem, const wlra_experiment* spec,
                     wlra_trace** out) {
  if (!problem) return null_argument("problem");
  if (!spec) return null_argument("spec");
  if (!out) return null_argument("out");
  return guarded([&] {
    wlra::ExperimentSpec s;
    s.algorithm = to_cpp(spec->algorithm);
    s.k = spec->k;
    if (spec->has_lambda) s.lambda = spec->lambda;
    if (spec->has_bigK) s.bigK = spec->bigK;
    if (spec->has_iota) s.iota = spec->iota;
    s.alpha_bar = spec->alpha_bar;
    s.beta = spec->beta;
    s.seed = spec->seed;
    const bool iters = spec->max_iterations >= 0;
    const bool secs = spec->max_seconds >= 0.0;
    if (iters == secs) {
      wlra::fail(wlra::ErrorCode::InvalidArgument,
                 "set exactly one of max_iterations and max_seconds");
    }
    s.budget = iters ? wlra::Budget::iterations(spec->max_iterations)
                     : wlra::Budget::seconds(spec->max_seconds);
    if (spec->trace_every > 0) s.trace_every = spec->trace_every;
    switch (spec->phi_mode) {
      case WLRA_PHI_CONSTANT: s.phi_mode = wlra::PhiMode::Constant; break;
      case WLRA_PHI_EXACT: s.phi_mode = wlra::PhiMode::Exact; break;
      case WLRA_PHI_TILDE: s.phi_mode = wlra::PhiMode::Tilde; break;
      default: wlra::fail(wlra::ErrorCode::InvalidArgument, "unknown phi mode");
    }
    s.record_grad_norm = spec->record_grad_norm != 0;
    s.deterministic = spec->deterministic != 0;
    if (spec->name) s.name = spec->name;
    *out = new wlra_trace{wlra::run_experiment(problem->obs, s)};
  });
}

size_t wlra_trace_size(const wlra_trace* trace) {
  return trace ? trace->result.trace.records.size() : 0;
}

wlra_status wlra_trace_row_at(const wlra_trace* trace, size_t i, wlra_trace_row* out) {
  if (!trace) return null_argument("trace");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto& recs = trace->result.trace.records;
    if (i >= recs.size()) wlra::fail(wlra::ErrorCode::IndexOutOfBounds, "trace row index");
    const wlra::TraceRecord& r = recs[i];
    out->t = r.t;
    out->elapsed_seconds = trace->result.deterministic ? 0.0 : r.elapsed_seconds;
    out->cost_unregularized = r.cost_unregularized;
    out->has_grad_norm = r.grad_norm.has_value();
    out->grad_norm = r.grad_norm.value_or(0.0);
    out->has_objective = r.objective.has_value();
    out->objective = r.objective.value_or(0.0);
  });
}

wlra_status wlra_trace_write_csv(const wlra_trace* trace, const char* path) {
  if (!trace) return null_argument("trace");
  if (!path) return null_argument("path");
  return guarded([&] { wlra::write_trace_csv(trace->result, std::string(path)); });
}

wlra_status wlra_compare_write_csv(const wlra_trace* const* traces, size_t count,
                                   wlra_alignment alignment, double bin_width, double horizon,
                                   const char* path) {
  if (!traces) return null_argument("traces");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::vector<wlra::ExperimentResult> runs;
    for (size_t i = 0; i < count; ++i) {
      if (!traces[i]) wlra::fail(wlra::ErrorCode::InvalidArgument, "null trace in list");
      runs.push_back(traces[i]->result);
    }
    wlra::CompareOptions opt;
    opt.alignment =
        alignment == WLRA_ALIGN_TIME ? wlra::Alignment::Time : wlra::Alignment::Iteration;
    opt.bin_width = bin_width;
    if (horizon > 0.0) opt.horizon = horizon;
    std::ofstream out(path, std::ios::binary);
    if (!out) wlra::fail(wlra::ErrorCode::IoError, std::string("cannot write '") + path + "'");
    wlra::write_compare_csv(runs, opt, out);
    out.flush();
    if (!out) wlra::fail(wlra::ErrorCode::IoError, std::string("write to '") + path + "' failed");
  });
}

void wlra_trace_free(wlra_trace* trace) { delete trace; }

double wlra_iota_preset(double lambda) {
  try {
    return wlra::iota_preset(lambda);
  } catch (...) {
    return NAN;
  }
}

double wlra_bigK_preset(wlra_algorithm algorithm, double lambda) {
  try {
    return wlra::bigK_preset(to_cpp(algorithm), lambda);
  } catch (...) {
    return NAN;
  }
}

}  // extern "C"
