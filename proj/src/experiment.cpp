#include "wlra/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "wlra/data.hpp"
#include "wlra/svd.hpp"

namespace wlra {

namespace {

struct Preset {
  double lambda;
  double iota;
  double manifold_K;
  double euclidean_K;
};

constexpr Preset kPresets[] = {
    {1e-2, 108.0 / 270000.0, 1e3, 1e4},
    {1e-4, 11.0 / 270000000.0, 1e3, 1.0},
    {1e-6, 1.0 / 54000000000.0, 1e4, 1.0},
};

const Preset& nearest_preset(double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::LambdaOutOfRange, "lambda must be positive");
  const Preset* best = &kPresets[0];
  for (const Preset& p : kPresets) {
    if (std::abs(std::log10(p.lambda / lambda)) < std::abs(std::log10(best->lambda / lambda))) {
      best = &p;
    }
  }
  return *best;
}

/// Last cost recorded at or before `coord`, where `key` picks t or seconds.
template <class Key>
double carried_forward(const IterTrace& trace, double coord, Key key) {
  double v = trace.records.front().cost_unregularized;
  for (const TraceRecord& r : trace.records) {
    if (key(r) <= coord) v = r.cost_unregularized;
    else break;
  }
  return v;
}

std::string bin_label(double v) {
  return format_double(std::round(v * 1e9) / 1e9);
}

}  // namespace

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::SgdManifold: return "sgd-manifold";
    case Algorithm::SgdEuclidean: return "sgd-euclidean";
    case Algorithm::SgdPw: return "sgd-pw";
    case Algorithm::AlsManifold: return "als-manifold";
    case Algorithm::AlsEuclidean: return "als-euclidean";
    case Algorithm::AlsPw: return "als-pw";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::SgdManifold, Algorithm::SgdEuclidean, Algorithm::SgdPw,
                      Algorithm::AlsManifold, Algorithm::AlsEuclidean, Algorithm::AlsPw}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

bool is_sgd(Algorithm a) noexcept {
  return a == Algorithm::SgdManifold || a == Algorithm::SgdEuclidean || a == Algorithm::SgdPw;
}

double iota_preset(double lambda) { return nearest_preset(lambda).iota; }

double bigK_preset(Algorithm a, double lambda) {
  const Preset& p = nearest_preset(lambda);
  return a == Algorithm::SgdEuclidean ? p.euclidean_K : p.manifold_K;
}

ExperimentResult run_experiment(const Observations& obs, const ExperimentSpec& spec) {
  spec.budget.validate();
  if (spec.deterministic && !spec.budget.max_iterations) {
    fail(ErrorCode::InvalidArgument, "deterministic output needs an iteration budget");
  }
  const bool pw = spec.algorithm == Algorithm::SgdPw || spec.algorithm == Algorithm::AlsPw;
  const ProblemData data(obs, build_binary_weights(obs), spec.k);

  double lambda = 0.0;
  if (spec.lambda) {
    lambda = *spec.lambda;
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      std::ostringstream os;
      os << "lambda must be positive, got " << lambda;
      fail(ErrorCode::LambdaOutOfRange, os.str());
    }
  } else if (pw) {
    lambda = data.min_weight() / 2.0;
  } else {
    fail(ErrorCode::InvalidArgument, "lambda is required for this algorithm");
  }
  if (pw) require_positive_weights(data, lambda);

  const SvdInit init = truncated_svd_init(fill_missing_column_mean(data), spec.k);
  const std::int64_t every = spec.trace_every.value_or(is_sgd(spec.algorithm) ? 10 : 1);

  ExperimentResult out;
  out.name = spec.name.empty() ? to_string(spec.algorithm) : spec.name;
  out.algorithm = spec.algorithm;
  out.data_fingerprint = fingerprint(obs);
  out.k = spec.k;
  out.deterministic = spec.deterministic;

  if (is_sgd(spec.algorithm)) {
    if (!spec.bigK) fail(ErrorCode::InvalidArgument, "bigK is required for the SGD algorithms");
    SolverConfig cfg;
    cfg.budget = spec.budget;
    cfg.seed = spec.seed;
    cfg.trace_every = every;
    cfg.phi_mode = spec.phi_mode;
    cfg.record_grad_norm = spec.record_grad_norm;
    switch (spec.algorithm) {
      case Algorithm::SgdManifold:
        cfg.policy = make_policy(PolicyKind::ManifoldRegularized, data, lambda, *spec.bigK,
                                 confinement_rho(init.point));
        out.trace = sgd_manifold(init.point, data, cfg).trace;
        break;
      case Algorithm::SgdEuclidean:
        cfg.policy = make_policy(PolicyKind::EuclideanRegularized, data, lambda, *spec.bigK,
                                 confinement_rho_euclidean(init.factors));
        out.trace = sgd_euclidean(init.factors, data, cfg).trace;
        break;
      default:
        cfg.policy = make_policy(PolicyKind::ManifoldPositiveWeights, data, lambda, *spec.bigK,
                                 confinement_rho(init.point));
        out.trace = sgd_pw(init.point, data, cfg).trace;
        break;
    }
    return out;
  }

  AlsConfig cfg;
  cfg.budget = spec.budget;
  cfg.trace_every = every;
  cfg.armijo.alpha_bar = spec.alpha_bar;
  cfg.armijo.beta = spec.beta;
  cfg.armijo.iota = spec.iota.value_or(iota_preset(lambda));
  switch (spec.algorithm) {
    case Algorithm::AlsManifold:
      out.trace = als_manifold(init.point, data, Regularization(lambda), cfg).trace;
      break;
    case Algorithm::AlsEuclidean:
      out.trace = als_euclidean(init.factors, data, Regularization(lambda), cfg).trace;
      break;
    default:
      out.trace = als_pw(init.point, data, cfg).trace;
      break;
  }
  return out;
}

void write_trace_csv(const ExperimentResult& result, std::ostream& out) {
  out << "t,elapsed_seconds,cost_unregularized\n";
  for (const TraceRecord& r : result.trace.records) {
    out << r.t << ',' << (result.deterministic ? std::string("0") : format_double(r.elapsed_seconds))
        << ',' << format_double(r.cost_unregularized) << '\n';
  }
}

void write_trace_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  write_trace_csv(result, out);
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

void write_compare_csv(const std::vector<ExperimentResult>& runs, const CompareOptions& options,
                       std::ostream& out) {
  if (runs.empty()) fail(ErrorCode::InvalidArgument, "nothing to compare");
  for (const ExperimentResult& r : runs) {
    if (r.data_fingerprint != runs.front().data_fingerprint || r.k != runs.front().k) {
      fail(ErrorCode::MismatchedData,
           "run '" + r.name + "' used different data or k than '" + runs.front().name + "'");
    }
    if (r.trace.records.empty()) fail(ErrorCode::InvalidArgument, "run '" + r.name + "' is empty");
  }

  // Repeated names get a numeric suffix so every column header is unique.
  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (const ExperimentResult& r : runs) {
    const int n = ++seen[r.name];
    names.push_back(n == 1 ? r.name : r.name + "#" + std::to_string(n));
  }

  out << (options.alignment == Alignment::Iteration ? "t" : "seconds");
  for (const std::string& n : names) out << ',' << n;
  out << '\n';

  if (options.alignment == Alignment::Iteration) {
    std::set<std::int64_t> ts;
    for (const ExperimentResult& r : runs) {
      for (const TraceRecord& rec : r.trace.records) ts.insert(rec.t);
    }
    for (std::int64_t t : ts) {
      out << t;
      for (const ExperimentResult& r : runs) {
        out << ',' << format_double(carried_forward(r.trace, static_cast<double>(t),
                                                    [](const TraceRecord& x) {
                                                      return static_cast<double>(x.t);
                                                    }));
      }
      out << '\n';
    }
    return;
  }

  if (!(options.bin_width > 0.0)) fail(ErrorCode::InvalidArgument, "bin width must be positive");
  double horizon = 0.0;
  if (options.horizon) {
    horizon = *options.horizon;
  } else {
    for (const ExperimentResult& r : runs) {
      horizon = std::max(horizon, r.trace.records.back().elapsed_seconds);
    }
  }
  const auto bins =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(horizon / options.bin_width - 1e-9)));
  for (std::int64_t i = 1; i <= bins; ++i) {
    const double end = static_cast<double>(i) * options.bin_width;
    out << bin_label(end);
    for (const ExperimentResult& r : runs) {
      out << ',' << format_double(carried_forward(
                        r.trace, end, [](const TraceRecord& x) { return x.elapsed_seconds; }));
    }
    out << '\n';
  }
}

std::vector<ExperimentResult> compare(const Observations& obs,
                                      const std::vector<ExperimentSpec>& specs) {
  if (specs.empty()) fail(ErrorCode::InvalidArgument, "nothing to compare");
  std::vector<ExperimentResult> out;
  out.reserve(specs.size());
  for (const ExperimentSpec& s : specs) {
    if (s.k != specs.front().k) {
      fail(ErrorCode::MismatchedData, "compared runs must share k");
    }
    out.push_back(run_experiment(obs, s));
  }
  return out;
}

}  // namespace wlra
