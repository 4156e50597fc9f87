#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wlra/solvers.hpp"

namespace wlra {

enum class Algorithm { SgdManifold, SgdEuclidean, SgdPw, AlsManifold, AlsEuclidean, AlsPw };

const char* to_string(Algorithm a) noexcept;
std::optional<Algorithm> parse_algorithm(const std::string& name);
bool is_sgd(Algorithm a) noexcept;

/// Reference ι at λ ∈ {1e-2, 1e-4, 1e-6}; other λ take the
/// preset whose λ is nearest on a log scale.
double iota_preset(double lambda);

/// Reference K values (tuned to one particular data sample).
/// Manifold: 1e3, 1e3, 1e4; Euclidean: 1e4, 1, 1 at λ = 1e-2, 1e-4, 1e-6.
double bigK_preset(Algorithm a, double lambda);

struct ExperimentSpec {
  Algorithm algorithm = Algorithm::SgdManifold;
  Index k = 1;
  std::optional<double> lambda;  ///< required except for positive weights (w₀/2)
  std::optional<double> bigK;    ///< required for the SGD algorithms
  std::optional<double> iota;    ///< default iota_preset(λ)
  double alpha_bar = 1.0;
  double beta = 0.5;
  std::uint64_t seed = 0;
  Budget budget = Budget::iterations(1000);
  std::optional<std::int64_t> trace_every;  ///< default 10 for SGD, 1 for ALS
  PhiMode phi_mode = PhiMode::Constant;
  bool record_grad_norm = false;
  /// Report elapsed_seconds as 0 so output bytes depend on the seed only.
  bool deterministic = false;
  std::string name;  ///< column name in merged output; default: algorithm name
};

struct ExperimentResult {
  std::string name;
  Algorithm algorithm = Algorithm::SgdManifold;
  IterTrace trace;
  std::uint64_t data_fingerprint = 0;
  Index k = 0;
  bool deterministic = false;
};

/// Binary weights → column-mean imputation → truncated-SVD start → solver.
ExperimentResult run_experiment(const Observations& obs, const ExperimentSpec& spec);

/// "t,elapsed_seconds,cost_unregularized" with LF line endings.
void write_trace_csv(const ExperimentResult& result, std::ostream& out);
void write_trace_csv(const ExperimentResult& result, const std::string& path);

enum class Alignment { Iteration, Time };

struct CompareOptions {
  Alignment alignment = Alignment::Iteration;
  double bin_width = 0.1;          ///< seconds, time alignment only
  std::optional<double> horizon;   ///< default: the largest elapsed time seen
};

/// Merged table with one cost column per run. Iteration alignment uses the
/// union of recorded t; time alignment uses bins ending at w, 2w, …, and each
/// cell holds the last cost recorded at or before the row's coordinate.
/// Throws MismatchedData unless all runs share data and k.
void write_compare_csv(const std::vector<ExperimentResult>& runs, const CompareOptions& options,
                       std::ostream& out);

/// Runs every spec on the same observations, one after another.
std::vector<ExperimentResult> compare(const Observations& obs,
                                      const std::vector<ExperimentSpec>& specs);

}  // namespace wlra
