#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "wlra/step_policy.hpp"

namespace wlra {

/// Exactly one of the two limits is set.
struct Budget {
  std::optional<std::int64_t> max_iterations;
  std::optional<double> max_seconds;

  static Budget iterations(std::int64_t n);
  static Budget seconds(double s);
  void validate() const;
};

struct TraceRecord {
  std::int64_t t = 0;
  double elapsed_seconds = 0.0;
  double cost_unregularized = 0.0;
  std::optional<double> grad_norm;
  std::optional<double> phi_t;
  /// The objective the algorithm actually descends (G, H or Ĝ).
  std::optional<double> objective;
};

/// t strictly increasing, elapsed non-decreasing.
struct IterTrace {
  std::vector<TraceRecord> records;
};

enum class PhiMode {
  Constant,  ///< φ_t ≡ Φ_min
  Exact,     ///< φ_t from A_t, B_t (a pass over the support per step)
  Tilde,     ///< φ_t from the closed-form bounds Ã_t, B̃_t
};

struct SolverConfig {
  StepPolicy policy;
  Budget budget = Budget::iterations(1000);
  std::uint64_t seed = 0;
  std::int64_t trace_every = 10;
  PhiMode phi_mode = PhiMode::Constant;
  /// Costs a full gradient per trace point for the SGD family.
  bool record_grad_norm = false;
  /// Called with (t, iterate) for t = 0 and after every update.
  std::function<void(std::int64_t, const ProductPoint&)> on_point;
  std::function<void(std::int64_t, const FactorPair&)> on_factors;
};

struct ArmijoParams {
  double alpha_bar = 1.0;
  double beta = 0.5;
  double iota = 108.0 / 270000.0;
  int max_backtracks = 60;

  void validate() const;
};

struct AlsConfig {
  ArmijoParams armijo;
  Budget budget = Budget::iterations(100);
  std::int64_t trace_every = 1;
  /// Called with (t, iterate, objective) for t = 0 and after every update.
  std::function<void(std::int64_t, const ProductPoint&, double)> on_point;
  std::function<void(std::int64_t, const FactorPair&, double)> on_factors;
};

struct ArmijoResult {
  double tau = 0.0;   ///< β^m ᾱ
  int m = 0;          ///< number of backtracks
  double value = 0.0; ///< cost at the accepted point
};

/// Armijo search in scalar form. `cost_at(τ)` returns f(R_x(τη)), `fx` is f(x)
/// and `slope` is ⟨∇f(x), η⟩. Returns the smallest m ≥ 0 with
/// f(x) − f(R_x(β^m ᾱ η)) ≥ −ι β^m ᾱ ⟨∇f(x), η⟩; throws BacktrackLimit.
ArmijoResult armijo_search(const std::function<double(double)>& cost_at, double fx, double slope,
                           const ArmijoParams& params);

/// The same search phrased on points: `retract(x, τη)` and `inner(∇f, η)`
/// are looked up by argument-dependent lookup or passed as callables.
template <class Point, class Tangent, class Cost, class Retract, class Inner>
ArmijoResult armijo_step(const Cost& cost, const Tangent& grad, const Point& x, const Tangent& eta,
                         const ArmijoParams& params, const Retract& retractor,
                         const Inner& inner_product) {
  const double fx = cost(x);
  const double slope = inner_product(grad, eta);
  return armijo_search([&](double tau) { return cost(retractor(x, tau * eta)); }, fx, slope,
                       params);
}

template <class Point>
struct SolverResult {
  Point final_point;
  IterTrace trace;
  std::int64_t iterations = 0;
};

SolverResult<ProductPoint> sgd_manifold(const ProductPoint& init, const ProblemData& data,
                                        const SolverConfig& config);
SolverResult<FactorPair> sgd_euclidean(const FactorPair& init, const ProblemData& data,
                                       const SolverConfig& config);
SolverResult<ProductPoint> sgd_pw(const ProductPoint& init, const ProblemData& data,
                                  const SolverConfig& config);

SolverResult<ProductPoint> als_manifold(const ProductPoint& init, const ProblemData& data,
                                        const Regularization& reg, const AlsConfig& config);
SolverResult<FactorPair> als_euclidean(const FactorPair& init, const ProblemData& data,
                                       const Regularization& reg, const AlsConfig& config);
SolverResult<ProductPoint> als_pw(const ProductPoint& init, const ProblemData& data,
                                  const AlsConfig& config);

/// FactorPair arithmetic used by the additive retraction of the baselines.
FactorPair retract(const FactorPair& f, const FactorGradient& step);
FactorGradient operator*(double s, FactorGradient g);
double inner(const FactorGradient& a, const FactorGradient& b);

}  // namespace wlra
