#pragma once

#include <cstdint>
#include <functional>

#include "wlra/model.hpp"

namespace wlra {

enum class PolicyKind { ManifoldRegularized, EuclideanRegularized, ManifoldPositiveWeights };

const char* to_string(PolicyKind kind) noexcept;

/// Preferred step sizes c_t with c = sup c_t and σ = Σ c_t².
struct Schedule {
  std::function<double(std::int64_t)> rule;
  double c = 1.0;
  double sigma = 0.0;
  bool harmonic_default = false;

  /// c_t = 1/(t+1), c = 1, σ = π²/6.
  static Schedule harmonic();
  /// A caller-supplied rule; c and σ must be exact for the rule.
  static Schedule custom(std::function<double(std::int64_t)> rule, double c, double sigma);

  double operator()(std::int64_t t) const { return rule(t); }
};

struct StepPolicy {
  PolicyKind kind = PolicyKind::ManifoldRegularized;
  double lambda = 0.0;
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
  double phi_min = 0.0;
  double K = 1.0;
  Schedule schedule = Schedule::harmonic();
  double alpha = 0.0;
  double rho0 = 0.0;
  double rho1 = 0.0;
  double w0 = 0.0;  ///< smallest weight; only meaningful for positive weights
  Index k = 0;
};

/// max a² over the observed entries. Throws EmptySupport.
double alpha_of(const ProblemData& data);

/// ρ₀ for each family: the larger of the initial ρ and the confinement radius.
double rho0(PolicyKind kind, double init_norm_sq, double alpha, double lambda, double w0 = 0.0);

/// Φ_min for the harmonic schedule with the canonical a, b.
double phi_min(PolicyKind kind, double K, double lambda, double alpha, Index k, double rho0,
               double w0 = 0.0);

/// Φ_min for an arbitrary schedule, from the tilde bounds evaluated on ρ ≤ ρ₁.
double phi_min_general(PolicyKind kind, double K, double lambda, double alpha, Index k,
                       double rho1, double a, double b, double w0 = 0.0);

/// Builds the full policy: a = 1/λ, b = 1/√λ for the regularized families,
/// a = 1/w₀, b = 1/√w₀ for positive weights; Θ = c/Φ_min.
StepPolicy make_policy(PolicyKind kind, const ProblemData& data, double lambda, double K,
                       double init_norm_sq, Schedule schedule = Schedule::harmonic());

struct AdaptiveBounds {
  double A = 0.0;
  double B = 0.0;
};

/// Exact A_t, B_t from a pass over the support. O(|Δ|·k).
AdaptiveBounds adaptive_A_B(const ProductPoint& p, const ProblemData& data,
                            const StepPolicy& policy);
AdaptiveBounds adaptive_A_B(const FactorPair& f, const ProblemData& data,
                            const StepPolicy& policy);

/// Closed-form upper bounds Ã_t ≥ A_t, B̃_t ≥ B_t that need only ρ and α.
AdaptiveBounds adaptive_A_B_tilde(const ProductPoint& p, const StepPolicy& policy);
AdaptiveBounds adaptive_A_B_tilde(const FactorPair& f, const StepPolicy& policy);

/// φ_t = max{A_t, B_t, c_t/Θ, Φ_min}.
double phi_t(const StepPolicy& policy, double A, double B, std::int64_t t);

}  // namespace wlra
