#pragma once

#include "wlra/problem.hpp"

namespace wlra {

/// Gradient of a function of a FactorPair; same shapes as (X, Y).
struct FactorGradient {
  Matrix dX;
  Matrix dY;

  double squared_norm() const { return dX.squaredNorm() + dY.squaredNorm(); }
};

/// p_{i,j} = Σ_l u_{i,l} x_l v_{j,l}, without forming P.
double predict(const ProductPoint& p, Index i, Index j);
/// p_{i,j} = Σ_l x_{i,l} y_{j,l}.
double predict(const FactorPair& f, Index i, Index j);

/// F̂ = Σ_Δ w (a − p)². Only observed cells are visited.
double cost_unregularized(const ProductPoint& p, const ProblemData& data);
double cost_unregularized(const FactorPair& f, const ProblemData& data);
double cost_unregularized(const Matrix& P, const ProblemData& data);

/// G = F̂ + λ‖x‖².
double cost_G(const ProductPoint& p, const ProblemData& data, const Regularization& reg);
/// H = F̂(XYᵀ) + λ(‖X‖² + ‖Y‖²).
double cost_H(const FactorPair& f, const ProblemData& data, const Regularization& reg);

// Per-sample random functions. Their w-weighted sums over the support give
// F̂, F, G, H and (full support only) F̂ again for the positive-weights f̃.

/// f̂(P; η,γ) = (a − p)².
double sample_cost_fhat(const Matrix& P, const ProblemData& data, const SampleIndex& s);
/// f(P; η,γ) = (a − p)² + λ‖P‖².
double sample_cost_f(const Matrix& P, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s);
/// f̃(P; η,γ) = (a − p)² − (λ/w) p² + λ‖P‖².
double sample_cost_ftilde(const Matrix& P, const ProblemData& data, const Regularization& reg,
                          const SampleIndex& s);
/// g(U,x,V; η,γ) = (a − p)² + λ‖x‖².
double sample_cost_g(const ProductPoint& p, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s);
/// g̃(U,x,V; η,γ) = (a − p)² − (λ/w) p² + λ‖x‖².
double sample_cost_gtilde(const ProductPoint& p, const ProblemData& data,
                          const Regularization& reg, const SampleIndex& s);
/// h(X,Y; η,γ) = (a − Σ x_{η,l} y_{γ,l})² + λ(‖X‖² + ‖Y‖²).
double sample_cost_h(const FactorPair& f, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s);

/// Riemannian gradient of g_{η,γ}.
ProductTangent stoch_grad_manifold(const ProductPoint& p, const SampleIndex& s,
                                   const ProblemData& data, const Regularization& reg);
/// Riemannian gradient of G; O(|Δ|·k) plus the projections.
ProductTangent full_grad_manifold(const ProductPoint& p, const ProblemData& data,
                                  const Regularization& reg);

FactorGradient stoch_grad_euclidean(const FactorPair& f, const SampleIndex& s,
                                    const ProblemData& data, const Regularization& reg);
/// ∇_X H = −2(W⊙(A−P))Y + 2λX, ∇_Y H = −2(W⊙(A−P))ᵀX + 2λY, sparse products.
FactorGradient full_grad_euclidean(const FactorPair& f, const ProblemData& data,
                                   const Regularization& reg);

/// Riemannian gradient of g̃_{η,γ}. Requires positive weights and 0 < λ < w₀.
ProductTangent stoch_grad_pw(const ProductPoint& p, const SampleIndex& s,
                             const ProblemData& data, const Regularization& reg);
/// Riemannian gradient of Ĝ = F̂ ∘ assemble (no regularizer). The U and V
/// slots use sparse matrix products, independent of full_grad_manifold.
ProductTangent full_grad_pw(const ProductPoint& p, const ProblemData& data);

/// ρ = ‖x‖².
double confinement_rho(const ProductPoint& p);
/// ρ = ‖X‖² + ‖Y‖².
double confinement_rho_euclidean(const FactorPair& f);

/// Throws ShapeMismatch unless the iterate matches the data dimensions.
void check_shapes(const ProductPoint& p, const ProblemData& data);
void check_shapes(const FactorPair& f, const ProblemData& data);

}  // namespace wlra
