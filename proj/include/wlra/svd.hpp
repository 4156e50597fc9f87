#pragma once

#include "wlra/problem.hpp"

namespace wlra {

/// Thin SVD with r = min(m, n): input = U diag(s) Vᵀ, s non-negative and
/// descending.
struct SvdResult {
  StiefelPoint U;
  Vector s;
  StiefelPoint V;
};

/// One-sided Jacobi SVD. A column pair counts as orthogonal once
/// |bᵢ·bⱼ| ≤ tol·‖bᵢ‖‖bⱼ‖; iteration stops after a clean sweep or max_sweeps.
SvdResult jacobi_svd(const Matrix& A, double tol = 1e-12, int max_sweeps = 60);

/// Dense copy of the observations with each missing cell set to its column's
/// observed mean (0 for columns with no observations).
Matrix fill_missing_column_mean(const Observations& obs);
Matrix fill_missing_column_mean(const ProblemData& data);

struct SvdInit {
  ProductPoint point;   ///< (U₀, x₀, V₀) from the top-k triplets
  FactorPair factors;   ///< (U₀√diag(x₀), V₀√diag(x₀))
};

/// Both parametrizations of the best rank-k approximation of `dense`.
SvdInit truncated_svd_init(const Matrix& dense, Index k);

struct EckartYoung {
  Matrix P;
  double cost = 0.0;  ///< Σ_{j>k} s_j²
};

/// Best rank-≤k approximation in the Frobenius norm.
EckartYoung eckart_young_best(const Matrix& A, Index k);

/// True iff ‖AᵀP − PᵀP‖_F ≤ tol and ‖PAᵀ − PPᵀ‖_F ≤ tol.
bool check_stationarity(const Matrix& A, const Matrix& P, double tol);

}  // namespace wlra
