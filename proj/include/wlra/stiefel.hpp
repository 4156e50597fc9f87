#pragma once

#include <Eigen/Dense>

#include "wlra/error.hpp"

namespace wlra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Orthonormality tolerance enforced on every Stiefel point.
inline constexpr double kOrthonormalTol = 1e-10;
/// Gram-Schmidt pivot threshold, relative to the original column norm.
inline constexpr double kRankTol = 1e-12;

/// ‖XᵀX − I‖_F.
double orthonormality_defect(const Matrix& X);

/// ‖XᵀZ + ZᵀX‖_F; zero exactly when Z is tangent to the Stiefel manifold at X.
double tangent_defect(const Matrix& X, const Matrix& Z);

/// An n×k matrix with orthonormal columns (k ≤ n).
class StiefelPoint {
 public:
  /// Validates orthonormality; throws NotOrthonormal.
  explicit StiefelPoint(Matrix m, double tol = kOrthonormalTol);

  /// Leading k columns of the n×n identity.
  static StiefelPoint identity(Eigen::Index n, Eigen::Index k);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index rows() const noexcept { return m_.rows(); }
  Eigen::Index cols() const noexcept { return m_.cols(); }

 private:
  struct Unchecked {};
  StiefelPoint(Matrix m, Unchecked) : m_(std::move(m)) {}
  friend StiefelPoint qf(const Matrix& C);

  Matrix m_;
};

/// Point of V_k(R^m) × R^k × V_k(R^n); parametrizes U diag(x) Vᵀ.
struct ProductPoint {
  ProductPoint(StiefelPoint u, Vector x, StiefelPoint v);

  StiefelPoint U;
  Vector x;
  StiefelPoint V;

  Eigen::Index m() const noexcept { return U.rows(); }
  Eigen::Index n() const noexcept { return V.rows(); }
  Eigen::Index k() const noexcept { return x.size(); }
};

/// Tangent vector at some ProductPoint. The base point is not stored; use
/// is_tangent() to check membership against a given base.
struct ProductTangent {
  Matrix dU;
  Vector dx;
  Matrix dV;

  static ProductTangent zero(const ProductPoint& p);

  ProductTangent& operator*=(double s);
  ProductTangent& operator+=(const ProductTangent& o);
  double squared_norm() const;
  double norm() const;
};

ProductTangent operator*(double s, ProductTangent v);
ProductTangent operator+(ProductTangent a, const ProductTangent& b);
ProductTangent operator-(ProductTangent a, const ProductTangent& b);

/// Euclidean (embedded) inner product, which is the Riemannian metric here.
double inner(const ProductTangent& a, const ProductTangent& b);

bool is_tangent(const ProductPoint& p, const ProductTangent& v, double tol = kOrthonormalTol);

/// Q factor of C = QR with R upper triangular and diag(R) > 0. Modified
/// Gram-Schmidt, with a second orthogonalization pass for any column whose
/// residual overlap with the earlier columns exceeds 1e-12.
/// Throws RankDeficient when a pivot falls below kRankTol times the column norm.
StiefelPoint qf(const Matrix& C);

/// Π_X(ξ) = ξ − ½X(Xᵀξ + ξᵀX).
Matrix tangent_project(const StiefelPoint& X, const Matrix& xi);

/// Projects each slot of an ambient direction onto the tangent space at p.
ProductTangent tangent_project(const ProductPoint& p, const ProductTangent& ambient);

/// (qf(U + dU), x + dx, qf(V + dV)).
ProductPoint retract(const ProductPoint& p, const ProductTangent& v);

/// U diag(x) Vᵀ.
Matrix assemble(const ProductPoint& p);

}  // namespace wlra
