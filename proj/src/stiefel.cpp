#include "wlra/stiefel.hpp"

#include <cmath>
#include <sstream>

namespace wlra {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InitNotConfined: return "InitNotConfined";
    case ErrorCode::BacktrackLimit: return "BacktrackLimit";
    case ErrorCode::NegativeSingularValue: return "NegativeSingularValue";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::InvalidDimensions: return "InvalidDimensions";
    case ErrorCode::MismatchedData: return "MismatchedData";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string shape(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::ShapeMismatch,
         std::string(what) + ": " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

double orthonormality_defect(const Matrix& X) {
  const Matrix G = X.transpose() * X;
  return (G - Matrix::Identity(X.cols(), X.cols())).norm();
}

double tangent_defect(const Matrix& X, const Matrix& Z) {
  require_same_shape(X, Z, "tangent_defect");
  const Matrix S = X.transpose() * Z;
  return (S + S.transpose()).norm();
}

StiefelPoint::StiefelPoint(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.cols() > m_.rows()) {
    fail(ErrorCode::ShapeMismatch,
         "Stiefel point needs k <= n, got " + shape(m_));
  }
  const double d = orthonormality_defect(m_);
  if (!(d <= tol)) {
    std::ostringstream os;
    os << "orthonormality defect " << d << " exceeds " << tol;
    fail(ErrorCode::NotOrthonormal, os.str());
  }
}

StiefelPoint StiefelPoint::identity(Eigen::Index n, Eigen::Index k) {
  if (k > n || k < 0) {
    fail(ErrorCode::ShapeMismatch, "identity Stiefel point needs 0 <= k <= n");
  }
  return StiefelPoint(Matrix::Identity(n, k), Unchecked{});
}

ProductPoint::ProductPoint(StiefelPoint u, Vector x_, StiefelPoint v)
    : U(std::move(u)), x(std::move(x_)), V(std::move(v)) {
  if (U.cols() != x.size() || V.cols() != x.size()) {
    std::ostringstream os;
    os << "product point slots disagree on k: U has " << U.cols() << ", x has "
       << x.size() << ", V has " << V.cols();
    fail(ErrorCode::ShapeMismatch, os.str());
  }
}

ProductTangent ProductTangent::zero(const ProductPoint& p) {
  return {Matrix::Zero(p.m(), p.k()), Vector::Zero(p.k()), Matrix::Zero(p.n(), p.k())};
}

ProductTangent& ProductTangent::operator*=(double s) {
  dU *= s;
  dx *= s;
  dV *= s;
  return *this;
}

ProductTangent& ProductTangent::operator+=(const ProductTangent& o) {
  require_same_shape(dU, o.dU, "tangent sum (U slot)");
  require_same_shape(dV, o.dV, "tangent sum (V slot)");
  if (dx.size() != o.dx.size()) fail(ErrorCode::ShapeMismatch, "tangent sum (x slot)");
  dU += o.dU;
  dx += o.dx;
  dV += o.dV;
  return *this;
}

double ProductTangent::squared_norm() const {
  return dU.squaredNorm() + dx.squaredNorm() + dV.squaredNorm();
}

double ProductTangent::norm() const { return std::sqrt(squared_norm()); }

ProductTangent operator*(double s, ProductTangent v) {
  v *= s;
  return v;
}

ProductTangent operator+(ProductTangent a, const ProductTangent& b) {
  a += b;
  return a;
}

ProductTangent operator-(ProductTangent a, const ProductTangent& b) {
  a += (-1.0) * b;
  return a;
}

double inner(const ProductTangent& a, const ProductTangent& b) {
  require_same_shape(a.dU, b.dU, "inner (U slot)");
  require_same_shape(a.dV, b.dV, "inner (V slot)");
  if (a.dx.size() != b.dx.size()) fail(ErrorCode::ShapeMismatch, "inner (x slot)");
  return (a.dU.array() * b.dU.array()).sum() + a.dx.dot(b.dx) +
         (a.dV.array() * b.dV.array()).sum();
}

bool is_tangent(const ProductPoint& p, const ProductTangent& v, double tol) {
  if (v.dU.rows() != p.m() || v.dU.cols() != p.k() || v.dV.rows() != p.n() ||
      v.dV.cols() != p.k() || v.dx.size() != p.k()) {
    return false;
  }
  return tangent_defect(p.U.matrix(), v.dU) <= tol &&
         tangent_defect(p.V.matrix(), v.dV) <= tol;
}

StiefelPoint qf(const Matrix& C) {
  const Eigen::Index n = C.rows();
  const Eigen::Index k = C.cols();
  if (k > n) {
    fail(ErrorCode::ShapeMismatch, "qf needs k <= n, got " + shape(C));
  }
  Matrix Q = C;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double original = C.col(j).norm();
    // MGS sweep, then a second sweep if the column still leans on earlier ones.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) {
        Q.col(j) -= Q.col(i).dot(Q.col(j)) * Q.col(i);
      }
      if (j == 0) break;
      const double cn = Q.col(j).norm();
      if (cn == 0.0) break;
      const double overlap = (Q.leftCols(j).transpose() * Q.col(j)).norm() / cn;
      if (overlap <= 1e-12) break;
    }
    const double pivot = Q.col(j).norm();
    if (original == 0.0 || !(pivot > kRankTol * original)) {
      std::ostringstream os;
      os << "column " << j << " of a " << shape(C)
         << " matrix is numerically dependent (pivot " << pivot << ")";
      fail(ErrorCode::RankDeficient, os.str());
    }
    // Dividing by the positive pivot keeps diag(R) > 0.
    Q.col(j) /= pivot;
  }
  return StiefelPoint(std::move(Q), StiefelPoint::Unchecked{});
}

Matrix tangent_project(const StiefelPoint& X, const Matrix& xi) {
  require_same_shape(X.matrix(), xi, "tangent_project");
  const Matrix& M = X.matrix();
  const Matrix S = M.transpose() * xi;
  return xi - 0.5 * M * (S + S.transpose());
}

ProductTangent tangent_project(const ProductPoint& p, const ProductTangent& ambient) {
  if (ambient.dx.size() != p.k()) fail(ErrorCode::ShapeMismatch, "tangent_project (x slot)");
  return {tangent_project(p.U, ambient.dU), ambient.dx, tangent_project(p.V, ambient.dV)};
}

ProductPoint retract(const ProductPoint& p, const ProductTangent& v) {
  require_same_shape(p.U.matrix(), v.dU, "retract (U slot)");
  require_same_shape(p.V.matrix(), v.dV, "retract (V slot)");
  if (v.dx.size() != p.k()) fail(ErrorCode::ShapeMismatch, "retract (x slot)");
  return ProductPoint(qf(p.U.matrix() + v.dU), p.x + v.dx, qf(p.V.matrix() + v.dV));
}

Matrix assemble(const ProductPoint& p) {
  return p.U.matrix() * p.x.asDiagonal() * p.V.matrix().transpose();
}

}  // namespace wlra
