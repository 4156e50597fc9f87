#include "wlra/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wlra {

namespace {

/// Extends the orthonormal columns U.leftCols(filled) to a full orthonormal
/// set by orthogonalizing coordinate vectors, largest residual first.
void complete_orthonormal(Matrix& U, Index filled) {
  const Index m = U.rows();
  for (Index j = filled; j < U.cols(); ++j) {
    Vector best;
    double best_norm = -1.0;
    for (Index i = 0; i < m; ++i) {
      Vector e = Vector::Unit(m, i);
      for (int pass = 0; pass < 2; ++pass) {
        for (Index c = 0; c < j; ++c) e -= U.col(c).dot(e) * U.col(c);
      }
      const double nrm = e.norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = e;
      }
    }
    U.col(j) = best / best_norm;
  }
}

SvdResult jacobi_tall(const Matrix& A, double tol, int max_sweeps) {
  const Index m = A.rows();
  const Index n = A.cols();
  Matrix B = A;
  Matrix V = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double alpha = B.col(p).squaredNorm();
        const double beta = B.col(q).squaredNorm();
        const double gamma = B.col(p).dot(B.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < m; ++i) {
          const double bp = B(i, p), bq = B(i, q);
          B(i, p) = c * bp - s * bq;
          B(i, q) = s * bp + c * bq;
        }
        for (Index i = 0; i < n; ++i) {
          const double vp = V(i, p), vq = V(i, q);
          V(i, p) = c * vp - s * vq;
          V(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector norms(n);
  for (Index j = 0; j < n; ++j) norms(j) = B.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return norms(a) > norms(b); });

  Vector s(n);
  Matrix U = Matrix::Zero(m, n);
  Matrix Vs(n, n);
  const double smax = n > 0 ? norms(order[0]) : 0.0;
  // Columns this small carry no direction information; their left vectors are
  // rebuilt from an orthonormal completion instead of normalizing noise.
  const double null_cut = smax * 1e-13 * static_cast<double>(std::max(m, n));
  Index filled = 0;
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    s(j) = norms(src);
    Vs.col(j) = V.col(src);
    if (s(j) > null_cut && s(j) > 0.0 && filled == j) {
      U.col(j) = B.col(src) / s(j);
      ++filled;
    }
  }
  complete_orthonormal(U, filled);
  return {StiefelPoint(std::move(U)), std::move(s), StiefelPoint(std::move(Vs))};
}

}  // namespace

SvdResult jacobi_svd(const Matrix& A, double tol, int max_sweeps) {
  if (A.rows() == 0 || A.cols() == 0) {
    fail(ErrorCode::InvalidDimensions, "SVD of an empty matrix");
  }
  if (!A.allFinite()) fail(ErrorCode::InvalidArgument, "SVD input has non-finite entries");
  if (A.rows() >= A.cols()) return jacobi_tall(A, tol, max_sweeps);
  SvdResult t = jacobi_tall(A.transpose(), tol, max_sweeps);
  return {std::move(t.V), std::move(t.s), std::move(t.U)};
}

Matrix fill_missing_column_mean(const Observations& obs) {
  const Index m = obs.rows();
  const Index n = obs.cols();
  Vector sum = Vector::Zero(n);
  std::vector<Index> count(static_cast<std::size_t>(n), 0);
  for (const Entry& e : obs.entries()) {
    sum(e.col) += e.value;
    ++count[static_cast<std::size_t>(e.col)];
  }
  Matrix D(m, n);
  for (Index j = 0; j < n; ++j) {
    const Index c = count[static_cast<std::size_t>(j)];
    D.col(j).setConstant(c > 0 ? sum(j) / static_cast<double>(c) : 0.0);
  }
  for (const Entry& e : obs.entries()) D(e.row, e.col) = e.value;
  return D;
}

Matrix fill_missing_column_mean(const ProblemData& data) {
  return fill_missing_column_mean(data.observations());
}

SvdInit truncated_svd_init(const Matrix& dense, Index k) {
  if (k < 1 || k > std::min(dense.rows(), dense.cols())) {
    std::ostringstream os;
    os << "k=" << k << " must satisfy 1 <= k <= min(m, n) for a " << dense.rows() << "x"
       << dense.cols() << " matrix";
    fail(ErrorCode::InvalidDimensions, os.str());
  }
  const SvdResult svd = jacobi_svd(dense);
  const Vector x = svd.s.head(k);
  if ((x.array() < 0.0).any()) {
    fail(ErrorCode::NegativeSingularValue, "a leading singular value is negative");
  }
  StiefelPoint U(svd.U.matrix().leftCols(k));
  StiefelPoint V(svd.V.matrix().leftCols(k));
  const Vector root = x.cwiseSqrt();
  FactorPair factors{U.matrix() * root.asDiagonal(), V.matrix() * root.asDiagonal()};
  return {ProductPoint(std::move(U), x, std::move(V)), std::move(factors)};
}

EckartYoung eckart_young_best(const Matrix& A, Index k) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "k must be >= 0");
  const SvdResult svd = jacobi_svd(A);
  const Index r = svd.s.size();
  const Index kk = std::min(k, r);
  EckartYoung out;
  out.P = svd.U.matrix().leftCols(kk) * svd.s.head(kk).asDiagonal() *
          svd.V.matrix().leftCols(kk).transpose();
  out.cost = svd.s.tail(r - kk).squaredNorm();
  return out;
}

bool check_stationarity(const Matrix& A, const Matrix& P, double tol) {
  if (A.rows() != P.rows() || A.cols() != P.cols()) {
    fail(ErrorCode::ShapeMismatch, "stationarity check needs equal shapes");
  }
  const double left = (A.transpose() * P - P.transpose() * P).norm();
  const double right = (P * A.transpose() - P * P.transpose()).norm();
  return left <= tol && right <= tol;
}

}  // namespace wlra
