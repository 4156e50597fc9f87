#include "wlra/model.hpp"

#include <Eigen/Sparse>
#include <sstream>

namespace wlra {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// −2 w (a − p) on every observed cell, as a sparse m×n matrix.
SparseMatrix weighted_residual(const ProblemData& data, const Matrix& P) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(data.size());
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    t.emplace_back(en.row, en.col, -2.0 * data.weight(e) * (en.value - P(en.row, en.col)));
  }
  SparseMatrix S(data.m(), data.n());
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

/// Π_X applied to the matrix that is zero except row r, which holds g.
/// Only the single nonzero row enters XᵀΞ, so this is O(n·k).
Matrix project_single_row(const StiefelPoint& X, Index r, const Eigen::RowVectorXd& g) {
  const Matrix& M = X.matrix();
  // XᵀΞ = x_rᵀ g (k×k outer product of row r of X with g).
  const Matrix S = M.row(r).transpose() * g;
  Matrix out = -0.5 * M * (S + S.transpose());
  out.row(r) += g;
  return out;
}

void check_sample(const ProblemData& data, const SampleIndex& s) {
  if (s.entry >= data.size() || data.entry(s.entry).row != s.row ||
      data.entry(s.entry).col != s.col) {
    fail(ErrorCode::InvalidArgument, "sample index does not refer to an observed entry");
  }
}

/// Stochastic Riemannian gradient with the scalar residual factor supplied.
/// `r` is the factor multiplying −2 in every partial derivative.
ProductTangent manifold_sample_gradient(const ProductPoint& p, const SampleIndex& s, double r,
                                        double lambda) {
  const Eigen::RowVectorXd u = p.U.matrix().row(s.row);
  const Eigen::RowVectorXd v = p.V.matrix().row(s.col);
  const Eigen::RowVectorXd xr = p.x.transpose();
  const Eigen::RowVectorXd gu = -2.0 * r * xr.cwiseProduct(v);
  const Eigen::RowVectorXd gv = -2.0 * r * xr.cwiseProduct(u);
  Vector gx = (-2.0 * r * u.cwiseProduct(v)).transpose() + 2.0 * lambda * p.x;
  return {project_single_row(p.U, s.row, gu), std::move(gx), project_single_row(p.V, s.col, gv)};
}

}  // namespace

void check_shapes(const ProductPoint& p, const ProblemData& data) {
  if (p.m() != data.m() || p.n() != data.n()) {
    std::ostringstream os;
    os << "iterate is " << p.m() << "x" << p.n() << ", data is " << data.m() << "x" << data.n();
    fail(ErrorCode::ShapeMismatch, os.str());
  }
}

void check_shapes(const FactorPair& f, const ProblemData& data) {
  if (f.X.rows() != data.m() || f.Y.rows() != data.n() || f.X.cols() != f.Y.cols()) {
    std::ostringstream os;
    os << "factors are " << f.X.rows() << "x" << f.X.cols() << " and " << f.Y.rows() << "x"
       << f.Y.cols() << ", data is " << data.m() << "x" << data.n();
    fail(ErrorCode::ShapeMismatch, os.str());
  }
}

double predict(const ProductPoint& p, Index i, Index j) {
  const auto& U = p.U.matrix();
  const auto& V = p.V.matrix();
  double s = 0.0;
  for (Index l = 0; l < p.k(); ++l) s += U(i, l) * p.x(l) * V(j, l);
  return s;
}

double predict(const FactorPair& f, Index i, Index j) { return f.X.row(i).dot(f.Y.row(j)); }

double cost_unregularized(const ProductPoint& p, const ProblemData& data) {
  check_shapes(p, data);
  double c = 0.0;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double d = en.value - predict(p, en.row, en.col);
    c += data.weight(e) * d * d;
  }
  return c;
}

double cost_unregularized(const FactorPair& f, const ProblemData& data) {
  check_shapes(f, data);
  double c = 0.0;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double d = en.value - predict(f, en.row, en.col);
    c += data.weight(e) * d * d;
  }
  return c;
}

double cost_unregularized(const Matrix& P, const ProblemData& data) {
  if (P.rows() != data.m() || P.cols() != data.n()) {
    fail(ErrorCode::ShapeMismatch, "matrix does not match the data dimensions");
  }
  double c = 0.0;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double d = en.value - P(en.row, en.col);
    c += data.weight(e) * d * d;
  }
  return c;
}

double cost_G(const ProductPoint& p, const ProblemData& data, const Regularization& reg) {
  return cost_unregularized(p, data) + reg.lambda * p.x.squaredNorm();
}

double cost_H(const FactorPair& f, const ProblemData& data, const Regularization& reg) {
  return cost_unregularized(f, data) + reg.lambda * confinement_rho_euclidean(f);
}

double sample_cost_fhat(const Matrix& P, const ProblemData& data, const SampleIndex& s) {
  check_sample(data, s);
  const double d = data.entry(s.entry).value - P(s.row, s.col);
  return d * d;
}

double sample_cost_f(const Matrix& P, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s) {
  return sample_cost_fhat(P, data, s) + reg.lambda * P.squaredNorm();
}

double sample_cost_ftilde(const Matrix& P, const ProblemData& data, const Regularization& reg,
                          const SampleIndex& s) {
  const double p = P(s.row, s.col);
  return sample_cost_fhat(P, data, s) - reg.lambda * data.inverse_weight(s.entry) * p * p +
         reg.lambda * P.squaredNorm();
}

double sample_cost_g(const ProductPoint& p, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s) {
  check_sample(data, s);
  const double d = data.entry(s.entry).value - predict(p, s.row, s.col);
  return d * d + reg.lambda * p.x.squaredNorm();
}

double sample_cost_gtilde(const ProductPoint& p, const ProblemData& data,
                          const Regularization& reg, const SampleIndex& s) {
  check_sample(data, s);
  const double pr = predict(p, s.row, s.col);
  const double d = data.entry(s.entry).value - pr;
  return d * d - reg.lambda * data.inverse_weight(s.entry) * pr * pr +
         reg.lambda * p.x.squaredNorm();
}

double sample_cost_h(const FactorPair& f, const ProblemData& data, const Regularization& reg,
                     const SampleIndex& s) {
  check_sample(data, s);
  const double d = data.entry(s.entry).value - predict(f, s.row, s.col);
  return d * d + reg.lambda * confinement_rho_euclidean(f);
}

ProductTangent stoch_grad_manifold(const ProductPoint& p, const SampleIndex& s,
                                   const ProblemData& data, const Regularization& reg) {
  check_shapes(p, data);
  check_sample(data, s);
  const double r = data.entry(s.entry).value - predict(p, s.row, s.col);
  return manifold_sample_gradient(p, s, r, reg.lambda);
}

ProductTangent full_grad_manifold(const ProductPoint& p, const ProblemData& data,
                                  const Regularization& reg) {
  check_shapes(p, data);
  const Matrix& U = p.U.matrix();
  const Matrix& V = p.V.matrix();
  Matrix gU = Matrix::Zero(p.m(), p.k());
  Matrix gV = Matrix::Zero(p.n(), p.k());
  Vector gx = Vector::Zero(p.k());
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double c = -2.0 * data.weight(e) * (en.value - predict(p, en.row, en.col));
    for (Index l = 0; l < p.k(); ++l) {
      gU(en.row, l) += c * p.x(l) * V(en.col, l);
      gV(en.col, l) += c * p.x(l) * U(en.row, l);
      gx(l) += c * U(en.row, l) * V(en.col, l);
    }
  }
  gx += 2.0 * reg.lambda * p.x;
  return {tangent_project(p.U, gU), std::move(gx), tangent_project(p.V, gV)};
}

FactorGradient stoch_grad_euclidean(const FactorPair& f, const SampleIndex& s,
                                    const ProblemData& data, const Regularization& reg) {
  check_shapes(f, data);
  check_sample(data, s);
  const double r = data.entry(s.entry).value - predict(f, s.row, s.col);
  FactorGradient g{2.0 * reg.lambda * f.X, 2.0 * reg.lambda * f.Y};
  g.dX.row(s.row) += -2.0 * r * f.Y.row(s.col);
  g.dY.row(s.col) += -2.0 * r * f.X.row(s.row);
  return g;
}

FactorGradient full_grad_euclidean(const FactorPair& f, const ProblemData& data,
                                   const Regularization& reg) {
  check_shapes(f, data);
  const Matrix P = f.X * f.Y.transpose();
  const SparseMatrix S = weighted_residual(data, P);
  return {S * f.Y + 2.0 * reg.lambda * f.X,
          SparseMatrix(S.transpose()) * f.X + 2.0 * reg.lambda * f.Y};
}

ProductTangent stoch_grad_pw(const ProductPoint& p, const SampleIndex& s,
                             const ProblemData& data, const Regularization& reg) {
  check_shapes(p, data);
  require_positive_weights(data, reg.lambda);
  check_sample(data, s);
  const double pr = predict(p, s.row, s.col);
  const double r =
      data.entry(s.entry).value - (1.0 - reg.lambda * data.inverse_weight(s.entry)) * pr;
  return manifold_sample_gradient(p, s, r, reg.lambda);
}

ProductTangent full_grad_pw(const ProductPoint& p, const ProblemData& data) {
  check_shapes(p, data);
  if (!data.positive_everywhere()) {
    fail(ErrorCode::NonPositiveWeight,
         "positive-weights gradient needs every cell observed with a weight > 0");
  }
  const Matrix& U = p.U.matrix();
  const Matrix& V = p.V.matrix();
  const SparseMatrix S = weighted_residual(data, assemble(p));
  const Matrix gU = S * (V * p.x.asDiagonal());
  const Matrix gV = SparseMatrix(S.transpose()) * (U * p.x.asDiagonal());
  Vector gx = Vector::Zero(p.k());
  for (int o = 0; o < S.outerSize(); ++o) {
    for (SparseMatrix::InnerIterator it(S, o); it; ++it) {
      gx += it.value() * U.row(it.row()).transpose().cwiseProduct(V.row(it.col()).transpose());
    }
  }
  return {tangent_project(p.U, gU), std::move(gx), tangent_project(p.V, gV)};
}

double confinement_rho(const ProductPoint& p) { return p.x.squaredNorm(); }

double confinement_rho_euclidean(const FactorPair& f) {
  return f.X.squaredNorm() + f.Y.squaredNorm();
}

}  // namespace wlra
