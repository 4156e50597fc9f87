#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "wlra/model.hpp"
#include "wlra/svd.hpp"

using namespace wlra;

namespace {

Matrix diag31() {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 3;
  A(1, 1) = 1;
  return A;
}

}  // namespace

TEST(JacobiSvd, ReconstructsAndSorts) {
  std::mt19937_64 rng(1);
  for (auto [m, n] : {std::pair<Index, Index>{6, 4}, {4, 6}, {10, 10}, {1, 5}, {7, 1}}) {
    const Matrix A = oracle::gaussian_matrix(rng, m, n);
    const SvdResult s = jacobi_svd(A);
    const Matrix R = s.U.matrix() * s.s.asDiagonal() * s.V.matrix().transpose();
    EXPECT_LE((R - A).norm(), 1e-8 * A.norm());
    for (Index i = 1; i < s.s.size(); ++i) EXPECT_GE(s.s(i - 1), s.s(i));
    EXPECT_GE(s.s.minCoeff(), 0.0);
    // Agreement with an independent SVD.
    const Eigen::JacobiSVD<Matrix> ref(A);
    EXPECT_LE((ref.singularValues() - s.s).norm(), 1e-10 * A.norm());
  }
}

TEST(JacobiSvd, RankDeficientInputStillOrthonormal) {
  std::mt19937_64 rng(2);
  const Matrix A = oracle::gaussian_matrix(rng, 6, 2) * oracle::gaussian_matrix(rng, 2, 5);
  const SvdResult s = jacobi_svd(A);
  EXPECT_LE(orthonormality_defect(s.U.matrix()), 1e-10);
  EXPECT_LE(orthonormality_defect(s.V.matrix()), 1e-10);
  EXPECT_LE(s.s.tail(3).norm(), 1e-12 * A.norm());
  EXPECT_LE((s.U.matrix() * s.s.asDiagonal() * s.V.matrix().transpose() - A).norm(),
            1e-10 * A.norm());
  const SvdResult z = jacobi_svd(Matrix::Zero(3, 2));
  EXPECT_EQ(z.s.norm(), 0.0);
}

TEST(FillMissing, ColumnMean) {
  const Observations obs(3, 2, {{0, 0, 2}, {1, 0, 4}, {2, 1, 7}});
  const Matrix D = fill_missing_column_mean(obs);
  EXPECT_EQ(D(2, 0), 3.0);
  EXPECT_EQ(D(0, 0), 2.0);
  EXPECT_EQ(D(0, 1), 7.0);
  EXPECT_EQ(D(1, 1), 7.0);
  const Observations empty_col(2, 2, {{0, 0, 1}, {1, 0, 5}});
  EXPECT_EQ(fill_missing_column_mean(empty_col).col(1), Vector::Zero(2));
}

TEST(FillMissing, FullyObservedUnchanged) {
  std::vector<Entry> e;
  Matrix A(2, 3);
  A << 1, 2, 3, 4, 5, 6;
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 3; ++j) e.push_back({i, j, A(i, j)});
  EXPECT_EQ(fill_missing_column_mean(Observations(2, 3, e)), A);
}

TEST(TruncatedSvdInit, DiagonalHandCase) {
  const SvdInit s = truncated_svd_init(diag31(), 1);
  EXPECT_NEAR(s.point.x(0), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(s.point.U.matrix()(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.point.V.matrix()(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(s.factors.X(0, 0)), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(std::abs(s.factors.Y(0, 0)), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(s.factors.X(1, 0), 0.0, 1e-14);
}

TEST(TruncatedSvdInit, FullRankReproducesAndParametrizationsAgree) {
  std::mt19937_64 rng(3);
  const Matrix A = oracle::gaussian_matrix(rng, 7, 4);
  const SvdInit full = truncated_svd_init(A, 4);
  EXPECT_LE((assemble(full.point) - A).norm(), 1e-8);
  const SvdInit s = truncated_svd_init(A, 2);
  EXPECT_LE((s.factors.X * s.factors.Y.transpose() - assemble(s.point)).norm(), 1e-8);
  const ProblemData d = oracle::random_problem(rng, 7, 4, 2, 0.5);
  EXPECT_NEAR(cost_unregularized(s.point, d), cost_unregularized(s.factors, d), 1e-10);
  EXPECT_THROW(truncated_svd_init(A, 5), Error);
  EXPECT_THROW(truncated_svd_init(A, 0), Error);
}

TEST(EckartYoung, DiagonalHandCase) {
  const EckartYoung ey = eckart_young_best(diag31(), 1);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 3;
  EXPECT_LE((ey.P - expect).norm(), 1e-14);
  EXPECT_NEAR(ey.cost, 1.0, 1e-14);
  const EckartYoung all = eckart_young_best(diag31(), 5);
  EXPECT_LE((all.P - diag31()).norm(), 1e-14);
  EXPECT_EQ(all.cost, 0.0);
}

TEST(EckartYoung, MatchesAlternatingLeastSquares) {
  std::mt19937_64 rng(4);
  const Matrix A = oracle::gaussian_matrix(rng, 6, 4);
  const EckartYoung ey = eckart_young_best(A, 2);
  EXPECT_NEAR(ey.cost, (A - ey.P).squaredNorm(), 1e-10);
  const double best = oracle::als_best_rank_k(A, 2, 20, 200, rng);
  EXPECT_NEAR(ey.cost, best, 1e-6);
  for (int c = 0; c < 2000; ++c) EXPECT_GE(oracle::refined_candidate_cost(A, 2, rng), ey.cost - 1e-8);
}

TEST(Stationarity, Cases) {
  std::mt19937_64 rng(5);
  const Matrix A = oracle::gaussian_matrix(rng, 6, 5);
  EXPECT_TRUE(check_stationarity(A, eckart_young_best(A, 2).P, 1e-8));
  EXPECT_TRUE(check_stationarity(A, Matrix::Zero(6, 5), 1e-8));
  EXPECT_FALSE(check_stationarity(A, A + 0.1 * oracle::gaussian_matrix(rng, 6, 5), 1e-8));
  EXPECT_THROW(check_stationarity(A, Matrix::Zero(5, 5), 1e-8), Error);
}

TEST(EckartYoung, LocalMinimalityProbe) {
  std::mt19937_64 rng(6);
  const Matrix A = oracle::gaussian_matrix(rng, 7, 5);
  const SvdInit s = truncated_svd_init(A, 2);
  const double base = (A - assemble(s.point)).squaredNorm();
  EXPECT_NEAR(base, eckart_young_best(A, 2).cost, 1e-10);
  for (int r = 0; r < 50; ++r) {
    const ProductTangent v = oracle::random_product_tangent(rng, s.point);
    const ProductPoint q = retract(s.point, (1e-3 / v.norm()) * v);
    EXPECT_GE((A - assemble(q)).squaredNorm(), base - 1e-12);
  }
}
