#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "wlra/model.hpp"
#include "wlra/step_policy.hpp"

using namespace wlra;

namespace {

// m = n = k = 1, A = [2], W = [1].
ProblemData scalar_problem() {
  return ProblemData(Observations(1, 1, {{0, 0, 2.0}}), {1.0}, 1);
}

ProductPoint scalar_point(double x) {
  return ProductPoint(StiefelPoint(Matrix::Ones(1, 1)), Vector::Constant(1, x),
                      StiefelPoint(Matrix::Ones(1, 1)));
}

FactorPair scalar_factors(double x, double y) {
  return {Matrix::Constant(1, 1, x), Matrix::Constant(1, 1, y)};
}

SampleIndex at(const ProblemData& d, std::size_t e) {
  return {d.entry(e).row, d.entry(e).col, e};
}

FactorPair random_factors(std::mt19937_64& rng, Index m, Index n, Index k) {
  return {oracle::gaussian_matrix(rng, m, k), oracle::gaussian_matrix(rng, n, k)};
}

FactorPair add(const FactorPair& f, double t, const FactorGradient& d) {
  return {f.X + t * d.dX, f.Y + t * d.dY};
}

double fg_inner(const FactorGradient& a, const FactorGradient& b) {
  return (a.dX.array() * b.dX.array()).sum() + (a.dY.array() * b.dY.array()).sum();
}

}  // namespace

TEST(Costs, ScalarHandValues) {
  const ProblemData d = scalar_problem();
  const Regularization reg(0.5);
  EXPECT_DOUBLE_EQ(cost_unregularized(scalar_point(1), d), 1.0);
  EXPECT_DOUBLE_EQ(cost_G(scalar_point(1), d, reg), 1.5);
  EXPECT_DOUBLE_EQ(cost_H(scalar_factors(1, 1), d, reg), 2.0);
  EXPECT_DOUBLE_EQ(cost_unregularized(Matrix::Ones(1, 1), d), 1.0);
}

TEST(Costs, ZeroIterateAndPerfectFit) {
  std::mt19937_64 rng(1);
  const ProblemData d = oracle::random_problem(rng, 5, 4, 2, 0.5);
  double wa2 = 0;
  Matrix A = Matrix::Zero(5, 4);
  for (std::size_t e = 0; e < d.size(); ++e) {
    wa2 += d.weight(e) * d.entry(e).value * d.entry(e).value;
    A(d.entry(e).row, d.entry(e).col) = d.entry(e).value;
  }
  EXPECT_NEAR(cost_unregularized(Matrix::Zero(5, 4), d), wa2, 1e-15);
  EXPECT_NEAR(cost_H({Matrix::Zero(5, 2), Matrix::Zero(4, 2)}, d, Regularization(0.3)), wa2,
              1e-15);
  const ProductPoint zero(StiefelPoint::identity(5, 2), Vector::Zero(2),
                          StiefelPoint::identity(4, 2));
  EXPECT_NEAR(cost_G(zero, d, Regularization(0.3)), wa2, 1e-15);
  EXPECT_EQ(cost_unregularized(A, d), 0.0);
}

TEST(Costs, MatchDenseOracleAndNormIdentity) {
  std::mt19937_64 rng(2);
  const ProblemData d = oracle::random_problem(rng, 7, 5, 3, 0.4);
  const Regularization reg(0.2);
  for (int r = 0; r < 10; ++r) {
    const ProductPoint p = oracle::random_point(rng, 7, 5, 3, 2.0);
    const Matrix P = assemble(p);
    EXPECT_NEAR(cost_unregularized(p, d), oracle::dense_cost(P, d), 1e-12);
    EXPECT_NEAR(cost_G(p, d, reg), cost_unregularized(P, d) + 0.2 * P.squaredNorm(), 1e-12);
    const FactorPair f = random_factors(rng, 7, 5, 3);
    EXPECT_NEAR(cost_unregularized(f, d), oracle::dense_cost(f.X * f.Y.transpose(), d), 1e-12);
    EXPECT_NEAR(confinement_rho(p), P.squaredNorm(), 1e-10);
  }
}

TEST(Costs, ShapeMismatch) {
  const ProblemData d = scalar_problem();
  EXPECT_THROW(cost_unregularized(Matrix::Zero(2, 1), d), Error);
  EXPECT_THROW(cost_H({Matrix::Zero(2, 1), Matrix::Zero(1, 1)}, d, Regularization(1)), Error);
}

TEST(Confinement, HandValues) {
  Vector x(2);
  x << 3, 4;
  const ProductPoint p(StiefelPoint::identity(2, 2), x, StiefelPoint::identity(2, 2));
  EXPECT_EQ(confinement_rho(p), 25.0);
  EXPECT_EQ(confinement_rho_euclidean({Matrix::Zero(3, 2), Matrix::Zero(2, 2)}), 0.0);
}

TEST(Regularization, RejectsNonPositive) {
  EXPECT_THROW(Regularization(0.0), Error);
  EXPECT_THROW(Regularization(-1.0), Error);
}

TEST(Sampling, SingleEntryAlwaysChosen) {
  const ProblemData d(Observations(3, 3, {{1, 2, 5.0}}), {1.0}, 1);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const SampleIndex s = sample_index(d, rng);
    EXPECT_EQ(s.row, 1);
    EXPECT_EQ(s.col, 2);
  }
}

TEST(Sampling, ZeroWeightNeverChosen) {
  const ProblemData d(Observations(1, 3, {{0, 0, 1.0}, {0, 1, 1.0}, {0, 2, 1.0}}),
                      {0.5, 0.0, 0.5}, 1);
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) EXPECT_NE(sample_index(d, rng).col, 1);
}

TEST(Sampling, BinaryFrequencies) {
  const ProblemData d(Observations(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}),
                      {0.25, 0.25, 0.25, 0.25}, 1);
  Rng rng(6);
  std::map<std::size_t, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sample_index(d, rng).entry];
  double chi2 = 0;
  for (std::size_t e = 0; e < 4; ++e) {
    const double f = counts[e] / static_cast<double>(draws);
    EXPECT_NEAR(f, 0.25, 0.01);
    chi2 += std::pow(counts[e] - draws / 4.0, 2) / (draws / 4.0);
  }
  EXPECT_LT(chi2, 16.27);  // χ²₃ critical value at α = 0.001
}

TEST(Sampling, NonUniformFrequencies) {
  const std::vector<double> w = {0.1, 0.6, 0.3};
  const ProblemData d(Observations(1, 3, {{0, 0, 1}, {0, 1, 1}, {0, 2, 1}}), w, 1);
  Rng rng(8);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 100000; ++i) ++counts[sample_index(d, rng).entry];
  for (int e = 0; e < 3; ++e) EXPECT_NEAR(counts[e] / 1e5, w[e], 0.01);
}

TEST(Sampling, SeedReproducible) {
  std::mt19937_64 g(9);
  const ProblemData d = oracle::random_problem(g, 6, 6, 2, 0.5);
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_index(d, a).entry, sample_index(d, b).entry);
}

TEST(StochGradManifold, ScalarHandValue) {
  const ProblemData d = scalar_problem();
  const ProductTangent g = stoch_grad_manifold(scalar_point(1), at(d, 0), d, Regularization(0.5));
  EXPECT_EQ(g.dU(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g.dx(0), -1.0);
  EXPECT_EQ(g.dV(0, 0), 0.0);
}

TEST(StochGradEuclidean, ScalarHandValue) {
  const ProblemData d = scalar_problem();
  const Regularization reg(0.5);
  const FactorGradient g = stoch_grad_euclidean(scalar_factors(1, 1), at(d, 0), d, reg);
  EXPECT_DOUBLE_EQ(g.dX(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(g.dY(0, 0), -1.0);
  const FactorGradient G = full_grad_euclidean(scalar_factors(1, 1), d, reg);
  EXPECT_DOUBLE_EQ(G.dX(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(G.dY(0, 0), -1.0);
}

TEST(StochGradPw, ScalarHandValue) {
  const ProblemData d = scalar_problem();
  const ProductTangent g = stoch_grad_pw(scalar_point(1), at(d, 0), d, Regularization(0.5));
  EXPECT_DOUBLE_EQ(g.dx(0), -2.0);
}

TEST(StochGradPw, Preconditions) {
  const ProblemData d = scalar_problem();
  EXPECT_THROW(stoch_grad_pw(scalar_point(1), at(d, 0), d, Regularization(1.0)), Error);
  const ProblemData sparse(Observations(2, 1, {{0, 0, 1.0}}), {1.0}, 1);
  const ProductPoint p(StiefelPoint::identity(2, 1), Vector::Ones(1),
                       StiefelPoint::identity(1, 1));
  try {
    stoch_grad_pw(p, at(sparse, 0), sparse, Regularization(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveWeight);
  }
  EXPECT_THROW(full_grad_pw(p, sparse), Error);
}

TEST(Gradients, ZeroAtExactFit) {
  // A = P on the full support with λ = 0 in the data term (tiny λ here).
  std::mt19937_64 rng(10);
  const ProductPoint p = oracle::random_point(rng, 4, 3, 2);
  const Matrix P = assemble(p);
  std::vector<Entry> entries;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) entries.push_back({i, j, P(i, j)});
  const ProblemData d(Observations(4, 3, entries), std::vector<double>(12, 1.0 / 12), 2);
  EXPECT_LE(full_grad_pw(p, d).norm(), 1e-14);
  const Regularization tiny(1e-300);
  EXPECT_LE(full_grad_manifold(p, d, tiny).norm(), 1e-14);
  for (std::size_t e = 0; e < d.size(); ++e)
    EXPECT_LE(stoch_grad_manifold(p, at(d, e), d, tiny).norm(), 1e-13);
  const FactorPair f{p.U.matrix() * p.x.asDiagonal(), p.V.matrix()};
  EXPECT_LE(std::sqrt(full_grad_euclidean(f, d, tiny).squared_norm()), 1e-13);
}

TEST(Gradients, AreTangent) {
  std::mt19937_64 rng(11);
  const ProblemData d = oracle::random_problem(rng, 8, 6, 2, 0.5);
  const ProblemData full =
      oracle::random_problem(rng, 8, 6, 2, 1.0, oracle::WeightKind::RandomPositive);
  const Regularization reg(0.1), reg_pw(full.min_weight() / 2);
  for (int r = 0; r < 10; ++r) {
    const ProductPoint p = oracle::random_point(rng, 8, 6, 2, 3.0);
    EXPECT_TRUE(is_tangent(p, full_grad_manifold(p, d, reg)));
    EXPECT_TRUE(is_tangent(p, stoch_grad_manifold(p, at(d, r % d.size()), d, reg)));
    EXPECT_TRUE(is_tangent(p, full_grad_pw(p, full)));
    EXPECT_TRUE(is_tangent(p, stoch_grad_pw(p, at(full, r), full, reg_pw)));
  }
}

// Directional derivative of cost∘retract against the gradient inner product.
class FiniteDifference : public ::testing::Test {
 protected:
  static constexpr double kH = 1e-6;
  static constexpr double kTol = 1e-5;
  std::mt19937_64 rng{2024};
};

TEST_F(FiniteDifference, FullGradManifold) {
  const ProblemData d = oracle::random_problem(rng, 8, 6, 2, 0.5);
  const Regularization reg(0.05);
  const ProductPoint p = oracle::random_point(rng, 8, 6, 2, 2.0);
  const ProductTangent g = full_grad_manifold(p, d, reg);
  for (int r = 0; r < 20; ++r) {
    const ProductTangent v = oracle::random_product_tangent(rng, p);
    const double num = oracle::central_difference(
        [&](double t) { return cost_G(retract(p, t * v), d, reg); }, kH);
    EXPECT_LE(oracle::relative_error(inner(g, v), num, 1e-3 * g.norm() * v.norm()), kTol);
  }
}

TEST_F(FiniteDifference, StochGradManifold) {
  const ProblemData d = oracle::random_problem(rng, 8, 6, 2, 0.5);
  const Regularization reg(0.05);
  const ProductPoint p = oracle::random_point(rng, 8, 6, 2, 2.0);
  for (int r = 0; r < 20; ++r) {
    const SampleIndex s = at(d, static_cast<std::size_t>(r) % d.size());
    const ProductTangent g = stoch_grad_manifold(p, s, d, reg);
    const ProductTangent v = oracle::random_product_tangent(rng, p);
    const double num = oracle::central_difference(
        [&](double t) { return sample_cost_g(retract(p, t * v), d, reg, s); }, kH);
    EXPECT_LE(oracle::relative_error(inner(g, v), num, 1e-3 * g.norm() * v.norm()), kTol);
  }
}

TEST_F(FiniteDifference, FullGradEuclidean) {
  const ProblemData d = oracle::random_problem(rng, 8, 6, 2, 0.5);
  const Regularization reg(0.05);
  const FactorPair f = random_factors(rng, 8, 6, 2);
  const FactorGradient g = full_grad_euclidean(f, d, reg);
  for (int r = 0; r < 20; ++r) {
    const FactorGradient v{oracle::gaussian_matrix(rng, 8, 2), oracle::gaussian_matrix(rng, 6, 2)};
    const double num = oracle::central_difference(
        [&](double t) { return cost_H(add(f, t, v), d, reg); }, kH);
    const double scale = 1e-3 * std::sqrt(g.squared_norm() * v.squared_norm());
    EXPECT_LE(oracle::relative_error(fg_inner(g, v), num, scale), kTol);
  }
}

TEST_F(FiniteDifference, StochGradEuclidean) {
  const ProblemData d = oracle::random_problem(rng, 8, 6, 2, 0.5);
  const Regularization reg(0.05);
  const FactorPair f = random_factors(rng, 8, 6, 2);
  for (int r = 0; r < 20; ++r) {
    const SampleIndex s = at(d, static_cast<std::size_t>(r) % d.size());
    const FactorGradient g = stoch_grad_euclidean(f, s, d, reg);
    const FactorGradient v{oracle::gaussian_matrix(rng, 8, 2), oracle::gaussian_matrix(rng, 6, 2)};
    const double num = oracle::central_difference(
        [&](double t) { return sample_cost_h(add(f, t, v), d, reg, s); }, kH);
    const double scale = 1e-3 * std::sqrt(g.squared_norm() * v.squared_norm());
    EXPECT_LE(oracle::relative_error(fg_inner(g, v), num, scale), kTol);
  }
}

TEST_F(FiniteDifference, FullGradPw) {
  const ProblemData d =
      oracle::random_problem(rng, 8, 6, 2, 1.0, oracle::WeightKind::RandomPositive);
  const ProductPoint p = oracle::random_point(rng, 8, 6, 2, 2.0);
  const ProductTangent g = full_grad_pw(p, d);
  for (int r = 0; r < 20; ++r) {
    const ProductTangent v = oracle::random_product_tangent(rng, p);
    const double num = oracle::central_difference(
        [&](double t) { return cost_unregularized(retract(p, t * v), d); }, kH);
    EXPECT_LE(oracle::relative_error(inner(g, v), num, 1e-3 * g.norm() * v.norm()), kTol);
  }
}

TEST_F(FiniteDifference, StochGradPw) {
  const ProblemData d =
      oracle::random_problem(rng, 8, 6, 2, 1.0, oracle::WeightKind::RandomPositive);
  const Regularization reg(d.min_weight() / 2);
  const ProductPoint p = oracle::random_point(rng, 8, 6, 2, 2.0);
  for (int r = 0; r < 20; ++r) {
    const SampleIndex s = at(d, static_cast<std::size_t>(r * 7) % d.size());
    const ProductTangent g = stoch_grad_pw(p, s, d, reg);
    const ProductTangent v = oracle::random_product_tangent(rng, p);
    const double num = oracle::central_difference(
        [&](double t) { return sample_cost_gtilde(retract(p, t * v), d, reg, s); }, kH);
    EXPECT_LE(oracle::relative_error(inner(g, v), num, 1e-3 * g.norm() * v.norm()), kTol);
  }
}

TEST(Unbiasedness, ManifoldEuclideanPositiveWeights) {
  std::mt19937_64 rng(12);
  const ProblemData d = oracle::random_problem(rng, 4, 3, 2, 0.6);
  const Regularization reg(0.1);
  const ProductPoint p = oracle::random_point(rng, 4, 3, 2, 2.0);
  ProductTangent sum = ProductTangent::zero(p);
  FactorGradient esum{Matrix::Zero(4, 2), Matrix::Zero(3, 2)};
  const FactorPair f = random_factors(rng, 4, 3, 2);
  for (std::size_t e = 0; e < d.size(); ++e) {
    sum += d.weight(e) * stoch_grad_manifold(p, at(d, e), d, reg);
    const FactorGradient ge = stoch_grad_euclidean(f, at(d, e), d, reg);
    esum.dX += d.weight(e) * ge.dX;
    esum.dY += d.weight(e) * ge.dY;
  }
  EXPECT_LE((sum - full_grad_manifold(p, d, reg)).norm(), 1e-12);
  const FactorGradient ge = full_grad_euclidean(f, d, reg);
  EXPECT_LE((esum.dX - ge.dX).norm() + (esum.dY - ge.dY).norm(), 1e-12);

  const ProblemData full =
      oracle::random_problem(rng, 4, 3, 2, 1.0, oracle::WeightKind::RandomPositive);
  const Regularization reg_pw(full.min_weight() / 2);
  ProductTangent psum = ProductTangent::zero(p);
  for (std::size_t e = 0; e < full.size(); ++e)
    psum += full.weight(e) * stoch_grad_pw(p, at(full, e), full, reg_pw);
  EXPECT_LE((psum - full_grad_pw(p, full)).norm(), 1e-12);
}

TEST(Unbiasedness, PwMatchesManifoldDeltaSumAtZeroLambda) {
  // Two formula paths for ∇Ĝ: sparse products vs the Δ-sum with λ → 0.
  std::mt19937_64 rng(13);
  const ProblemData d =
      oracle::random_problem(rng, 5, 4, 2, 1.0, oracle::WeightKind::RandomPositive);
  const ProductPoint p = oracle::random_point(rng, 5, 4, 2, 2.0);
  const ProductTangent a = full_grad_pw(p, d);
  const ProductTangent b = full_grad_manifold(p, d, Regularization(1e-300));
  EXPECT_LE((a - b).norm(), 1e-13);
}

TEST(Expectations, SampleCostsSumToFullCosts) {
  std::mt19937_64 rng(14);
  const ProblemData d = oracle::random_problem(rng, 6, 5, 2, 0.5);
  const ProblemData full =
      oracle::random_problem(rng, 6, 5, 2, 1.0, oracle::WeightKind::RandomPositive);
  const Regularization reg(0.07), reg_pw(full.min_weight() / 2);
  const ProductPoint p = oracle::random_point(rng, 6, 5, 2, 2.0);
  const FactorPair f = random_factors(rng, 6, 5, 2);
  const Matrix P = assemble(p);
  double fhat = 0, fs = 0, g = 0, h = 0, ft = 0, gt = 0;
  for (std::size_t e = 0; e < d.size(); ++e) {
    const double w = d.weight(e);
    fhat += w * sample_cost_fhat(P, d, at(d, e));
    fs += w * sample_cost_f(P, d, reg, at(d, e));
    g += w * sample_cost_g(p, d, reg, at(d, e));
    h += w * sample_cost_h(f, d, reg, at(d, e));
  }
  for (std::size_t e = 0; e < full.size(); ++e) {
    ft += full.weight(e) * sample_cost_ftilde(P, full, reg_pw, at(full, e));
    gt += full.weight(e) * sample_cost_gtilde(p, full, reg_pw, at(full, e));
  }
  EXPECT_NEAR(fhat, cost_unregularized(P, d), 1e-12);
  EXPECT_NEAR(fs, cost_unregularized(P, d) + 0.07 * P.squaredNorm(), 1e-12);
  EXPECT_NEAR(g, cost_G(p, d, reg), 1e-12);
  EXPECT_NEAR(h, cost_H(f, d, reg), 1e-12);
  EXPECT_NEAR(ft, cost_unregularized(P, full), 1e-12);
  EXPECT_NEAR(gt, cost_unregularized(p, full), 1e-12);
}

TEST(Confinement, SignOnTheRho0Sphere) {
  std::mt19937_64 rng(15);
  const ProblemData d = oracle::random_problem(rng, 6, 5, 2, 0.5);
  for (double lambda : {1e-2, 1e-1, 1.0}) {
    const Regularization reg(lambda);
    const double alpha = alpha_of(d);
    const double r0 = rho0(PolicyKind::ManifoldRegularized, 0.0, alpha, lambda);
    const double r0e = rho0(PolicyKind::EuclideanRegularized, 0.0, alpha, lambda);
    for (int r = 0; r < 50; ++r) {
      ProductPoint p = oracle::random_point(rng, 6, 5, 2);
      p.x *= std::sqrt(r0) / p.x.norm();
      ProductTangent grad_rho = ProductTangent::zero(p);
      grad_rho.dx = 2 * p.x;
      FactorPair f = random_factors(rng, 6, 5, 2);
      const double scale = std::sqrt(r0e / confinement_rho_euclidean(f));
      f.X *= scale;
      f.Y *= scale;
      const FactorGradient grad_rho_e{2 * f.X, 2 * f.Y};
      for (std::size_t e = 0; e < d.size(); ++e) {
        EXPECT_GE(inner(grad_rho, stoch_grad_manifold(p, at(d, e), d, reg)), -1e-9);
        EXPECT_GE(fg_inner(grad_rho_e, stoch_grad_euclidean(f, at(d, e), d, reg)), -1e-9);
      }
    }
  }
}
