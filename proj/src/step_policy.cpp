#include "wlra/step_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wlra {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void check_lambda(PolicyKind kind, double lambda, double w0) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "lambda must be positive, got " << lambda;
    fail(ErrorCode::LambdaOutOfRange, os.str());
  }
  if (kind == PolicyKind::ManifoldPositiveWeights && !(lambda < w0)) {
    std::ostringstream os;
    os << "positive-weights mode needs lambda < w0 = " << w0 << ", got " << lambda;
    fail(ErrorCode::LambdaOutOfRange, os.str());
  }
}

}  // namespace

const char* to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::ManifoldRegularized: return "manifold";
    case PolicyKind::EuclideanRegularized: return "euclidean";
    case PolicyKind::ManifoldPositiveWeights: return "positive-weights";
  }
  return "unknown";
}

Schedule Schedule::harmonic() {
  Schedule s;
  s.rule = [](std::int64_t t) { return 1.0 / static_cast<double>(t + 1); };
  s.c = 1.0;
  s.sigma = kPi2 / 6.0;
  s.harmonic_default = true;
  return s;
}

Schedule Schedule::custom(std::function<double(std::int64_t)> rule, double c, double sigma) {
  if (!rule || !(c > 0.0) || !(sigma > 0.0)) {
    fail(ErrorCode::InvalidArgument, "custom schedule needs a rule and positive c, sigma");
  }
  Schedule s;
  s.rule = std::move(rule);
  s.c = c;
  s.sigma = sigma;
  return s;
}

double alpha_of(const ProblemData& data) {
  if (data.size() == 0) fail(ErrorCode::EmptySupport, "alpha needs at least one entry");
  double a = 0.0;
  for (const Entry& e : data.observations().entries()) a = std::max(a, e.value * e.value);
  return a;
}

double rho0(PolicyKind kind, double init_norm_sq, double alpha, double lambda, double w0) {
  check_lambda(kind, lambda, w0);
  switch (kind) {
    case PolicyKind::ManifoldRegularized:
      return std::max(init_norm_sq, alpha / (4.0 * lambda));
    case PolicyKind::EuclideanRegularized:
      return std::max(init_norm_sq, alpha / (2.0 * lambda));
    case PolicyKind::ManifoldPositiveWeights:
      return std::max(init_norm_sq, alpha / (4.0 * lambda * (1.0 - lambda / w0)));
  }
  return 0.0;
}

double phi_min(PolicyKind kind, double K, double lambda, double alpha, Index k, double r0,
               double w0) {
  check_lambda(kind, lambda, w0);
  const double kk = static_cast<double>(k);
  const double sa = std::sqrt(alpha);
  switch (kind) {
    case PolicyKind::ManifoldRegularized: {
      const double A = (lambda + 2.0 * std::sqrt(lambda) + 1.0) * alpha;
      const double B = std::sqrt(32.0 * kk * alpha * lambda +
                                 8.0 * kk * (2.0 + lambda * lambda) *
                                     (2.0 * lambda * r0 + (kPi2 + 12.0) / 6.0));
      return K * std::max(A, B);
    }
    case PolicyKind::EuclideanRegularized: {
      const double A = 2.0 * alpha * sa + alpha * alpha / (2.0 * lambda) + 2.0 * lambda * alpha;
      const double q = 2.0 * sa + r0 + (12.0 + kPi2) / (12.0 * lambda);
      const double B =
          std::sqrt((q * q + 4.0 * lambda * lambda) * (2.0 * lambda * r0 + (12.0 + kPi2) / 6.0));
      return K * std::max(A, B);
    }
    case PolicyKind::ManifoldPositiveWeights: {
      // a = 1/w₀, b = 1/√w₀; at λ = w₀/2 this is exactly
      // max{4α(w₀/2 + 2√(w₀/2) + 1), √(16k(2αw₀ + (2 + w₀²/4)(w₀ρ₀ + (6+π²)/6)))}.
      const double A = (lambda + 2.0 * std::sqrt(lambda) + 1.0) * alpha * w0 /
                       (lambda * (1.0 - lambda / w0));
      const double B = std::sqrt(16.0 * kk * w0 *
                                 (2.0 * alpha + (2.0 + lambda * lambda) *
                                                    (r0 + (6.0 + kPi2) / (6.0 * w0))));
      return K * std::max(A, B);
    }
  }
  return 0.0;
}

double phi_min_general(PolicyKind kind, double K, double lambda, double alpha, Index k,
                       double rho1, double a, double b, double w0) {
  check_lambda(kind, lambda, w0);
  const double kk = static_cast<double>(k);
  const double sa = std::sqrt(alpha);
  double A = 0.0;
  double B = 0.0;
  switch (kind) {
    case PolicyKind::ManifoldRegularized:
      A = (lambda + 2.0 * std::sqrt(lambda) + 1.0) * alpha / (a * lambda);
      B = std::sqrt(16.0 * kk * (2.0 * alpha + (2.0 + lambda * lambda) * rho1)) / b;
      break;
    case PolicyKind::EuclideanRegularized: {
      const double r = alpha / (2.0 * lambda);
      A = 4.0 / a * ((sa + r / 2.0) * r + lambda * r);
      const double q = sa + rho1 / 2.0;
      B = std::sqrt(8.0 * q * q * rho1 + 8.0 * lambda * lambda * rho1) / b;
      break;
    }
    case PolicyKind::ManifoldPositiveWeights:
      A = (lambda + 2.0 * std::sqrt(lambda) + 1.0) * alpha / (a * lambda * (1.0 - lambda / w0));
      B = std::sqrt(16.0 * kk * (2.0 * alpha + (2.0 + lambda * lambda) * rho1)) / b;
      break;
  }
  return K * std::max(A, B);
}

StepPolicy make_policy(PolicyKind kind, const ProblemData& data, double lambda, double K,
                       double init_norm_sq, Schedule schedule) {
  if (!(K >= 1.0) || !std::isfinite(K)) {
    std::ostringstream os;
    os << "K must be a finite value >= 1, got " << K;
    fail(ErrorCode::InvalidArgument, os.str());
  }
  StepPolicy p;
  p.kind = kind;
  p.lambda = lambda;
  p.K = K;
  p.k = data.k();
  p.alpha = alpha_of(data);
  if (kind == PolicyKind::ManifoldPositiveWeights) {
    require_positive_weights(data, lambda);
    p.w0 = data.min_weight();
    p.a = 1.0 / p.w0;
    p.b = 1.0 / std::sqrt(p.w0);
  } else {
    check_lambda(kind, lambda, 0.0);
    p.a = 1.0 / lambda;
    p.b = 1.0 / std::sqrt(lambda);
  }
  p.schedule = std::move(schedule);
  p.rho0 = rho0(kind, init_norm_sq, p.alpha, lambda, p.w0);
  p.rho1 = p.rho0 + p.schedule.c * p.a + p.b * p.b * p.schedule.sigma / 2.0;
  p.phi_min = p.schedule.harmonic_default
                  ? phi_min(kind, K, lambda, p.alpha, p.k, p.rho0, p.w0)
                  : phi_min_general(kind, K, lambda, p.alpha, p.k, p.rho1, p.a, p.b, p.w0);
  p.theta = p.schedule.c / p.phi_min;
  return p;
}

AdaptiveBounds adaptive_A_B(const ProductPoint& p, const ProblemData& data,
                            const StepPolicy& policy) {
  check_shapes(p, data);
  if (policy.kind == PolicyKind::EuclideanRegularized) {
    fail(ErrorCode::InvalidArgument, "manifold iterate with a Euclidean policy");
  }
  const bool pw = policy.kind == PolicyKind::ManifoldPositiveWeights;
  const double lambda = policy.lambda;
  const double xx = p.x.squaredNorm();
  const Matrix& U = p.U.matrix();
  const Matrix& V = p.V.matrix();
  double amax = 0.0;
  double bmax = 0.0;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double pr = predict(p, en.row, en.col);
    const double shrink = pw ? 1.0 - lambda * data.inverse_weight(e) : 1.0;
    const double r = en.value - shrink * pr;
    amax = std::max(amax, 4.0 * r * pr - 4.0 * lambda * xx);
    double s = 0.0;
    for (Index l = 0; l < p.k(); ++l) {
      const double t = -r * U(en.row, l) * V(en.col, l) + lambda * p.x(l);
      s += t * t;
    }
    bmax = std::max(bmax, std::sqrt(8.0 * s));
  }
  return {amax / policy.a, bmax / policy.b};
}

AdaptiveBounds adaptive_A_B(const FactorPair& f, const ProblemData& data,
                            const StepPolicy& policy) {
  check_shapes(f, data);
  if (policy.kind != PolicyKind::EuclideanRegularized) {
    fail(ErrorCode::InvalidArgument, "factor iterate with a manifold policy");
  }
  const double lambda = policy.lambda;
  const double rr = confinement_rho_euclidean(f);
  double amax = 0.0;
  double bmax = 0.0;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Entry& en = data.entry(e);
    const double pr = predict(f, en.row, en.col);
    const double r = en.value - pr;
    amax = std::max(amax, 8.0 * r * pr - 4.0 * lambda * rr);
    const double s = f.X.row(en.row).squaredNorm() + f.Y.row(en.col).squaredNorm();
    // ‖∇h‖² expanded; the cross term enters with a minus sign.
    const double g2 = 4.0 * (r * r * s - 4.0 * lambda * r * pr + lambda * lambda * rr);
    bmax = std::max(bmax, std::sqrt(std::max(0.0, g2)));
  }
  return {amax / policy.a, bmax / policy.b};
}

AdaptiveBounds adaptive_A_B_tilde(const ProductPoint& p, const StepPolicy& policy) {
  if (policy.kind == PolicyKind::EuclideanRegularized) {
    fail(ErrorCode::InvalidArgument, "manifold iterate with a Euclidean policy");
  }
  const double lambda = policy.lambda;
  const double xx = p.x.squaredNorm();
  const double xn = std::sqrt(xx);
  const double threshold = policy.kind == PolicyKind::ManifoldPositiveWeights
                               ? policy.alpha / (4.0 * lambda * (1.0 - lambda / policy.w0))
                               : policy.alpha / (4.0 * lambda);
  AdaptiveBounds out;
  out.A = xx >= threshold
              ? 0.0
              : (4.0 * (std::sqrt(policy.alpha) + xn) * xn + 4.0 * lambda * xx) / policy.a;
  out.B = std::sqrt(16.0 * static_cast<double>(p.k()) *
                    (2.0 * policy.alpha + (2.0 + lambda * lambda) * xx)) /
          policy.b;
  return out;
}

AdaptiveBounds adaptive_A_B_tilde(const FactorPair& f, const StepPolicy& policy) {
  if (policy.kind != PolicyKind::EuclideanRegularized) {
    fail(ErrorCode::InvalidArgument, "factor iterate with a manifold policy");
  }
  const double lambda = policy.lambda;
  const double r = confinement_rho_euclidean(f);
  const double q = std::sqrt(policy.alpha) + r / 2.0;
  AdaptiveBounds out;
  out.A = r >= policy.alpha / (2.0 * lambda) ? 0.0 : 4.0 / policy.a * (q * r + lambda * r);
  out.B = std::sqrt(8.0 * q * q * r + 8.0 * lambda * lambda * r) / policy.b;
  return out;
}

double phi_t(const StepPolicy& policy, double A, double B, std::int64_t t) {
  return std::max({A, B, policy.schedule(t) / policy.theta, policy.phi_min});
}

}  // namespace wlra
