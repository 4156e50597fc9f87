#include "wlra/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace wlra {

namespace {

/// Monotonic clock that can be paused while trace records are evaluated.
class Stopwatch {
 public:
  Stopwatch() : start_(Clock::now()) {}
  void pause() { accumulated_ += Clock::now() - start_; }
  void resume() { start_ = Clock::now(); }
  double seconds() const { return std::chrono::duration<double>(accumulated_).count(); }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_;
  Clock::duration accumulated_{};
};

struct ManifoldFamily {
  using Point = ProductPoint;
  using Gradient = ProductTangent;
  static constexpr PolicyKind kind = PolicyKind::ManifoldRegularized;

  static Gradient stoch(const Point& p, const SampleIndex& s, const ProblemData& d,
                        const Regularization& r) {
    return stoch_grad_manifold(p, s, d, r);
  }
  static Gradient full(const Point& p, const ProblemData& d, const Regularization& r) {
    return full_grad_manifold(p, d, r);
  }
  static double objective(const Point& p, const ProblemData& d, const Regularization& r) {
    return cost_G(p, d, r);
  }
  static double rho(const Point& p) { return confinement_rho(p); }
  static Point step(const Point& p, const Gradient& v) {
    try {
      return retract(p, v);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      // Rounding may push a tangent off its space; re-project once and retry.
      return retract(p, tangent_project(p, v));
    }
  }
  static double norm(const Gradient& g) { return g.norm(); }
};

struct PositiveWeightsFamily : ManifoldFamily {
  static constexpr PolicyKind kind = PolicyKind::ManifoldPositiveWeights;

  static Gradient stoch(const Point& p, const SampleIndex& s, const ProblemData& d,
                        const Regularization& r) {
    return stoch_grad_pw(p, s, d, r);
  }
  static Gradient full(const Point& p, const ProblemData& d, const Regularization&) {
    return full_grad_pw(p, d);
  }
  static double objective(const Point& p, const ProblemData& d, const Regularization&) {
    return cost_unregularized(p, d);
  }
};

struct EuclideanFamily {
  using Point = FactorPair;
  using Gradient = FactorGradient;
  static constexpr PolicyKind kind = PolicyKind::EuclideanRegularized;

  static Gradient stoch(const Point& f, const SampleIndex& s, const ProblemData& d,
                        const Regularization& r) {
    return stoch_grad_euclidean(f, s, d, r);
  }
  static Gradient full(const Point& f, const ProblemData& d, const Regularization& r) {
    return full_grad_euclidean(f, d, r);
  }
  static double objective(const Point& f, const ProblemData& d, const Regularization& r) {
    return cost_H(f, d, r);
  }
  static double rho(const Point& f) { return confinement_rho_euclidean(f); }
  static Point step(const Point& f, const Gradient& v) { return retract(f, v); }
  static double norm(const Gradient& g) { return std::sqrt(g.squared_norm()); }
};

void notify(const SolverConfig& c, std::int64_t t, const ProductPoint& p) {
  if (c.on_point) c.on_point(t, p);
}
void notify(const SolverConfig& c, std::int64_t t, const FactorPair& f) {
  if (c.on_factors) c.on_factors(t, f);
}
void notify(const AlsConfig& c, std::int64_t t, const ProductPoint& p, double v) {
  if (c.on_point) c.on_point(t, p, v);
}
void notify(const AlsConfig& c, std::int64_t t, const FactorPair& f, double v) {
  if (c.on_factors) c.on_factors(t, f, v);
}

void check_trace_every(std::int64_t every) {
  if (every < 1) {
    std::ostringstream os;
    os << "trace_every must be >= 1, got " << every;
    fail(ErrorCode::InvalidArgument, os.str());
  }
}

template <class Family>
SolverResult<typename Family::Point> run_sgd(const typename Family::Point& init,
                                             const ProblemData& data, const SolverConfig& cfg) {
  using Point = typename Family::Point;
  cfg.budget.validate();
  check_trace_every(cfg.trace_every);
  const StepPolicy& policy = cfg.policy;
  if (policy.kind != Family::kind) {
    std::ostringstream os;
    os << "solver expects a " << to_string(Family::kind) << " policy, got "
       << to_string(policy.kind);
    fail(ErrorCode::InvalidArgument, os.str());
  }
  check_shapes(init, data);
  const Regularization reg(policy.lambda);
  if (Family::kind == PolicyKind::ManifoldPositiveWeights) {
    require_positive_weights(data, policy.lambda);
  }
  const double rho_init = Family::rho(init);
  if (rho_init > policy.rho0) {
    std::ostringstream os;
    os << "initial rho " << rho_init << " exceeds rho0 " << policy.rho0;
    fail(ErrorCode::InitNotConfined, os.str());
  }

  Rng rng(cfg.seed);
  Point p = init;
  SolverResult<Point> out{init, {}, 0};
  Stopwatch clock;
  std::optional<double> last_phi;

  auto record = [&](std::int64_t t) {
    clock.pause();
    TraceRecord r;
    r.t = t;
    r.elapsed_seconds = clock.seconds();
    r.cost_unregularized = cost_unregularized(p, data);
    r.objective = Family::objective(p, data, reg);
    r.phi_t = last_phi;
    if (cfg.record_grad_norm) r.grad_norm = Family::norm(Family::full(p, data, reg));
    out.trace.records.push_back(r);
    clock.resume();
    return r.elapsed_seconds;
  };

  std::int64_t t = 0;
  notify(cfg, 0, p);
  double elapsed = record(0);
  while (true) {
    if (cfg.budget.max_iterations && t >= *cfg.budget.max_iterations) break;
    if (cfg.budget.max_seconds && t % cfg.trace_every == 0 && elapsed > *cfg.budget.max_seconds) {
      break;
    }
    const SampleIndex s = data.sample(rng);
    auto g = Family::stoch(p, s, data, reg);
    double phi = policy.phi_min;
    if (cfg.phi_mode != PhiMode::Constant) {
      const AdaptiveBounds ab = cfg.phi_mode == PhiMode::Exact
                                    ? adaptive_A_B(p, data, policy)
                                    : adaptive_A_B_tilde(p, policy);
      phi = phi_t(policy, ab.A, ab.B, t);
    }
    last_phi = phi;
    p = Family::step(p, (-policy.schedule(t) / phi) * std::move(g));
    ++t;
    notify(cfg, t, p);
    const bool last = cfg.budget.max_iterations && t == *cfg.budget.max_iterations;
    if (t % cfg.trace_every == 0 || last) elapsed = record(t);
  }
  out.final_point = std::move(p);
  out.iterations = t;
  return out;
}

template <class Family, class Objective, class Gradient>
SolverResult<typename Family::Point> run_als(const typename Family::Point& init,
                                             const ProblemData& data, const AlsConfig& cfg,
                                             const Objective& objective,
                                             const Gradient& gradient) {
  using Point = typename Family::Point;
  cfg.budget.validate();
  cfg.armijo.validate();
  check_trace_every(cfg.trace_every);
  check_shapes(init, data);

  Point p = init;
  SolverResult<Point> out{init, {}, 0};
  Stopwatch clock;
  double value = objective(p);
  std::int64_t t = 0;
  double elapsed = 0.0;
  notify(cfg, 0, p, value);
  while (true) {
    auto g = gradient(p);
    const double gnorm = Family::norm(g);
    const bool last = cfg.budget.max_iterations && t == *cfg.budget.max_iterations;
    if (t % cfg.trace_every == 0 || last) {
      clock.pause();
      TraceRecord r;
      r.t = t;
      r.elapsed_seconds = elapsed = clock.seconds();
      r.cost_unregularized = cost_unregularized(p, data);
      r.objective = value;
      r.grad_norm = gnorm;
      out.trace.records.push_back(r);
      clock.resume();
    }
    if (last) break;
    if (cfg.budget.max_seconds && t % cfg.trace_every == 0 && elapsed > *cfg.budget.max_seconds) {
      break;
    }
    // A step whose predicted decrease ᾱ‖g‖² cannot be resolved in the
    // objective's floating-point value is treated like a zero gradient.
    const double resolution = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(value);
    const bool stationary =
        gnorm == 0.0 || value <= 0.0 || cfg.armijo.alpha_bar * gnorm * gnorm <= resolution;
    if (!stationary) {
      const auto eta = -1.0 * std::move(g);
      const ArmijoResult a = armijo_search(
          [&](double tau) { return objective(Family::step(p, tau * eta)); }, value,
          -gnorm * gnorm, cfg.armijo);
      p = Family::step(p, a.tau * eta);
      value = a.value;
    }
    ++t;
    notify(cfg, t, p, value);
  }
  out.final_point = std::move(p);
  out.iterations = t;
  return out;
}

}  // namespace

Budget Budget::iterations(std::int64_t n) {
  Budget b;
  b.max_iterations = n;
  b.validate();
  return b;
}

Budget Budget::seconds(double s) {
  Budget b;
  b.max_seconds = s;
  b.validate();
  return b;
}

void Budget::validate() const {
  if (max_iterations.has_value() == max_seconds.has_value()) {
    fail(ErrorCode::InvalidArgument, "exactly one of max_iterations and max_seconds must be set");
  }
  if (max_iterations && *max_iterations < 0) {
    fail(ErrorCode::InvalidArgument, "max_iterations must be >= 0");
  }
  if (max_seconds && !(*max_seconds >= 0.0)) {
    fail(ErrorCode::InvalidArgument, "max_seconds must be >= 0");
  }
}

void ArmijoParams::validate() const {
  if (!(alpha_bar > 0.0) || !std::isfinite(alpha_bar)) {
    fail(ErrorCode::InvalidArgument, "alpha_bar must be positive");
  }
  if (!(beta > 0.0 && beta < 1.0)) fail(ErrorCode::InvalidArgument, "beta must lie in (0, 1)");
  if (!(iota > 0.0 && iota < 1.0)) fail(ErrorCode::InvalidArgument, "iota must lie in (0, 1)");
  if (max_backtracks < 1) fail(ErrorCode::InvalidArgument, "max_backtracks must be >= 1");
}

ArmijoResult armijo_search(const std::function<double(double)>& cost_at, double fx, double slope,
                           const ArmijoParams& params) {
  params.validate();
  double tau = params.alpha_bar;
  for (int m = 0; m < params.max_backtracks; ++m) {
    const double v = cost_at(tau);
    if (fx - v >= -params.iota * tau * slope) return {tau, m, v};
    tau *= params.beta;
  }
  std::ostringstream os;
  os << "no Armijo point after " << params.max_backtracks
     << " backtracks (directional derivative " << slope << ")";
  fail(ErrorCode::BacktrackLimit, os.str());
}

FactorPair retract(const FactorPair& f, const FactorGradient& step) {
  if (f.X.rows() != step.dX.rows() || f.X.cols() != step.dX.cols() ||
      f.Y.rows() != step.dY.rows() || f.Y.cols() != step.dY.cols()) {
    fail(ErrorCode::ShapeMismatch, "factor step does not match the factors");
  }
  return {f.X + step.dX, f.Y + step.dY};
}

FactorGradient operator*(double s, FactorGradient g) {
  g.dX *= s;
  g.dY *= s;
  return g;
}

double inner(const FactorGradient& a, const FactorGradient& b) {
  return (a.dX.array() * b.dX.array()).sum() + (a.dY.array() * b.dY.array()).sum();
}

SolverResult<ProductPoint> sgd_manifold(const ProductPoint& init, const ProblemData& data,
                                        const SolverConfig& config) {
  return run_sgd<ManifoldFamily>(init, data, config);
}

SolverResult<FactorPair> sgd_euclidean(const FactorPair& init, const ProblemData& data,
                                       const SolverConfig& config) {
  return run_sgd<EuclideanFamily>(init, data, config);
}

SolverResult<ProductPoint> sgd_pw(const ProductPoint& init, const ProblemData& data,
                                  const SolverConfig& config) {
  return run_sgd<PositiveWeightsFamily>(init, data, config);
}

SolverResult<ProductPoint> als_manifold(const ProductPoint& init, const ProblemData& data,
                                        const Regularization& reg, const AlsConfig& config) {
  return run_als<ManifoldFamily>(
      init, data, config, [&](const ProductPoint& p) { return cost_G(p, data, reg); },
      [&](const ProductPoint& p) { return full_grad_manifold(p, data, reg); });
}

SolverResult<FactorPair> als_euclidean(const FactorPair& init, const ProblemData& data,
                                       const Regularization& reg, const AlsConfig& config) {
  return run_als<EuclideanFamily>(
      init, data, config, [&](const FactorPair& f) { return cost_H(f, data, reg); },
      [&](const FactorPair& f) { return full_grad_euclidean(f, data, reg); });
}

SolverResult<ProductPoint> als_pw(const ProductPoint& init, const ProblemData& data,
                                  const AlsConfig& config) {
  if (!data.positive_everywhere()) {
    fail(ErrorCode::NonPositiveWeight,
         "positive-weights line search needs every cell observed with a weight > 0");
  }
  return run_als<PositiveWeightsFamily>(
      init, data, config, [&](const ProductPoint& p) { return cost_unregularized(p, data); },
      [&](const ProductPoint& p) { return full_grad_pw(p, data); });
}

}  // namespace wlra
