#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wlra/stiefel.hpp"

namespace wlra {

using Index = Eigen::Index;
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw. Unlike
/// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Entry {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

/// Sparse observed entries of an m×n matrix. The constructor sorts entries
/// row-major and rejects duplicates and out-of-range indices.
class Observations {
 public:
  Observations() = default;
  Observations(Index m, Index n, std::vector<Entry> entries);

  Index rows() const noexcept { return m_; }
  Index cols() const noexcept { return n_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry& operator[](std::size_t e) const { return entries_[e]; }

  /// Index of (i, j) in entries(), or -1 when unobserved.
  std::ptrdiff_t find(Index i, Index j) const;

 private:
  Index m_ = 0;
  Index n_ = 0;
  std::vector<Entry> entries_;
};

bool operator==(const Observations& a, const Observations& b);

struct SampleIndex {
  Index row = 0;
  Index col = 0;
  std::size_t entry = 0;  ///< position in Observations::entries()
};

/// Walker alias table over a discrete distribution. O(1) per draw, two RNG
/// draws each.
class AliasSampler {
 public:
  AliasSampler() = default;
  explicit AliasSampler(const std::vector<double>& probabilities);

  std::size_t draw(Rng& rng) const;

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Observations plus weights on the same support and the rank cap k.
/// Weights are non-negative and sum to 1 within 1e-12. Immutable.
class ProblemData {
 public:
  ProblemData(Observations obs, std::vector<double> weights, Index k);

  Index m() const noexcept { return obs_.rows(); }
  Index n() const noexcept { return obs_.cols(); }
  Index k() const noexcept { return k_; }
  std::size_t size() const noexcept { return obs_.size(); }

  const Observations& observations() const noexcept { return obs_; }
  const Entry& entry(std::size_t e) const { return obs_[e]; }
  double weight(std::size_t e) const { return w_[e]; }
  double inverse_weight(std::size_t e) const { return inv_w_[e]; }
  const std::vector<double>& weights() const noexcept { return w_; }

  /// Smallest weight over the support (w₀ for the positive-weights family).
  double min_weight() const noexcept { return w_min_; }
  /// True when every one of the m·n cells is observed with positive weight.
  bool positive_everywhere() const noexcept;

  /// Draws (η, γ) with probability w_{η,γ}.
  SampleIndex sample(Rng& rng) const;

 private:
  Observations obs_;
  std::vector<double> w_;
  std::vector<double> inv_w_;
  double w_min_ = 0.0;
  Index k_ = 0;
  AliasSampler sampler_;
};

inline SampleIndex sample_index(const ProblemData& data, Rng& rng) {
  return data.sample(rng);
}

struct Regularization {
  explicit Regularization(double lambda);
  double lambda;
};

/// Throws NonPositiveWeight unless every cell carries a positive weight, and
/// LambdaOutOfRange unless 0 < λ < w₀.
void require_positive_weights(const ProblemData& data, double lambda);

struct FactorPair {
  Matrix X;
  Matrix Y;
};

}  // namespace wlra
