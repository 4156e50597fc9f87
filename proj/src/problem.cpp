#include "wlra/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace wlra {

Observations::Observations(Index m, Index n, std::vector<Entry> entries)
    : m_(m), n_(n), entries_(std::move(entries)) {
  if (m <= 0 || n <= 0) {
    std::ostringstream os;
    os << "matrix dimensions must be positive, got " << m << "x" << n;
    fail(ErrorCode::InvalidDimensions, os.str());
  }
  for (const Entry& e : entries_) {
    if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= n) {
      std::ostringstream os;
      os << "entry (" << e.row << "," << e.col << ") outside " << m << "x" << n;
      fail(ErrorCode::IndexOutOfBounds, os.str());
    }
    if (!std::isfinite(e.value)) {
      std::ostringstream os;
      os << "entry (" << e.row << "," << e.col << ") is not finite";
      fail(ErrorCode::InvalidArgument, os.str());
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t e = 1; e < entries_.size(); ++e) {
    if (entries_[e].row == entries_[e - 1].row && entries_[e].col == entries_[e - 1].col) {
      std::ostringstream os;
      os << "entry (" << entries_[e].row << "," << entries_[e].col << ") appears twice";
      fail(ErrorCode::DuplicateEntry, os.str());
    }
  }
}

std::ptrdiff_t Observations::find(Index i, Index j) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{i, j, 0.0},
                             [](const Entry& a, const Entry& b) {
                               return a.row != b.row ? a.row < b.row : a.col < b.col;
                             });
  if (it == entries_.end() || it->row != i || it->col != j) return -1;
  return it - entries_.begin();
}

bool operator==(const Observations& a, const Observations& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() != b.size()) return false;
  for (std::size_t e = 0; e < a.size(); ++e) {
    if (a[e].row != b[e].row || a[e].col != b[e].col || a[e].value != b[e].value) return false;
  }
  return true;
}

AliasSampler::AliasSampler(const std::vector<double>& probabilities) {
  const std::size_t n = probabilities.size();
  if (n == 0) fail(ErrorCode::EmptySupport, "alias table over an empty distribution");
  double total = 0.0;
  for (double p : probabilities) total += p;
  if (!(total > 0.0)) fail(ErrorCode::InvalidWeights, "distribution has no positive mass");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probabilities[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to rounding.
  for (std::size_t i : large) prob_[i] = 1.0, alias_[i] = i;
  for (std::size_t i : small) {
    // A zero-mass cell can only end up here through rounding; never select it.
    if (probabilities[i] > 0.0) {
      prob_[i] = 1.0, alias_[i] = i;
    } else {
      prob_[i] = 0.0;
      alias_[i] = static_cast<std::size_t>(
          std::max_element(probabilities.begin(), probabilities.end()) - probabilities.begin());
    }
  }
}

std::size_t AliasSampler::draw(Rng& rng) const {
  const std::size_t n = prob_.size();
  std::size_t i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  if (i >= n) i = n - 1;
  return uniform01(rng) < prob_[i] ? i : alias_[i];
}

ProblemData::ProblemData(Observations obs, std::vector<double> weights, Index k)
    : obs_(std::move(obs)), w_(std::move(weights)), k_(k) {
  if (obs_.size() == 0) fail(ErrorCode::EmptySupport, "no observed entries");
  if (w_.size() != obs_.size()) {
    std::ostringstream os;
    os << w_.size() << " weights for " << obs_.size() << " observed entries";
    fail(ErrorCode::ShapeMismatch, os.str());
  }
  if (k <= 0 || k > std::min(obs_.rows(), obs_.cols())) {
    std::ostringstream os;
    os << "rank cap k=" << k << " must satisfy 1 <= k <= min(m, n) = "
       << std::min(obs_.rows(), obs_.cols());
    fail(ErrorCode::InvalidDimensions, os.str());
  }
  double total = 0.0;
  w_min_ = std::numeric_limits<double>::infinity();
  inv_w_.resize(w_.size());
  for (std::size_t e = 0; e < w_.size(); ++e) {
    if (!(w_[e] >= 0.0) || !std::isfinite(w_[e])) {
      std::ostringstream os;
      os << "weight at (" << obs_[e].row << "," << obs_[e].col << ") is " << w_[e];
      fail(ErrorCode::InvalidWeights, os.str());
    }
    total += w_[e];
    w_min_ = std::min(w_min_, w_[e]);
    inv_w_[e] = w_[e] > 0.0 ? 1.0 / w_[e] : 0.0;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "weights sum to " << total << ", expected 1";
    fail(ErrorCode::InvalidWeights, os.str());
  }
  sampler_ = AliasSampler(w_);
}

bool ProblemData::positive_everywhere() const noexcept {
  return static_cast<Index>(obs_.size()) == m() * n() && w_min_ > 0.0;
}

SampleIndex ProblemData::sample(Rng& rng) const {
  const std::size_t e = sampler_.draw(rng);
  return {obs_[e].row, obs_[e].col, e};
}

Regularization::Regularization(double l) : lambda(l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    std::ostringstream os;
    os << "lambda must be positive and finite, got " << l;
    fail(ErrorCode::LambdaOutOfRange, os.str());
  }
}

void require_positive_weights(const ProblemData& data, double lambda) {
  if (!data.positive_everywhere()) {
    fail(ErrorCode::NonPositiveWeight,
         "positive-weights mode needs every cell observed with a weight > 0");
  }
  if (!(lambda > 0.0) || !(lambda < data.min_weight())) {
    std::ostringstream os;
    os << "positive-weights mode needs 0 < lambda < w0 = " << data.min_weight()
       << ", got " << lambda;
    fail(ErrorCode::LambdaOutOfRange, os.str());
  }
}

}  // namespace wlra
