#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wlra/problem.hpp"

namespace wlra {

struct LoadOptions {
  bool one_based = false;          ///< shift 1-based indices down by one
  std::optional<Index> rows;       ///< override m (default: max row + 1)
  std::optional<Index> cols;       ///< override n (default: max col + 1)
};

/// Reads "row,col,value" lines after a single "row,col,value" header.
/// Throws ParseError (with the line number), DuplicateEntry, IndexOutOfBounds.
Observations parse_triplets(std::istream& in, const LoadOptions& options = {},
                            const std::string& source = "<stream>");
Observations load_triplets(const std::string& path, const LoadOptions& options = {});

/// Writes 0-based triplets with the standard header; values round-trip exactly.
void write_triplets(const Observations& obs, std::ostream& out);
void write_triplets(const Observations& obs, const std::string& path);

/// Keeps `rows` rows and `cols` columns chosen uniformly without replacement,
/// re-indexed densely in their original order. Throws InvalidDimensions.
Observations sample_submatrix(const Observations& obs, Index rows, Index cols,
                              std::uint64_t seed);

/// 1/|Δ| on every observed cell; the last weight absorbs rounding so the
/// running sum is 1.
std::vector<double> build_binary_weights(const Observations& obs);

/// Scales non-negative weights to sum to 1. Throws InvalidWeights.
std::vector<double> normalize_weights(std::vector<double> weights);

struct SyntheticSpec {
  Index m = 50;
  Index n = 20;
  Index rank = 3;
  double noise = 0.0;         ///< standard deviation of additive Gaussian noise
  double observe_prob = 0.4;  ///< Bernoulli mask probability
  std::uint64_t seed = 0;
};

/// Low-rank truth U*V*ᵀ/√r with standard Gaussian factors, plus noise, seen
/// through a Bernoulli mask.
Observations synthetic_instance(const SyntheticSpec& spec);

/// Standard normal draw (Box–Muller on uniform01).
double gaussian(Rng& rng);

/// Order-sensitive hash of dimensions, indices and value bits.
std::uint64_t fingerprint(const Observations& obs);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);

}  // namespace wlra
