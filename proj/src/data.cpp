#include "wlra/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wlra {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& why) {
  std::ostringstream os;
  os << source << ":" << line << ": " << why;
  fail(ErrorCode::ParseError, os.str());
}

template <class T>
T parse_field(std::string_view field, const std::string& source, std::size_t line,
              const char* name) {
  field = trim(field);
  T v{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last) {
    parse_fail(source, line, std::string("bad ") + name + " '" + std::string(field) + "'");
  }
  return v;
}

Index uniform_below(Rng& rng, Index n) {
  Index i = static_cast<Index>(uniform01(rng) * static_cast<double>(n));
  return std::min(i, n - 1);
}

/// Uniform subset of {0..n-1} of the given size, sorted.
std::vector<Index> choose(Rng& rng, Index n, Index size) {
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < size; ++i) {
    const Index j = i + uniform_below(rng, n - i);
    std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
  }
  all.resize(static_cast<std::size_t>(size));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

Observations parse_triplets(std::istream& in, const LoadOptions& options,
                            const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<Entry> entries;
  Index max_row = -1, max_col = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    if (!header) {
      if (s != "row,col,value") {
        parse_fail(source, lineno, "expected header 'row,col,value', got '" + std::string(s) + "'");
      }
      header = true;
      continue;
    }
    const auto c1 = s.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : s.find(',', c1 + 1);
    if (c2 == std::string_view::npos || s.find(',', c2 + 1) != std::string_view::npos) {
      parse_fail(source, lineno, "expected three comma-separated fields");
    }
    long long r = parse_field<long long>(s.substr(0, c1), source, lineno, "row");
    long long c = parse_field<long long>(s.substr(c1 + 1, c2 - c1 - 1), source, lineno, "col");
    const double v = parse_field<double>(s.substr(c2 + 1), source, lineno, "value");
    if (!std::isfinite(v)) parse_fail(source, lineno, "value is not finite");
    if (options.one_based) --r, --c;
    if (r < 0 || c < 0) {
      std::ostringstream os;
      os << source << ":" << lineno << ": negative index after "
         << (options.one_based ? "1-based" : "0-based") << " adjustment";
      fail(ErrorCode::IndexOutOfBounds, os.str());
    }
    entries.push_back({static_cast<Index>(r), static_cast<Index>(c), v});
    max_row = std::max<Index>(max_row, r);
    max_col = std::max<Index>(max_col, c);
  }
  if (!header) parse_fail(source, lineno, "missing header 'row,col,value'");
  const Index m = options.rows.value_or(max_row + 1);
  const Index n = options.cols.value_or(max_col + 1);
  if (m <= 0 || n <= 0) {
    fail(ErrorCode::InvalidDimensions,
         source + ": cannot infer dimensions from a file with no entries");
  }
  return Observations(m, n, std::move(entries));
}

Observations load_triplets(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "': " + std::strerror(errno));
  return parse_triplets(in, options, path);
}

void write_triplets(const Observations& obs, std::ostream& out) {
  out << "row,col,value\n";
  for (const Entry& e : obs.entries()) {
    out << e.row << ',' << e.col << ',' << format_double(e.value) << '\n';
  }
}

void write_triplets(const Observations& obs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "': " + std::strerror(errno));
  write_triplets(obs, out);
  out.flush();
  if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

Observations sample_submatrix(const Observations& obs, Index rows, Index cols,
                              std::uint64_t seed) {
  if (rows < 1 || cols < 1 || rows > obs.rows() || cols > obs.cols()) {
    std::ostringstream os;
    os << "cannot sample " << rows << "x" << cols << " from " << obs.rows() << "x"
       << obs.cols();
    fail(ErrorCode::InvalidDimensions, os.str());
  }
  Rng rng(seed);
  const std::vector<Index> rsel = choose(rng, obs.rows(), rows);
  const std::vector<Index> csel = choose(rng, obs.cols(), cols);
  std::vector<Index> rmap(static_cast<std::size_t>(obs.rows()), -1);
  std::vector<Index> cmap(static_cast<std::size_t>(obs.cols()), -1);
  for (std::size_t i = 0; i < rsel.size(); ++i) rmap[static_cast<std::size_t>(rsel[i])] = i;
  for (std::size_t j = 0; j < csel.size(); ++j) cmap[static_cast<std::size_t>(csel[j])] = j;
  std::vector<Entry> kept;
  for (const Entry& e : obs.entries()) {
    const Index r = rmap[static_cast<std::size_t>(e.row)];
    const Index c = cmap[static_cast<std::size_t>(e.col)];
    if (r >= 0 && c >= 0) kept.push_back({r, c, e.value});
  }
  return Observations(rows, cols, std::move(kept));
}

std::vector<double> build_binary_weights(const Observations& obs) {
  const std::size_t n = obs.size();
  if (n == 0) fail(ErrorCode::EmptySupport, "binary weights need at least one observation");
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double head = 0.0;
  for (std::size_t e = 0; e + 1 < n; ++e) head += w[e];
  w[n - 1] = 1.0 - head;
  return w;
}

std::vector<double> normalize_weights(std::vector<double> weights) {
  double total = 0.0;
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::InvalidWeights, "negative weight");
    total += v;
  }
  if (!(total > 0.0)) fail(ErrorCode::InvalidWeights, "weights have no positive mass");
  for (double& v : weights) v /= total;
  if (!weights.empty()) {
    double head = 0.0;
    for (std::size_t e = 0; e + 1 < weights.size(); ++e) head += weights[e];
    weights.back() = 1.0 - head;
  }
  return weights;
}

double gaussian(Rng& rng) {
  // 1 − u keeps the logarithm's argument in (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Observations synthetic_instance(const SyntheticSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.rank < 1 || spec.rank > std::min(spec.m, spec.n)) {
    fail(ErrorCode::InvalidDimensions, "synthetic instance needs 1 <= rank <= min(m, n)");
  }
  if (!(spec.observe_prob > 0.0 && spec.observe_prob <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "observe probability must lie in (0, 1]");
  }
  if (!(spec.noise >= 0.0)) fail(ErrorCode::InvalidArgument, "noise must be >= 0");
  Rng rng(spec.seed);
  Matrix Us(spec.m, spec.rank), Vs(spec.n, spec.rank);
  for (Index i = 0; i < Us.size(); ++i) Us.data()[i] = gaussian(rng);
  for (Index i = 0; i < Vs.size(); ++i) Vs.data()[i] = gaussian(rng);
  const Matrix truth = Us * Vs.transpose() / std::sqrt(static_cast<double>(spec.rank));
  std::vector<Entry> entries;
  for (Index i = 0; i < spec.m; ++i) {
    for (Index j = 0; j < spec.n; ++j) {
      const double noise = spec.noise * gaussian(rng);
      if (uniform01(rng) < spec.observe_prob) entries.push_back({i, j, truth(i, j) + noise});
    }
  }
  return Observations(spec.m, spec.n, std::move(entries));
}

std::uint64_t fingerprint(const Observations& obs) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(static_cast<std::uint64_t>(obs.rows()));
  mix(static_cast<std::uint64_t>(obs.cols()));
  for (const Entry& e : obs.entries()) {
    std::uint64_t bits;
    std::memcpy(&bits, &e.value, sizeof bits);
    mix(static_cast<std::uint64_t>(e.row));
    mix(static_cast<std::uint64_t>(e.col));
    mix(bits);
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace wlra
