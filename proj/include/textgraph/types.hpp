#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace textgraph {

using Index = Eigen::Index;

// Row-major storage throughout: dense buffers serialize as contiguous rows
// and the sparse layout is plain CSR.
template <typename Scalar>
using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using Sparse = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

using DenseX = Dense<double>;
using VectorX = Vector<double>;
using SparseX = Sparse<double>;
using Triplet = Eigen::Triplet<double>;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seeded random stream. Identical seed -> identical stream on every
/// platform (mt19937_64 is fully specified; float conversion is done by
/// hand rather than through implementation-defined std distributions).
///
/// Named substreams derive as substream_seed = splitmix64(seed ^ fnv1a64(name)),
/// so e.g. the "graph", "model" and "sampler" streams of one experiment seed
/// never overlap.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  RandomSource substream(std::string_view name) const {
    return RandomSource(splitmix64(seed_ ^ fnv1a64(name)));
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Fisher-Yates; std::shuffle is implementation-defined, this is not.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(uniform_index(i))]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace textgraph
