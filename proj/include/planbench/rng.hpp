#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

namespace planbench {

/// SplitMix64 (Steele, Lea & Flood). The output sequence depends only on the
/// seed, so generated episodes are identical across platforms and compilers.
/// Distribution helpers are implemented here rather than via <random>, whose
/// distributions are implementation-defined.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform integer in [lo, hi].
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

  template <class Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t x) {
  SplitMix64 g(x);
  return g.next();
}

/// Per-episode stream seed derived from (task number, user seed).
inline std::uint64_t episode_stream_seed(int task_num, std::uint64_t seed) {
  return mix64(seed ^ mix64(0xA24BAED4963EE407ULL + static_cast<std::uint64_t>(task_num)));
}

}  // namespace planbench
