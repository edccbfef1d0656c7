#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace detproc {

/// Counter-based random stream.
///
/// The n-th output is a pure function of (key, n), so a stream can be
/// split into independent children without touching shared state. Every
/// sampler takes a stream by reference and advances only that stream.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : key_(mix(seed ^ kSeedSalt)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * kGolden;
    return mix(z);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe for logarithms and negative powers.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Child stream number `index`. Children of distinct indices are
  /// independent of each other and of the parent's own outputs.
  RandomStream split(std::uint64_t index) const {
    RandomStream child;
    child.key_ = mix(key_ ^ mix(index + kSplitSalt));
    return child;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  RandomStream() = default;

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x243F6A8885A308D3ULL;
  static constexpr std::uint64_t kSplitSalt = 0x632BE59BD9B4E019ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace detproc
