#pragma once

#include <cstdint>
#include <limits>

namespace dks {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based draw: the index-th output of the SplitMix64 stream keyed by
/// seed. Independent of evaluation order, so per-edge sampling can run in any
/// order or in parallel and still produce the same matrix.
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed) + (index + 1) * kGoldenGamma);
}

/// Maps 64 random bits to the open interval (0, 1) with 53-bit resolution.
constexpr double bits_to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  return bits_to_open_unit(counter_bits(seed, index));
}

/// Seed splitting rule for trials: trial_seed = mix64(base ^ mix64(index + gamma)).
constexpr std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return mix64(base_seed ^ mix64(index + kGoldenGamma));
}

/// Sequential SplitMix64 engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(mix64(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  double uniform() noexcept { return bits_to_open_unit((*this)()); }

  /// Uniform integer in [0, bound) by multiply-shift (bound > 0).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace dks
