#pragma once

#include <cstdint>
#include <limits>
#include <utility>

namespace rainbow {

/// Counter-based random stream keyed by (master seed, stream index).
///
/// The n-th output of stream s is a pure function of (master, s, n), so a
/// trial that draws from stream `trial_index` produces the same values no
/// matter which worker thread runs it or in which order trials execute.
/// The mixing function is the SplitMix64 finalizer.
class Stream {
public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t master, std::uint64_t index = 0) noexcept
      : key_(mix(mix(master) ^ (index * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    ++counter_;
    return mix(key_ + counter_ * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection,
  /// so results do not depend on the standard library implementation.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Child stream, e.g. one per sub-step of a trial.
  Stream split(std::uint64_t sub) const noexcept { return Stream(key_, sub + 1); }

  std::uint64_t draws() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by a Stream.
template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, Stream& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = rng.below(i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace rainbow
