#pragma once

// Counter-based random streams (Philox4x32-10) and the handful of variate
// transforms the samplers need. Every transform is written out here instead
// of using <random> distributions so that a (seed, stream) pair produces the
// same bits on every standard library.

#include <array>
#include <cstdint>
#include <limits>

namespace levylab {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// One application of the 10-round Philox4x32 bijection.
Philox4x32Counter philox4x32_10(Philox4x32Counter counter, Philox4x32Key key) noexcept;

/// Name recorded in configs and dump headers.
inline constexpr const char* kRngName = "philox4x32-10";

/// Purpose tags keep draws for different jobs in disjoint counter ranges.
enum class StreamPurpose : std::uint32_t {
  cell = 1,
  bootstrap = 2,
  generic = 3,
};

/// Identifies an independent stream: (seed, purpose, level code, replicate, index).
struct StreamId {
  std::uint64_t seed = 0;
  StreamPurpose purpose = StreamPurpose::generic;
  std::uint32_t level = 0;
  std::uint32_t replicate = 0;
  std::uint32_t index = 0;
};

/// Encodes per-axis dyadic levels (each < 32, at most 4 axes) into one word.
std::uint32_t level_code(const std::uint32_t* levels, std::size_t count) noexcept;

class CounterRng {
public:
  using result_type = std::uint32_t;

  explicit CounterRng(const StreamId& id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    return (hi << 32) | lo;
  }

  /// Uniform on the open interval (0,1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept;
  double exponential() noexcept;
  std::uint64_t poisson(double mean) noexcept;

  std::uint64_t draws() const noexcept { return draw_; }

private:
  void refill() noexcept;

  Philox4x32Key key_{};
  Philox4x32Counter base_{};
  std::uint32_t draw_ = 0;
  Philox4x32Counter block_{};
  int pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levylab
