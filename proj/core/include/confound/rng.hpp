#pragma once

#include <array>
#include <cstdint>

namespace confound {

/// Philox4x32-10 counter-based generator.
///
/// Every draw is a pure function of (key, counter), so any cell of any
/// realization can be generated independently and in any order.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(Key key) noexcept : key_(key) {}
  explicit constexpr Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter counter) const noexcept;

  const Key& key() const noexcept { return key_; }

 private:
  Key key_;
};

/// Stream tags keep latent draws and response draws in disjoint counter spaces.
enum class StreamTag : std::uint32_t {
  kLatent = 0x4c41544e,    // "LATN"
  kResponse = 0x52455350,  // "RESP"
  kFixture = 0x46495854,   // "FIXT"
};

/// Uniform doubles keyed by (seed, realization, stream, index).
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : engine_(seed) {}

  /// Two independent uniforms in [0, 1) with 53-bit resolution.
  std::array<double, 2> uniform_pair(std::uint32_t realization, StreamTag tag,
                                     std::uint64_t index) const noexcept;

  double uniform(std::uint32_t realization, StreamTag tag, std::uint64_t index) const noexcept {
    return uniform_pair(realization, tag, index)[0];
  }

 private:
  Philox4x32 engine_;
};

}  // namespace confound
