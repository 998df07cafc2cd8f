#include "doctest.h"

#include <cmath>

#include "confound/rng.hpp"

using confound::CounterRng;
using confound::Philox4x32;
using confound::StreamTag;

// Known-answer vectors published with the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32(Philox4x32::Key{0, 0})(C{0, 0, 0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(Philox4x32::Key{0xffffffff, 0xffffffff})(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(Philox4x32::Key{0xa4093822, 0x299f31d0})(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms are pure functions of their key and counter") {
  const CounterRng a(42), b(42), c(43);
  CHECK(a.uniform(3, StreamTag::kResponse, 17) == b.uniform(3, StreamTag::kResponse, 17));
  CHECK(a.uniform(3, StreamTag::kResponse, 17) != c.uniform(3, StreamTag::kResponse, 17));
  CHECK(a.uniform(3, StreamTag::kResponse, 17) != a.uniform(4, StreamTag::kResponse, 17));
  CHECK(a.uniform(3, StreamTag::kResponse, 17) != a.uniform(3, StreamTag::kLatent, 17));
}

TEST_CASE("uniform moments") {
  const CounterRng rng(2024);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0, lo = 1.0, hi = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto u = rng.uniform_pair(0, StreamTag::kResponse, static_cast<std::uint64_t>(i));
    for (double v : u) {
      REQUIRE(v >= 0.0);
      REQUIRE(v < 1.0);
      sum += v;
      sum2 += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double mean = sum / (2.0 * n);
  const double var = sum2 / (2.0 * n) - mean * mean;
  // Standard error of the mean is sqrt(1/12 / 4e5) ~ 4.6e-4.
  CHECK(std::abs(mean - 0.5) < 5 * 4.6e-4);
  CHECK(std::abs(var - 1.0 / 12.0) < 1e-3);
  CHECK(lo < 1e-4);
  CHECK(hi > 1 - 1e-4);
}
