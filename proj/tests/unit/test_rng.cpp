#include <doctest.h>

#include <cmath>
#include <set>

#include "wetting/rng.hpp"

using namespace wetting;

TEST_CASE("philox4x32-10 known answers") {
  using Block = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter streams are reproducible and distinct") {
  CounterRng a(42, 3, 7, 0);
  CounterRng b(42, 3, 7, 0);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());

  std::set<std::uint64_t> firsts;
  for (std::uint32_t site = 0; site < 4; ++site)
    for (std::uint32_t sweep = 0; sweep < 4; ++sweep)
      for (std::uint32_t chain = 0; chain < 4; ++chain)
        firsts.insert(CounterRng(42, site, sweep, chain)());
  CHECK(firsts.size() == 64);
  CHECK(CounterRng(42, 0, 0, 0)() != CounterRng(43, 0, 0, 0)());
}

TEST_CASE("uniform draws lie in the open unit interval with the right moments") {
  CounterRng rng(1, 0, 0, 0);
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.003);
}

TEST_CASE("splitmix64 mixes") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafull);
  CHECK(splitmix64(1) != splitmix64(2));
}
