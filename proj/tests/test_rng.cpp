#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <doctest.h>

#include "gmclab/parallel.hpp"
#include "gmclab/rng.hpp"

using namespace gmclab;

TEST_CASE("philox known-answer vectors") {
  // Reference outputs of Philox4x32-10 for the canonical test counters.
  const rng::Block zero = rng::philox4x32({0, 0, 0, 0}, 0);
  CHECK(zero.x0 == 0x6627e8d5u);
  CHECK(zero.x1 == 0xe169c58du);
  CHECK(zero.x2 == 0xbc57ac4cu);
  CHECK(zero.x3 == 0x9b00dbd8u);

  const rng::Block ones = rng::philox4x32(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
      0xffffffffffffffffULL);
  CHECK(ones.x0 == 0x408f276du);
  CHECK(ones.x1 == 0x41c83b0eu);
  CHECK(ones.x2 == 0xa20bc7c6u);
  CHECK(ones.x3 == 0x6d5451fdu);

  const rng::Block pi = rng::philox4x32(
      {0x243F6A88u, 0x85A308D3u, 0x13198A2Eu, 0x03707344u},
      0x299F31D0A4093822ULL);
  CHECK(pi.x0 == 0xd16cfe09u);
  CHECK(pi.x1 == 0x94fdccebu);
  CHECK(pi.x2 == 0x5001e420u);
  CHECK(pi.x3 == 0x24126ea1u);
}

TEST_CASE("uniform01 range, determinism and sensitivity") {
  std::set<double> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = rng::uniform01(42, rng::kStreamGeneric, i);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    seen.insert(u);
  }
  CHECK(seen.size() == 1000);  // no collisions in a small batch
  CHECK(rng::uniform01(42, 1, 7) == rng::uniform01(42, 1, 7));
  CHECK(rng::uniform01(42, 1, 7) != rng::uniform01(42, 2, 7));
  CHECK(rng::uniform01(42, 1, 7) != rng::uniform01(43, 1, 7));

  double sum = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += rng::uniform01(9, rng::kStreamGeneric, i);
  const double mean = sum / n;
  // 5 sigma band around 1/2, sigma = 1/sqrt(12 n)
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal_pair moments") {
  const int n = 40000;
  double s1 = 0.0, s2 = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    auto [a, b] = rng::normal_pair(123, rng::kStreamGeneric, i);
    s1 += a + b;
    s2 += a * a + b * b;
    cross += a * b;
  }
  CHECK(std::abs(s1 / (2 * n)) < 5.0 / std::sqrt(2.0 * n));
  CHECK(std::abs(s2 / (2 * n) - 1.0) < 5.0 * std::sqrt(2.0 / (2.0 * n)));
  CHECK(std::abs(cross / n) < 5.0 / std::sqrt(double(n)));
}

TEST_CASE("mode draws are keyed by the lattice point") {
  auto a = rng::mode_normal_pair(7, 3, -2);
  auto b = rng::mode_normal_pair(7, 3, -2);
  CHECK(a == b);
  CHECK(rng::mode_normal_pair(7, 3, -2) != rng::mode_normal_pair(7, 3, 2));
  CHECK(rng::mode_normal_pair(7, 3, 0) != rng::mode_normal_pair(7, 4, 0));
  CHECK(rng::mode_normal_pair(7, 3, 0) != rng::mode_normal_pair(8, 3, 0));
}

TEST_CASE("derive_seed fans out without collisions") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(rng::derive_seed(5, i));
  CHECK(seen.size() == 10000);
  CHECK(rng::derive_seed(5, 3) == rng::derive_seed(5, 3));
  CHECK(rng::derive_seed(5, 3) != rng::derive_seed(6, 3));
}

TEST_CASE("stream wrapper replays the keyed primitives") {
  rng::Stream s1(99, rng::kStreamGeneric);
  rng::Stream s2(99, rng::kStreamGeneric);
  for (int i = 0; i < 50; ++i) CHECK(s1.uniform() == s2.uniform());
  for (int i = 0; i < 51; ++i) CHECK(s1.normal() == s2.normal());
}

TEST_CASE("parallel_for is deterministic across thread counts") {
  const std::size_t n = 1000;
  std::vector<double> serial(n), threaded(n);
  const auto body = [](std::size_t i) {
    return rng::uniform01(1234, rng::kStreamGeneric, i);
  };
  parallel_for(n, 1, [&](std::size_t i) { serial[i] = body(i); });
  parallel_for(n, 4, [&](std::size_t i) { threaded[i] = body(i); });
  CHECK(serial == threaded);
  CHECK(default_threads() >= 1);
}
