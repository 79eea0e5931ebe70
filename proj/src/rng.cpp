#include "gmclab/rng.hpp"

#include <cmath>
#include <numbers>

namespace gmclab::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline Block round_once(Block c, std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kMul0, c.x0, hi0, lo0);
  mulhilo(kMul1, c.x2, hi1, lo1);
  return Block{hi1 ^ c.x1 ^ k0, lo1, hi0 ^ c.x3 ^ k1, lo0};
}

inline std::uint64_t join64(std::uint32_t lo, std::uint32_t hi) {
  return static_cast<std::uint64_t>(hi) << 32 | lo;
}

// 53-bit mantissa in [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1p-53;
}

// (0, 1]: safe as a log argument.
inline double to_unit_positive(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1p-53;
}

inline Block block_at(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index) {
  Block ctr{static_cast<std::uint32_t>(index),
            static_cast<std::uint32_t>(index >> 32),
            static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32)};
  return philox4x32(ctr, seed);
}

inline std::pair<double, double> box_muller(Block b) {
  double u1 = to_unit_positive(join64(b.x0, b.x1));
  double u2 = to_unit(join64(b.x2, b.x3));
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace

Block philox4x32(Block counter, std::uint64_t key) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  Block c = round_once(counter, k0, k1);
  for (int r = 1; r < 10; ++r) {
    k0 += kWeyl0;
    k1 += kWeyl1;
    c = round_once(c, k0, k1);
  }
  return c;
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  Block b = block_at(seed, stream, index);
  return to_unit(join64(b.x0, b.x1));
}

std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t index) {
  return box_muller(block_at(seed, stream, index));
}

std::pair<double, double> mode_normal_pair(std::uint64_t seed, std::int32_t k1,
                                           std::int32_t k2) {
  Block ctr{static_cast<std::uint32_t>(k1), static_cast<std::uint32_t>(k2),
            static_cast<std::uint32_t>(kStreamFieldModes), 0};
  return box_muller(philox4x32(ctr, seed));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  Block b = block_at(master, kStreamSeedDerive, index);
  return join64(b.x0, b.x1);
}

}  // namespace gmclab::rng
