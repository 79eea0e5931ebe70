#pragma once

#include <cstdint>
#include <utility>

namespace gmclab::rng {

// Counter-based randomness: every draw is a pure function of
// (seed, stream, index), so any consumer gets identical numbers no matter
// how work is split across threads or in what order draws happen.

struct Block {
  std::uint32_t x0, x1, x2, x3;
};

// Philox4x32 with 10 rounds.
Block philox4x32(Block counter, std::uint64_t key);

// Stream tags keep independent consumers on disjoint counter spaces.
inline constexpr std::uint64_t kStreamFieldModes = 1;
inline constexpr std::uint64_t kStreamScalingZ = 2;
inline constexpr std::uint64_t kStreamBootstrap = 3;
inline constexpr std::uint64_t kStreamSeedDerive = 4;
inline constexpr std::uint64_t kStreamGeneric = 5;
inline constexpr std::uint64_t kStreamSynthetic = 6;

// Uniform draw in [0, 1) with 53 random bits.
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

// Two independent standard normals per index (Box-Muller on one block).
std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t index);

// Per-frequency draw for spectral synthesis, keyed directly by the lattice
// point so the same (seed, k) pair yields the same coefficient at every
// cutoff and grid size.
std::pair<double, double> mode_normal_pair(std::uint64_t seed, std::int32_t k1,
                                           std::int32_t k2);

// Child seed for realization `index` of an experiment with the given master
// seed. Distinct indices give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Sequential convenience wrapper over the keyed primitives.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double uniform() { return uniform01(seed_, stream_, next_++); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    auto [z0, z1] = normal_pair(seed_, stream_, next_++);
    spare_ = z1;
    have_spare_ = true;
    return z0;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmclab::rng
