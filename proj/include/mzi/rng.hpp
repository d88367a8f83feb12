#pragma once

#include <cstdint>
#include <random>

namespace mzi {

// splitmix64 finalizer. Used for seed derivation and the random-schedule
// coin; both are part of the reproducibility contract and must not change.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream identifiers so that the beam-splitter randomness and the setting
/// schedule of one grid point never share bits.
enum class StreamKind : std::uint64_t { kRouting = 1, kSchedule = 2, kInit = 3 };

/// Seed for the stream of (master seed, grid point, stage, kind).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                                                  std::uint64_t stage,
                                                  StreamKind kind = StreamKind::kRouting) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ point);
  h = mix64(h ^ (stage + 0x100));
  return mix64(h ^ static_cast<std::uint64_t>(kind));
}

/// Uniform [0,1) stream backed by mt19937_64, whose output sequence is fixed
/// by the C++ standard. The double conversion is done here rather than with
/// std::uniform_real_distribution, which is not portable across libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  [[nodiscard]] std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mzi
