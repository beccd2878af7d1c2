#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "smcd/types.hpp"

namespace smcd {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based child seed: a pure function of the parent seed and the key
/// path, so streams can be generated in any order or on any thread.
constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> keys) noexcept {
  Seed s = mix64(parent);
  for (auto k : keys) s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
  return s;
}

/// Seeded generator with portable output. The engine is mt19937_64 (fully
/// specified by the standard); uniforms use the top 53 bits and normals use
/// the Box-Muller transform, so the same seed gives the same stream with any
/// conforming standard library.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  Vector normal_vector(Index len);
  Matrix normal_matrix(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace smcd
