#pragma once

#include <cstdint>
#include <string>

#include "snowembed/metric_space.hpp"

namespace snowembed {

// Identifier stored in artifact metadata so seeded runs stay reproducible
// across versions of this library.
inline constexpr const char* kRngAlgorithm = "splitmix64/v1";

/// SplitMix64: tiny, platform-independent, splittable PRNG.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Derives an independent stream; the parent advances once.
  SplitMix64 split() { return SplitMix64(next()); }

  /// Geometric(1/2) on {0,1,2,...}: index of the first set bit of a uniform
  /// bit stream.
  int geometric_half();
};

enum class Family { interval, cantor, star, gw_tree, snowflake_of };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct GeneratorSpec {
  Family family = Family::interval;
  int size = 2;             // interval: point count; gw_tree: vertex count
  int depth = 1;            // cantor recursion depth (<= 10)
  int arms = 1;             // star arm count
  double alpha = 1.0;       // snowflake exponent in (0,1]
  std::uint64_t seed = 0;   // gw_tree only
};

/// Deterministic construction of the self-contained families (interval,
/// cantor, star, gw_tree). The output is fully determined by the spec.
FiniteMetricSpace gen_space(const GeneratorSpec& spec);

/// Applies d -> d^alpha entrywise; alpha in (0,1] keeps the triangle
/// inequality, which is re-verified on the result.
FiniteMetricSpace snowflake_of(const FiniteMetricSpace& space, double alpha);

}  // namespace snowembed
