// Named, seeded generator for every randomized check.  splitmix64 is pinned
// here by hand so results are identical across standard libraries and
// platforms (libstdc++ distribution algorithms are not portable).
#pragma once

#include <cstdint>

namespace curv {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Inclusive bounds; modulo bias is irrelevant at these range sizes.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0,1)
    return lo + u * (hi - lo);
  }

  // Derive an independent stream (one per check) from a master seed.
  static SplitMix64 stream(std::uint64_t master, std::uint64_t salt) {
    SplitMix64 s(master ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    s.next();
    return s;
  }
};

}  // namespace curv
