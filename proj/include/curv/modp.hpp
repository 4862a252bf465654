// Exact injectivity certificates for integer matrices via rank modulo a large
// prime: a maximal minor that is nonzero mod p is nonzero over Z, so full rank
// mod p *proves* full rank over Q (the converse direction is never needed
// here).  Orders of magnitude faster than rational elimination.
#pragma once

#include <cstdint>
#include <vector>

namespace curv {

inline constexpr std::int64_t kModRankPrime = 1000000007LL;

// Row-major rows x cols matrix of plain integers; returns rank mod p.
inline int modp_rank(std::vector<std::int64_t> m, int rows, int cols,
                     std::int64_t p = kModRankPrime) {
  auto at = [&](int r, int c) -> std::int64_t& {
    return m[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + c];
  };
  for (auto& x : m) {
    x %= p;
    if (x < 0) x += p;
  }
  auto powmod = [&](std::int64_t b, std::int64_t e) {
    std::int64_t r = 1;
    b %= p;
    while (e) {
      if (e & 1) r = (__int128)r * b % p;
      b = (__int128)b * b % p;
      e >>= 1;
    }
    return r;
  };
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (at(r, c) != 0) { piv = r; break; }
    if (piv < 0) continue;
    for (int cc = 0; cc < cols; ++cc) std::swap(at(piv, cc), at(rank, cc));
    const std::int64_t inv = powmod(at(rank, c), p - 2);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || at(r, c) == 0) continue;
      const std::int64_t f = (__int128)at(r, c) * inv % p;
      for (int cc = c; cc < cols; ++cc) {
        at(r, cc) = (at(r, cc) - (__int128)f * at(rank, cc)) % p;
        if (at(r, cc) < 0) at(r, cc) += p;
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace curv
