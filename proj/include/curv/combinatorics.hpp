// Increasing multi-indices over {0,...,n-1}: lexicographic rank/unrank via the
// combinatorial number system, merge and complement signs, and the generalized
// Kronecker delta.  Everything here is exact integer arithmetic; this layer
// carries all sign conventions for the grid algebra built on top of it.
//
// Conventions (load-bearing, used verbatim by every module above):
//   * indices are 0-based, multi-indices strictly increasing;
//   * rank(I) is the position of I in the lexicographic enumeration of all
//     increasing p-tuples over {0,...,n-1}, starting at 0;
//   * merge_sign(A,B) is the parity of the shuffle sorting the concatenation
//     (A,B) — zero when A and B intersect;
//   * complement_sign(I,n) is merge_sign(I, complement(I)), i.e. the sign of
//     the permutation (I, I^c) of (0,...,n-1).
#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "curv/errors.hpp"

namespace curv {

inline constexpr int kMaxDim = 16;

constexpr long long factorial(int m) {
  long long r = 1;
  for (int t = 2; t <= m; ++t) r *= t;
  return r;
}

constexpr long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

// Strictly increasing multi-index with inline storage.  An empty multi-index
// (p = 0) is the basis label of the scalar slot and is perfectly valid.
struct MultiIndex {
  std::array<std::uint8_t, kMaxDim> v{};
  std::uint8_t len = 0;

  constexpr int size() const { return len; }
  constexpr bool empty() const { return len == 0; }
  constexpr int operator[](int t) const { return v[static_cast<std::size_t>(t)]; }

  void push_back(int x) {
    if (len >= kMaxDim) throw InputError("MultiIndex: capacity exceeded");
    v[len++] = static_cast<std::uint8_t>(x);
  }

  bool contains(int x) const {
    for (int t = 0; t < len; ++t)
      if (v[t] == x) return true;
    return false;
  }

  // Position of x in the tuple, -1 if absent.
  int position(int x) const {
    for (int t = 0; t < len; ++t)
      if (v[t] == x) return t;
    return -1;
  }

  bool increasing() const {
    for (int t = 1; t < len; ++t)
      if (v[t - 1] >= v[t]) return false;
    return true;
  }

  static MultiIndex of(std::initializer_list<int> xs) {
    MultiIndex m;
    for (int x : xs) m.push_back(x);
    return m;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    if (a.len != b.len) return false;
    for (int t = 0; t < a.len; ++t)
      if (a.v[t] != b.v[t]) return false;
    return true;
  }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }

  std::string str() const {
    std::string s = "(";
    for (int t = 0; t < len; ++t) {
      if (t) s += ',';
      s += std::to_string(int(v[t]));
    }
    return s + ")";
  }
};

inline void require_valid(const MultiIndex& I, int n) {
  if (n < 0 || n > kMaxDim) throw InputError("dimension out of range: " + std::to_string(n));
  if (I.len > n) throw InputError("multi-index longer than dimension");
  for (int t = 0; t < I.len; ++t)
    if (I[t] < 0 || I[t] >= n) throw InputError("multi-index entry out of range: " + I.str());
  if (!I.increasing()) throw InputError("multi-index not strictly increasing: " + I.str());
}

// Lexicographic rank via the combinatorial number system:
//   rank(I) = C(n,p) - 1 - sum_t C(n-1-i_t, p-t).
// O(p) apart from the O(min(k,n-k)) binomials; no lookup tables.
inline int rank(const MultiIndex& I, int n) {
  require_valid(I, n);
  const int p = I.size();
  long long r = binomial(n, p) - 1;
  for (int t = 0; t < p; ++t) r -= binomial(n - 1 - I[t], p - t);
  return static_cast<int>(r);
}

inline MultiIndex unrank(int r, int n, int p) {
  if (n < 0 || n > kMaxDim || p < 0 || p > n) throw InputError("unrank: bad (n,p)");
  if (r < 0 || r >= binomial(n, p)) throw InputError("unrank: rank out of range");
  MultiIndex I;
  long long rest = binomial(n, p) - 1 - r;
  int lo = 0;
  for (int t = 0; t < p; ++t) {
    // choose the smallest admissible entry i >= lo with C(n-1-i, p-t) <= rest
    int i = lo;
    while (binomial(n - 1 - i, p - t) > rest) ++i;
    rest -= binomial(n - 1 - i, p - t);
    I.push_back(i);
    lo = i + 1;
  }
  return I;
}

// Parity sign of sorting the concatenation (A,B); 0 if A and B intersect.
// Counts inversions pairwise — tuples are short enough that O(|A||B|) wins
// over anything clever.
inline int merge_sign(const MultiIndex& A, const MultiIndex& B) {
  int inv = 0;
  for (int s = 0; s < A.size(); ++s)
    for (int t = 0; t < B.size(); ++t) {
      if (A[s] == B[t]) return 0;
      if (A[s] > B[t]) ++inv;
    }
  return (inv & 1) ? -1 : 1;
}

// Sorted union of two disjoint increasing tuples.
inline MultiIndex merge_union(const MultiIndex& A, const MultiIndex& B) {
  MultiIndex M;
  int s = 0, t = 0;
  while (s < A.size() || t < B.size()) {
    if (t == B.size() || (s < A.size() && A[s] < B[t]))
      M.push_back(A[s++]);
    else
      M.push_back(B[t++]);
  }
  return M;
}

inline MultiIndex complement(const MultiIndex& I, int n) {
  require_valid(I, n);
  MultiIndex C;
  for (int x = 0; x < n; ++x)
    if (!I.contains(x)) C.push_back(x);
  return C;
}

inline int complement_sign(const MultiIndex& I, int n) {
  return merge_sign(I, complement(I, n));
}

// Sign of the permutation sorting an arbitrary integer tuple; 0 on repeats.
inline int sorting_sign(std::span<const int> xs) {
  int inv = 0;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s)
    for (std::size_t t = s + 1; t < xs.size(); ++t) {
      if (xs[s] == xs[t]) return 0;
      if (xs[s] > xs[t]) ++inv;
    }
  return (inv & 1) ? -1 : 1;
}

// Generalized Kronecker delta on equal-length tuples (repeats allowed, value
// then 0).  Equals det[ delta_{upper_r, lower_s} ]: nonzero only when both
// tuples are duplicate-free and equal as sets, in which case it is the sign of
// the permutation matching upper to lower.
inline int generalized_delta(std::span<const int> upper, std::span<const int> lower) {
  if (upper.size() != lower.size()) throw InputError("generalized_delta: length mismatch");
  const int m = static_cast<int>(upper.size());
  for (int s = 0; s < m; ++s)
    for (int t = s + 1; t < m; ++t)
      if (upper[s] == upper[t] || lower[s] == lower[t]) return 0;
  // sigma(t) = position of upper[t] inside lower; sign(sigma) by inversions.
  std::array<int, kMaxDim> sigma{};
  for (int t = 0; t < m; ++t) {
    int pos = -1;
    for (int s = 0; s < m; ++s)
      if (lower[s] == upper[t]) { pos = s; break; }
    if (pos < 0) return 0;
    sigma[t] = pos;
  }
  int inv = 0;
  for (int s = 0; s < m; ++s)
    for (int t = s + 1; t < m; ++t)
      if (sigma[s] > sigma[t]) ++inv;
  return (inv & 1) ? -1 : 1;
}

// Lexicographic enumeration of all increasing p-tuples over {0,...,n-1}.
inline std::vector<MultiIndex> enumerate_increasing(int n, int p) {
  if (n < 0 || n > kMaxDim || p < 0 || p > n) throw InputError("enumerate: bad (n,p)");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(n, p)));
  MultiIndex I;
  for (int t = 0; t < p; ++t) I.push_back(t);
  while (true) {
    out.push_back(I);
    // advance to the next combination in lex order
    int t = p - 1;
    while (t >= 0 && I.v[t] == n - p + t) --t;
    if (t < 0) break;
    ++I.v[t];
    for (int s = t + 1; s < p; ++s) I.v[s] = I.v[s - 1] + 1;
  }
  if (p == 0) out.resize(1);  // single empty tuple
  return out;
}

// Shared, lazily built basis tables.  Operations walk these grids constantly,
// so the enumeration is cached per (n,p); access is thread-safe and the lists
// are immutable once published.
class IndexSpace {
 public:
  static const IndexSpace& get(int n, int p) {
    if (n < 0 || n > kMaxDim || p < 0 || p > n) throw InputError("IndexSpace: bad (n,p)");
    static std::array<std::array<IndexSpace*, kMaxDim + 1>, kMaxDim + 1> table{};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto*& slot = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)];
    if (!slot) slot = new IndexSpace(n, p);
    return *slot;
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int size() const { return static_cast<int>(list_.size()); }
  const std::vector<MultiIndex>& list() const { return list_; }
  const MultiIndex& at(int r) const { return list_[static_cast<std::size_t>(r)]; }

 private:
  IndexSpace(int n, int p) : n_(n), p_(p), list_(enumerate_increasing(n, p)) {}
  int n_, p_;
  std::vector<MultiIndex> list_;
};

// Visit every split of K into a size-r sub-tuple and its complement within K.
// fn(sub, rest, sign) where sign = merge_sign(sub, rest); driving the shuffle
// sums this way keeps the sign computation at O(1) per step (position parity).
template <class F>
inline void for_each_split(const MultiIndex& K, int r, F&& fn) {
  const int m = K.size();
  if (r < 0 || r > m) return;
  std::array<int, kMaxDim> pos{};
  for (int t = 0; t < r; ++t) pos[t] = t;
  while (true) {
    MultiIndex sub, rest;
    int parity = 0;
    {
      int t = 0;
      for (int s = 0; s < m; ++s) {
        if (t < r && pos[t] == s) {
          sub.push_back(K[s]);
          parity += s - t;  // positions jumped over while extracting sub
          ++t;
        } else {
          rest.push_back(K[s]);
        }
      }
    }
    fn(static_cast<const MultiIndex&>(sub), static_cast<const MultiIndex&>(rest),
       (parity & 1) ? -1 : 1);
    if (r == 0) break;
    int t = r - 1;
    while (t >= 0 && pos[t] == m - r + t) --t;
    if (t < 0) break;
    ++pos[t];
    for (int s = t + 1; s < r; ++s) pos[s] = pos[s - 1] + 1;
  }
}

}  // namespace curv
