#pragma once

// Brute-force reference implementations used to cross-check the production
// routes.  These expand literal sums over generalized Kronecker deltas and
// frame-index permutations, with no shared code beyond component access, so
// agreement with the grid-level routes is a genuine two-sided check.  They are
// deliberately slow and gated to small dimensions.

#include <algorithm>
#include <array>
#include <vector>

#include "curv/combinatorics.hpp"
#include "curv/curvature.hpp"
#include "curv/doubleform.hpp"
#include "curv/errors.hpp"

namespace curv {

// *R*_p by the literal delta sum
//   (*R*_p)_{I,J} = (1/4) sum_{a,b,r,s} delta^{(a,b,I)}_{(r,s,J)} R_{(a,b),(r,s)}
// over all frame indices a,b,r,s in [0,n).
template <class S>
DoubleForm<S> oracle_dd_star(const AlgebraicCurvature<S>& R, int p) {
  const int n = R.n();
  if (p < 0 || p > n - 2) throw RangeError("oracle_dd_star: p out of range");
  if (n > 6) throw RangeError("oracle_dd_star: literal sum gated to n <= 6");
  const auto& rows = IndexSpace::get(n, p);
  DoubleForm<S> out(n, p, p);
  std::array<int, 18> up{};
  std::array<int, 18> lo{};
  for (int ii = 0; ii < rows.size(); ++ii) {
    const MultiIndex& I = rows.at(ii);
    for (int jj = 0; jj < rows.size(); ++jj) {
      const MultiIndex& J = rows.at(jj);
      S acc = scalar_of<S>(0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
              up[0] = a;
              up[1] = b;
              lo[0] = r;
              lo[1] = s;
              for (int t = 0; t < p; ++t) {
                up[2 + t] = I[t];
                lo[2 + t] = J[t];
              }
              const int d = generalized_delta(std::span<const int>(up.data(), 2 + p),
                                              std::span<const int>(lo.data(), 2 + p));
              if (d == 0) continue;
              S val = component(R.form, {a, b}, {r, s});
              if (d < 0) val = -val;
              acc += val;
            }
      acc *= scalar_ratio<S>(1, 4);
      out.at(I, J) = acc;
    }
  }
  return out;
}

// Components of the multiplicative power R^q on 2q-index blocks by restricted
// permutation sums:
//   (R^q)_{A,B} = (1/4^q) sum_{sg in Perm(A), tu in Perm(B)}
//                 sgn(sg) sgn(tu) prod_t R_{(sg_{2t},sg_{2t+1}),(tu_{2t},tu_{2t+1})}.
template <class S>
DoubleForm<S> oracle_riemann_power(const AlgebraicCurvature<S>& R, int q) {
  const int n = R.n();
  if (q < 1 || 2 * q > n) throw RangeError("oracle_riemann_power: q out of range");
  if (n > 6 || q > 2) throw RangeError("oracle_riemann_power: literal sum gated to n <= 6, q <= 2");
  const auto& blocks = IndexSpace::get(n, 2 * q);
  DoubleForm<S> rq(n, 2 * q, 2 * q);
  const int m = 2 * q;
  std::vector<int> sg(static_cast<std::size_t>(m));
  std::vector<int> tu(static_cast<std::size_t>(m));
  for (int ai = 0; ai < blocks.size(); ++ai) {
    for (int bi = 0; bi < blocks.size(); ++bi) {
      const MultiIndex& A = blocks.at(ai);
      const MultiIndex& B = blocks.at(bi);
      S acc = scalar_of<S>(0);
      for (int t = 0; t < m; ++t) sg[static_cast<std::size_t>(t)] = A[t];
      do {
        const int ssg = sorting_sign(std::span<const int>(sg.data(), sg.size()));
        for (int t = 0; t < m; ++t) tu[static_cast<std::size_t>(t)] = B[t];
        do {
          const int stu = sorting_sign(std::span<const int>(tu.data(), tu.size()));
          S prod = scalar_of<S>(ssg * stu);
          for (int t = 0; t < q; ++t)
            prod *= component(R.form, {sg[static_cast<std::size_t>(2 * t)], sg[static_cast<std::size_t>(2 * t + 1)]},
                              {tu[static_cast<std::size_t>(2 * t)], tu[static_cast<std::size_t>(2 * t + 1)]});
          acc += prod;
        } while (std::next_permutation(tu.begin(), tu.end()));
        std::sort(tu.begin(), tu.end());
      } while (std::next_permutation(sg.begin(), sg.end()));
      for (int t = 0; t < q; ++t) acc *= scalar_ratio<S>(1, 4);
      rq.at(A, B) = acc;
    }
  }
  return rq;
}

// R^{(p,q)} by the literal delta sum against the permutation-expanded power:
//   (R^{(p,q)})_{I,J} = (1/((2q)!)^2) sum_{A,B} delta^{(A,I)}_{(B,J)} (R^q)_{A,B}
// over all duplicate-free 2q-tuples A, B of frame indices.
template <class S>
DoubleForm<S> oracle_pq_curvature(const AlgebraicCurvature<S>& R, int p, int q) {
  const int n = R.n();
  require_pq(n, p, q, "oracle_pq_curvature");
  if (n > 5 || q > 2) throw RangeError("oracle_pq_curvature: literal sum gated to n <= 5, q <= 2");
  const DoubleForm<S> rq = oracle_riemann_power(R, q);
  const int m = 2 * q;
  const auto& rows = IndexSpace::get(n, p);
  const auto& blocks = IndexSpace::get(n, m);
  DoubleForm<S> out(n, p, p);
  std::vector<int> at(static_cast<std::size_t>(m));
  std::vector<int> bt(static_cast<std::size_t>(m));
  std::array<int, 18> up{};
  std::array<int, 18> lo{};
  const long long norm = factorial(m) * factorial(m);
  for (int ii = 0; ii < rows.size(); ++ii) {
    const MultiIndex& I = rows.at(ii);
    for (int jj = 0; jj < rows.size(); ++jj) {
      const MultiIndex& J = rows.at(jj);
      S acc = scalar_of<S>(0);
      for (int ai = 0; ai < blocks.size(); ++ai) {
        for (int bi = 0; bi < blocks.size(); ++bi) {
          const S base = rq.at(blocks.at(ai), blocks.at(bi));
          for (int t = 0; t < m; ++t) at[static_cast<std::size_t>(t)] = blocks.at(ai)[t];
          do {
            const int sa = sorting_sign(std::span<const int>(at.data(), at.size()));
            for (int t = 0; t < m; ++t) bt[static_cast<std::size_t>(t)] = blocks.at(bi)[t];
            do {
              const int sb = sorting_sign(std::span<const int>(bt.data(), bt.size()));
              for (int t = 0; t < m; ++t) {
                up[static_cast<std::size_t>(t)] = at[static_cast<std::size_t>(t)];
                lo[static_cast<std::size_t>(t)] = bt[static_cast<std::size_t>(t)];
              }
              for (int t = 0; t < p; ++t) {
                up[static_cast<std::size_t>(m + t)] = I[t];
                lo[static_cast<std::size_t>(m + t)] = J[t];
              }
              const int d = generalized_delta(std::span<const int>(up.data(), static_cast<std::size_t>(m + p)),
                                              std::span<const int>(lo.data(), static_cast<std::size_t>(m + p)));
              if (d == 0) continue;
              S val = base;
              if (d * sa * sb < 0) val = -val;
              acc += val;
            } while (std::next_permutation(bt.begin(), bt.end()));
          } while (std::next_permutation(at.begin(), at.end()));
        }
      }
      acc *= scalar_ratio<S>(1, norm);
      out.at(I, J) = acc;
    }
  }
  return out;
}

}  // namespace curv
