// Bigraded alternating forms over an orthonormal frame of R^n, stored as
// dense C(n,p) x C(n,q) grids of coefficients
//     w_{I,J} = w(e_{i_1} ^ ... ^ e_{i_p} ; e_{j_1} ^ ... ^ e_{j_q})
// with I, J increasing multi-indices in lexicographic rank order.
//
// Normalization fixed here once and for all (every consumer relies on it):
//   * the product carries no factorial normalization, so the metric powers
//     satisfy  (g^k)_{I,J} = k! * delta_{I,J}  and  g^k / k!  has the identity
//     grid;
//   * contraction sums a single frame index into both factors;
//   * the transfer operator applies the frame Hodge star to each factor,
//     (*w)_{I^c,J^c} = sign(I,I^c) sign(J,J^c) w_{I,J};
//   * composition treats a (p,q) grid as a linear map on q-vectors and is the
//     plain matrix product of grids.
#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curv/combinatorics.hpp"
#include "curv/scalars.hpp"

namespace curv {

template <class S>
class DoubleForm {
 public:
  DoubleForm(int n, int p, int q)
      : n_(n), p_(p), q_(q),
        rows_(static_cast<int>(binomial(n, p))),
        cols_(static_cast<int>(binomial(n, q))),
        coeff_(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_)) {
    if (n < 0 || n > kMaxDim) throw InputError("DoubleForm: dimension out of range");
    if (p < 0 || p > n || q < 0 || q > n) throw RangeError("DoubleForm: degree out of range");
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  S& at(int i, int j) { return coeff_[static_cast<std::size_t>(i) * cols_ + j]; }
  const S& at(int i, int j) const { return coeff_[static_cast<std::size_t>(i) * cols_ + j]; }

  S& at(const MultiIndex& I, const MultiIndex& J) { return at(rank(I, n_), rank(J, n_)); }
  const S& at(const MultiIndex& I, const MultiIndex& J) const {
    return at(rank(I, n_), rank(J, n_));
  }

  // The metric as a (1,1) form: identity grid.
  static DoubleForm metric(int n) {
    DoubleForm g(n, 1, 1);
    for (int i = 0; i < n; ++i) g.at(i, i) = scalar_of<S>(1);
    return g;
  }

  // k-th product power of the metric: k! on the diagonal, 0 <= k <= n.
  static DoubleForm metric_power(int n, int k) {
    DoubleForm w(n, k, k);
    const S f = scalar_of<S>(factorial(k));
    for (int i = 0; i < w.rows(); ++i) w.at(i, i) = f;
    return w;
  }

  static DoubleForm scalar_form(int n, const S& v) {
    DoubleForm w(n, 0, 0);
    w.at(0, 0) = v;
    return w;
  }

  bool same_shape(const DoubleForm& o) const {
    return n_ == o.n_ && p_ == o.p_ && q_ == o.q_;
  }

  DoubleForm& operator+=(const DoubleForm& o) {
    require_shape(o);
    for (std::size_t t = 0; t < coeff_.size(); ++t) coeff_[t] += o.coeff_[t];
    return *this;
  }
  DoubleForm& operator-=(const DoubleForm& o) {
    require_shape(o);
    for (std::size_t t = 0; t < coeff_.size(); ++t) coeff_[t] -= o.coeff_[t];
    return *this;
  }
  DoubleForm& operator*=(const S& s) {
    for (auto& c : coeff_) c *= s;
    return *this;
  }
  friend DoubleForm operator+(DoubleForm a, const DoubleForm& b) { return a += b; }
  friend DoubleForm operator-(DoubleForm a, const DoubleForm& b) { return a -= b; }
  friend DoubleForm operator*(DoubleForm a, const S& s) { return a *= s; }
  friend DoubleForm operator*(const S& s, DoubleForm a) { return a *= s; }
  friend DoubleForm operator-(DoubleForm a) {
    for (auto& c : a.coeff_) c = -c;
    return a;
  }

  void require_shape(const DoubleForm& o) const {
    if (!same_shape(o))
      throw InputError("DoubleForm: shape mismatch (" + shape_str() + " vs " + o.shape_str() + ")");
  }
  std::string shape_str() const {
    return "n=" + std::to_string(n_) + ",(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
  }

 private:
  int n_, p_, q_, rows_, cols_;
  std::vector<S> coeff_;
};

// ---------------------------------------------------------------------------
// products

// Shuffle-sum product.  Degree overflow is a hard error, not a zero result.
template <class S>
DoubleForm<S> exterior_product(const DoubleForm<S>& a, const DoubleForm<S>& b) {
  if (a.n() != b.n()) throw InputError("exterior_product: dimension mismatch");
  const int n = a.n();
  if (a.p() + b.p() > n || a.q() + b.q() > n)
    throw RangeError("exterior_product: degree overflow (" + a.shape_str() + ") * (" +
                     b.shape_str() + ")");
  DoubleForm<S> out(n, a.p() + b.p(), a.q() + b.q());
  const auto& rowsp = IndexSpace::get(n, out.p());
  const auto& colsp = IndexSpace::get(n, out.q());
  for (int ko = 0; ko < rowsp.size(); ++ko) {
    const MultiIndex& K = rowsp.at(ko);
    for (int lo = 0; lo < colsp.size(); ++lo) {
      const MultiIndex& L = colsp.at(lo);
      S acc{};
      for_each_split(K, a.p(), [&](const MultiIndex& I, const MultiIndex& Kr, int si) {
        const int ia = rank(I, n), ib = rank(Kr, n);
        for_each_split(L, a.q(), [&](const MultiIndex& J, const MultiIndex& Lr, int sj) {
          const S& av = a.at(ia, rank(J, n));
          const S& bv = b.at(ib, rank(Lr, n));
          if (si * sj > 0)
            acc += av * bv;
          else
            acc -= av * bv;
        });
      });
      out.at(ko, lo) = std::move(acc);
    }
  }
  return out;
}

// Fast path for g^k * w: (g^k w)_{K,L} = k! sum_{A in C_k(K cap L)}
// sign(A,K\A) sign(A,L\A) w_{K\A,L\A}.  Same value as exterior_product with
// metric_power, an order of magnitude cheaper on the hierarchy's hot path.
template <class S>
DoubleForm<S> multiply_metric_power(int k, const DoubleForm<S>& w) {
  const int n = w.n();
  if (k < 0) throw RangeError("multiply_metric_power: negative power");
  if (w.p() + k > n || w.q() + k > n)
    throw RangeError("multiply_metric_power: degree overflow");
  if (k == 0) return w;
  DoubleForm<S> out(n, w.p() + k, w.q() + k);
  const S kf = scalar_of<S>(factorial(k));
  const auto& rowsp = IndexSpace::get(n, out.p());
  const auto& colsp = IndexSpace::get(n, out.q());
  for (int ko = 0; ko < rowsp.size(); ++ko) {
    const MultiIndex& K = rowsp.at(ko);
    for (int lo = 0; lo < colsp.size(); ++lo) {
      const MultiIndex& L = colsp.at(lo);
      MultiIndex common;
      for (int t = 0; t < K.size(); ++t)
        if (L.contains(K[t])) common.push_back(K[t]);
      if (common.size() < k) continue;
      S acc{};
      for_each_split(common, k, [&](const MultiIndex& A, const MultiIndex&, int) {
        MultiIndex Kr, Lr;
        for (int t = 0; t < K.size(); ++t)
          if (!A.contains(K[t])) Kr.push_back(K[t]);
        for (int t = 0; t < L.size(); ++t)
          if (!A.contains(L[t])) Lr.push_back(L[t]);
        const int s = merge_sign(A, Kr) * merge_sign(A, Lr);
        const S& v = w.at(rank(Kr, n), rank(Lr, n));
        if (s > 0)
          acc += v;
        else
          acc -= v;
      });
      out.at(ko, lo) = std::move(acc *= kf);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// contraction and transfer

template <class S>
DoubleForm<S> contraction(const DoubleForm<S>& w) {
  if (w.p() < 1 || w.q() < 1)
    throw RangeError("contraction: needs p >= 1 and q >= 1, got " + w.shape_str());
  const int n = w.n();
  DoubleForm<S> out(n, w.p() - 1, w.q() - 1);
  const auto& rowsp = IndexSpace::get(n, out.p());
  const auto& colsp = IndexSpace::get(n, out.q());
  for (int io = 0; io < rowsp.size(); ++io) {
    const MultiIndex& I = rowsp.at(io);
    for (int jo = 0; jo < colsp.size(); ++jo) {
      const MultiIndex& J = colsp.at(jo);
      S acc{};
      for (int k = 0; k < n; ++k) {
        if (I.contains(k) || J.contains(k)) continue;
        MultiIndex ki = MultiIndex::of({k});
        const int s = merge_sign(ki, I) * merge_sign(ki, J);
        const S& v = w.at(rank(merge_union(ki, I), n), rank(merge_union(ki, J), n));
        if (s > 0)
          acc += v;
        else
          acc -= v;
      }
      out.at(io, jo) = std::move(acc);
    }
  }
  return out;
}

template <class S>
DoubleForm<S> contraction_power(DoubleForm<S> w, int r) {
  if (r < 0 || r > w.p() || r > w.q())
    throw RangeError("contraction_power: order out of range");
  for (int t = 0; t < r; ++t) w = contraction(w);
  return w;
}

template <class S>
DoubleForm<S> hodge_star(const DoubleForm<S>& w) {
  const int n = w.n();
  DoubleForm<S> out(n, n - w.p(), n - w.q());
  const auto& rowsp = IndexSpace::get(n, w.p());
  const auto& colsp = IndexSpace::get(n, w.q());
  for (int i = 0; i < rowsp.size(); ++i) {
    const MultiIndex& I = rowsp.at(i);
    const MultiIndex Ic = complement(I, n);
    const int si = merge_sign(I, Ic);
    const int ic = rank(Ic, n);
    for (int j = 0; j < colsp.size(); ++j) {
      const MultiIndex& J = colsp.at(j);
      const MultiIndex Jc = complement(J, n);
      const int s = si * merge_sign(J, Jc);
      const S& v = w.at(i, j);
      out.at(ic, rank(Jc, n)) = (s > 0) ? v : -v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// pairings

template <class S>
S inner_product(const DoubleForm<S>& a, const DoubleForm<S>& b) {
  a.require_shape(b);
  S acc{};
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) acc += a.at(i, j) * b.at(i, j);
  return acc;
}

// Interior product against a (1,1) form h:
//   (iota_h w)_{I,J} = sum_{k not in I, l not in J} h_{k,l} s(k,I) s(l,J) w_{kI, lJ}.
// Adjoint to multiplication by h on every bidegree.
template <class S>
DoubleForm<S> interior_iota(const DoubleForm<S>& h, const DoubleForm<S>& w) {
  if (h.p() != 1 || h.q() != 1) throw InputError("interior_iota: h must be a (1,1) form");
  if (h.n() != w.n()) throw InputError("interior_iota: dimension mismatch");
  if (w.p() < 1 || w.q() < 1) throw RangeError("interior_iota: needs p,q >= 1");
  const int n = w.n();
  DoubleForm<S> out(n, w.p() - 1, w.q() - 1);
  const auto& rowsp = IndexSpace::get(n, out.p());
  const auto& colsp = IndexSpace::get(n, out.q());
  for (int io = 0; io < rowsp.size(); ++io) {
    const MultiIndex& I = rowsp.at(io);
    for (int jo = 0; jo < colsp.size(); ++jo) {
      const MultiIndex& J = colsp.at(jo);
      S acc{};
      for (int k = 0; k < n; ++k) {
        if (I.contains(k)) continue;
        const MultiIndex ki = MultiIndex::of({k});
        const int sk = merge_sign(ki, I);
        const int row = rank(merge_union(ki, I), n);
        for (int l = 0; l < n; ++l) {
          if (J.contains(l)) continue;
          const MultiIndex li = MultiIndex::of({l});
          const int s = sk * merge_sign(li, J);
          const S term = h.at(k, l) * w.at(row, rank(merge_union(li, J), n));
          if (s > 0)
            acc += term;
          else
            acc -= term;
        }
      }
      out.at(io, jo) = std::move(acc);
    }
  }
  return out;
}

// Transfer-conjugated interior product i_a w = *(a * (*w)).  On symmetric
// bidegrees this is the metric adjoint of multiplication by a; off the
// symmetric diagonal it differs from the index-sum adjoint by a fixed parity
// (see the property tests), which no consumer here ever meets.
template <class S>
DoubleForm<S> adjoint_interior(const DoubleForm<S>& a, const DoubleForm<S>& w) {
  if (a.n() != w.n()) throw InputError("adjoint_interior: dimension mismatch");
  if (a.p() > w.p() || a.q() > w.q())
    throw RangeError("adjoint_interior: degree of a exceeds degree of w");
  return hodge_star(exterior_product(a, hodge_star(w)));
}

// ---------------------------------------------------------------------------
// composition, transposition, alternation

// Grids as linear maps: (p,q) o (q,r) -> (p,r), plain matrix product.
template <class S>
DoubleForm<S> composition(const DoubleForm<S>& a, const DoubleForm<S>& b) {
  if (a.n() != b.n()) throw InputError("composition: dimension mismatch");
  if (a.q() != b.p())
    throw InputError("composition: inner degrees differ (" + a.shape_str() + ") o (" +
                     b.shape_str() + ")");
  DoubleForm<S> out(a.n(), a.p(), b.q());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const S& av = a.at(i, k);
      for (int j = 0; j < b.cols(); ++j) out.at(i, j) += av * b.at(k, j);
    }
  return out;
}

template <class S>
DoubleForm<S> transpose(const DoubleForm<S>& w) {
  DoubleForm<S> out(w.n(), w.q(), w.p());
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) out.at(j, i) = w.at(i, j);
  return out;
}

// First-Bianchi alternation: moves one leading slot across the blocks,
//   (B w)(x_1..x_{p+1}; y_2..y_q) = sum_j (-1)^{j+1} w(..x_j dropped..; x_j ^ y_2..).
// Algebraic curvature grids are exactly the symmetric (2,2) grids in its kernel.
template <class S>
DoubleForm<S> first_bianchi_sum(const DoubleForm<S>& w) {
  if (w.q() < 1) throw RangeError("first_bianchi_sum: needs q >= 1");
  if (w.p() + 1 > w.n()) throw RangeError("first_bianchi_sum: degree overflow");
  const int n = w.n();
  DoubleForm<S> out(n, w.p() + 1, w.q() - 1);
  const auto& rowsp = IndexSpace::get(n, out.p());
  const auto& colsp = IndexSpace::get(n, out.q());
  for (int ko = 0; ko < rowsp.size(); ++ko) {
    const MultiIndex& K = rowsp.at(ko);
    for (int lo = 0; lo < colsp.size(); ++lo) {
      const MultiIndex& L = colsp.at(lo);
      S acc{};
      for (int j = 0; j <= w.p(); ++j) {
        const int kj = K[j];
        if (L.contains(kj)) continue;
        MultiIndex Kr;
        for (int t = 0; t < K.size(); ++t)
          if (t != j) Kr.push_back(K[t]);
        const MultiIndex kji = MultiIndex::of({kj});
        const int s = ((j & 1) ? -1 : 1) * merge_sign(kji, L);
        const S& v = w.at(rank(Kr, n), rank(merge_union(kji, L), n));
        if (s > 0)
          acc += v;
        else
          acc -= v;
      }
      out.at(ko, lo) = std::move(acc);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// evaluation and norms

namespace detail {
// Cofactor-expansion determinant; m stays tiny (frame degree), exact over any
// field scalar, no pivoting needed.
template <class S>
S det_recursive(const std::vector<S>& m, std::vector<int> rows, std::vector<int> cols) {
  const std::size_t k = rows.size();
  if (k == 0) return scalar_of<S>(1);
  S acc{};
  std::vector<int> subrows(rows.begin() + 1, rows.end());
  std::vector<int> subcols(k - 1);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t s = 0, u = 0; s < k; ++s)
      if (s != t) subcols[u++] = cols[s];
    const S& piv = m[static_cast<std::size_t>(rows[0]) * 16 + cols[t]];
    S sub = piv * det_recursive(m, subrows, subcols);
    if (t & 1)
      acc -= sub;
    else
      acc += sub;
  }
  return acc;
}
}  // namespace detail

// Evaluate w on tuples of vectors: w(x_1 ^ .. ^ x_p ; y_1 ^ .. ^ y_q) =
// sum_{I,J} w_{I,J} det(x[I]) det(y[J]).  xs[i] is an n-vector.
template <class S>
S evaluate(const DoubleForm<S>& w, const std::vector<std::vector<S>>& xs,
           const std::vector<std::vector<S>>& ys) {
  const int n = w.n();
  if (static_cast<int>(xs.size()) != w.p() || static_cast<int>(ys.size()) != w.q())
    throw InputError("evaluate: argument count does not match bidegree");
  for (const auto& v : xs)
    if (static_cast<int>(v.size()) != n) throw InputError("evaluate: vector length != n");
  for (const auto& v : ys)
    if (static_cast<int>(v.size()) != n) throw InputError("evaluate: vector length != n");

  // pack both argument families into padded row-major blocks for the
  // determinant helper (stride 16 = kMaxDim)
  auto pack = [&](const std::vector<std::vector<S>>& vs) {
    std::vector<S> m(static_cast<std::size_t>(vs.size()) * 16);
    for (std::size_t r = 0; r < vs.size(); ++r)
      for (int c = 0; c < n; ++c) m[r * 16 + static_cast<std::size_t>(c)] = vs[r][static_cast<std::size_t>(c)];
    return m;
  };
  const auto mx = pack(xs), my = pack(ys);

  const auto& rowsp = IndexSpace::get(n, w.p());
  const auto& colsp = IndexSpace::get(n, w.q());
  std::vector<int> ridx(static_cast<std::size_t>(w.p())), cidx;
  for (std::size_t t = 0; t < ridx.size(); ++t) ridx[t] = static_cast<int>(t);
  std::vector<int> ridy(static_cast<std::size_t>(w.q()));
  for (std::size_t t = 0; t < ridy.size(); ++t) ridy[t] = static_cast<int>(t);

  S acc{};
  for (int i = 0; i < rowsp.size(); ++i) {
    const MultiIndex& I = rowsp.at(i);
    std::vector<int> colsI(static_cast<std::size_t>(I.size()));
    for (int t = 0; t < I.size(); ++t) colsI[static_cast<std::size_t>(t)] = I[t];
    const S dx = detail::det_recursive(mx, ridx, colsI);
    for (int j = 0; j < colsp.size(); ++j) {
      const MultiIndex& J = colsp.at(j);
      std::vector<int> colsJ(static_cast<std::size_t>(J.size()));
      for (int t = 0; t < J.size(); ++t) colsJ[static_cast<std::size_t>(t)] = J[t];
      acc += w.at(i, j) * dx * detail::det_recursive(my, ridy, colsJ);
    }
  }
  return acc;
}

// Component on arbitrary index tuples (repeats -> 0), resolving signs:
// used by the delta oracles to read tensors the way index formulas do.
template <class S>
S component(const DoubleForm<S>& w, std::span<const int> upper, std::span<const int> lower) {
  if (static_cast<int>(upper.size()) != w.p() || static_cast<int>(lower.size()) != w.q())
    throw InputError("component: tuple length does not match bidegree");
  const int su = sorting_sign(upper), sl = sorting_sign(lower);
  if (su == 0 || sl == 0) return S{};
  MultiIndex I, J;
  {
    std::vector<int> tmp(upper.begin(), upper.end());
    std::sort(tmp.begin(), tmp.end());
    for (int x : tmp) I.push_back(x);
    tmp.assign(lower.begin(), lower.end());
    std::sort(tmp.begin(), tmp.end());
    for (int x : tmp) J.push_back(x);
  }
  const S& v = w.at(I, J);
  return (su * sl > 0) ? v : -v;
}

template <class S>
S component(const DoubleForm<S>& w, std::initializer_list<int> upper,
            std::initializer_list<int> lower) {
  return component(w, std::span<const int>(upper.begin(), upper.size()),
                   std::span<const int>(lower.begin(), lower.size()));
}

template <class S>
S sup_norm(const DoubleForm<S>& w) {
  S best{};
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) {
      S a = ScalarTraits<S>::abs(w.at(i, j));
      if (best < a) best = std::move(a);
    }
  return best;
}

// Largest entry magnitude as a double — the universal residual for reports.
template <class S>
double residual_norm(const DoubleForm<S>& w) {
  double best = 0;
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) {
      const double a = std::fabs(ScalarTraits<S>::to_double(w.at(i, j)));
      if (a > best) best = a;
    }
  return best;
}

template <class S>
double frobenius_norm(const DoubleForm<S>& w) {
  double acc = 0;
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) {
      const double v = ScalarTraits<S>::to_double(w.at(i, j));
      acc += v * v;
    }
  return std::sqrt(acc);
}

// sup |a - b| as a double; exact zero for exact scalars iff equal.
template <class S>
double residual(const DoubleForm<S>& a, const DoubleForm<S>& b) {
  return residual_norm(a - b);
}

template <class S>
double symmetry_defect(const DoubleForm<S>& w) {
  if (w.p() != w.q()) throw InputError("symmetry_defect: needs p == q");
  return residual(w, transpose(w));
}

template <class S>
bool exactly_zero(const DoubleForm<S>& w) {
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j)
      if (!(w.at(i, j) == S{})) return false;
  return true;
}

}  // namespace curv
