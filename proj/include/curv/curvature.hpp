// Algebraic curvature structure over an orthonormal frame: the generalized
// double duals *R*_p, the two-parameter curvature grids R^{(p,q)}, the
// Einstein-Lovelock family, orthogonal decomposition into trace-free parts,
// and recovery of R from its second double dual.
//
// Everything is scalar-generic; exact-rational instantiations give equality
// checks with zero tolerance, dual-number instantiations let the chart layer
// differentiate through all of it.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "curv/doubleform.hpp"
#include "curv/rng.hpp"

namespace curv {

// A (2,2) grid with the symmetries of a curvature tensor.  `checked` enforces
// pair symmetry and the first-Bianchi kernel condition (exact for exact
// scalars, tolerance-based otherwise); `unchecked` is for constructions that
// are symmetric by design (metric multiples, squares of symmetric (1,1)
// grids, block sums of valid tensors).
template <class S>
struct AlgebraicCurvature {
  DoubleForm<S> form;

  int n() const { return form.n(); }

  static AlgebraicCurvature checked(DoubleForm<S> w, double tol = 0.0) {
    if (w.p() != 2 || w.q() != 2) throw InputError("AlgebraicCurvature: needs a (2,2) grid");
    if (symmetry_defect(w) > tol)
      throw InputError("AlgebraicCurvature: grid is not pair-symmetric");
    // the alternation lands in degree 3, so the condition is vacuous below n=3
    if (w.n() >= 3 && residual_norm(first_bianchi_sum(w)) > tol)
      throw InputError("AlgebraicCurvature: first-Bianchi alternation does not vanish");
    return AlgebraicCurvature{std::move(w)};
  }

  static AlgebraicCurvature unchecked(DoubleForm<S> w) {
    if (w.p() != 2 || w.q() != 2) throw InputError("AlgebraicCurvature: needs a (2,2) grid");
    return AlgebraicCurvature{std::move(w)};
  }

  // Space form of sectional curvature k: R = (k/2) g^2.
  static AlgebraicCurvature constant_curvature(int n, const S& k) {
    auto w = DoubleForm<S>::metric_power(n, 2);
    w *= k / scalar_of<S>(2);
    return AlgebraicCurvature{std::move(w)};
  }
};

// Direct sum living on the orthogonal product frame: factor-one planes keep
// R1, factor-two planes (shifted) keep R2, mixed planes are flat.
template <class S>
AlgebraicCurvature<S> block_sum(const AlgebraicCurvature<S>& R1, const AlgebraicCurvature<S>& R2) {
  const int n1 = R1.n(), n2 = R2.n(), n = n1 + n2;
  DoubleForm<S> out(n, 2, 2);
  const auto& pairs = IndexSpace::get(n, 2);
  for (int i = 0; i < pairs.size(); ++i) {
    const MultiIndex& I = pairs.at(i);
    for (int j = 0; j < pairs.size(); ++j) {
      const MultiIndex& J = pairs.at(j);
      if (I[1] < n1 && J[1] < n1) {
        out.at(i, j) = R1.form.at(rank(I, n1), rank(J, n1));
      } else if (I[0] >= n1 && J[0] >= n1) {
        const MultiIndex Is = MultiIndex::of({I[0] - n1, I[1] - n1});
        const MultiIndex Js = MultiIndex::of({J[0] - n1, J[1] - n1});
        out.at(i, j) = R2.form.at(rank(Is, n2), rank(Js, n2));
      }
    }
  }
  return AlgebraicCurvature<S>::unchecked(std::move(out));
}

// Sum of squares of random symmetric (1,1) grids with small integer entries:
// always pair-symmetric and first-Bianchi, generic for enough terms.
template <class S>
AlgebraicCurvature<S> random_algebraic_curvature(SplitMix64& rng, int n, int terms = 3,
                                                 int bound = 3) {
  DoubleForm<S> acc(n, 2, 2);
  for (int t = 0; t < terms; ++t) {
    DoubleForm<S> h(n, 1, 1);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const S v = scalar_of<S>(rng.uniform_int(-bound, bound));
        h.at(i, j) = v;
        h.at(j, i) = v;
      }
    acc += exterior_product(h, h);
  }
  return AlgebraicCurvature<S>::unchecked(std::move(acc));
}

// ---------------------------------------------------------------------------
// first traces

template <class S>
DoubleForm<S> ricci(const AlgebraicCurvature<S>& R) {
  return contraction(R.form);
}

template <class S>
S scalar_curvature(const AlgebraicCurvature<S>& R) {
  return contraction_power(R.form, 2).at(0, 0);
}

template <class S>
DoubleForm<S> einstein_tensor(const AlgebraicCurvature<S>& R) {
  auto g = DoubleForm<S>::metric(R.n());
  return g * (scalar_curvature(R) / scalar_of<S>(2)) - ricci(R);
}

// (Ric - Scal/(2(n-1)) g) / (n-2); the conformal building block.
template <class S>
DoubleForm<S> schouten_tensor(const AlgebraicCurvature<S>& R) {
  const int n = R.n();
  if (n < 3) throw RangeError("schouten_tensor: needs n >= 3");
  auto g = DoubleForm<S>::metric(n);
  auto a = ricci(R) - g * (scalar_curvature(R) / scalar_of<S>(2 * (n - 1)));
  return a * scalar_ratio<S>(1, n - 2);
}

// ---------------------------------------------------------------------------
// the double-dual hierarchy

// *R*_p = *(g^{n-p-2} R) / (n-p-2)!, a (p,p) grid, 0 <= p <= n-2.
template <class S>
DoubleForm<S> dd_star(const AlgebraicCurvature<S>& R, int p) {
  const int n = R.n();
  if (p < 0 || p > n - 2) throw RangeError("dd_star: needs 0 <= p <= n-2");
  auto w = hodge_star(multiply_metric_power(n - p - 2, R.form));
  return w * scalar_ratio<S>(1, factorial(n - p - 2));
}

// Same object through the contraction route: c^{n-p-2}(*R) / (n-p-2)!.
template <class S>
DoubleForm<S> dd_star_contract(const AlgebraicCurvature<S>& R, int p) {
  const int n = R.n();
  if (p < 0 || p > n - 2) throw RangeError("dd_star_contract: needs 0 <= p <= n-2");
  auto w = contraction_power(hodge_star(R.form), n - p - 2);
  return w * scalar_ratio<S>(1, factorial(n - p - 2));
}

// Closed form in curvature traces:
//   *R*_p = g^{p-2} R/(p-2)! - g^{p-1} Ric/(p-1)! + (1/2) g^p Scal/p!
// with the convention that terms with negative metric powers drop out.
template <class S>
DoubleForm<S> dd_star_trace_form(const AlgebraicCurvature<S>& R, int p) {
  const int n = R.n();
  if (p < 0 || p > n - 2) throw RangeError("dd_star_trace_form: needs 0 <= p <= n-2");
  DoubleForm<S> acc(n, p, p);
  if (p >= 2)
    acc += multiply_metric_power(p - 2, R.form) * scalar_ratio<S>(1, factorial(p - 2));
  if (p >= 1)
    acc -= multiply_metric_power(p - 1, ricci(R)) * scalar_ratio<S>(1, factorial(p - 1));
  auto top = DoubleForm<S>::metric_power(n, p) * (scalar_curvature(R) / scalar_of<S>(2));
  acc += top * scalar_ratio<S>(1, factorial(p));
  return acc;
}

template <class S>
struct CurvatureHierarchy {
  AlgebraicCurvature<S> R;
  S scal;
  DoubleForm<S> ric, einstein, schouten, traceless_ric;
  std::vector<DoubleForm<S>> ddstar;  // index p = 0 .. n-2
};

template <class S>
CurvatureHierarchy<S> make_hierarchy(const AlgebraicCurvature<S>& R) {
  const int n = R.n();
  CurvatureHierarchy<S> h{R,
                          scalar_curvature(R),
                          ricci(R),
                          einstein_tensor(R),
                          schouten_tensor(R),
                          DoubleForm<S>(n, 1, 1),
                          {}};
  h.traceless_ric = h.ric - DoubleForm<S>::metric(n) * (h.scal / scalar_of<S>(n));
  h.ddstar.reserve(static_cast<std::size_t>(n - 1));
  for (int p = 0; p <= n - 2; ++p) h.ddstar.push_back(dd_star(R, p));
  return h;
}

// Recover R from w = *R*_2 (n >= 4):
//   R = w - g c(w)/(n-3) + g^2 c^2(w) / (2(n-2)(n-3)).
// The last term is forced to carry g^2 by bidegree.
template <class S>
AlgebraicCurvature<S> invert_from_dd_star2(const DoubleForm<S>& w) {
  const int n = w.n();
  if (w.p() != 2 || w.q() != 2) throw InputError("invert_from_dd_star2: needs a (2,2) grid");
  if (n < 4) throw RangeError("invert_from_dd_star2: needs n >= 4");
  auto c1 = contraction(w);
  auto c2 = contraction(c1).at(0, 0);
  auto out = w - multiply_metric_power(1, c1) * scalar_ratio<S>(1, n - 3);
  auto g2 = DoubleForm<S>::metric_power(n, 2);
  out += g2 * (c2 / scalar_of<S>(2 * (n - 2) * (n - 3)));
  return AlgebraicCurvature<S>::unchecked(std::move(out));
}

// ---------------------------------------------------------------------------
// products of R and the two-parameter family

// q-th product power R^q, a (2q,2q) grid; q >= 1.
template <class S>
DoubleForm<S> riemann_power(const AlgebraicCurvature<S>& R, int q) {
  if (q < 1) throw RangeError("riemann_power: needs q >= 1");
  if (2 * q > R.n()) throw RangeError("riemann_power: degree overflow");
  auto acc = R.form;
  for (int t = 1; t < q; ++t) acc = exterior_product(acc, R.form);
  return acc;
}

inline void require_pq(int n, int p, int q, const char* who) {
  if (q < 1 || 2 * q > n || p < 0 || p > n - 2 * q)
    throw RangeError(std::string(who) + ": needs q >= 1, 0 <= p <= n-2q");
}

// R^{(p,q)} = *(g^{n-2q-p} R^q) / (n-2q-p)!, a (p,p) grid.
template <class S>
DoubleForm<S> pq_curvature(const AlgebraicCurvature<S>& R, int p, int q) {
  const int n = R.n();
  require_pq(n, p, q, "pq_curvature");
  auto w = hodge_star(multiply_metric_power(n - 2 * q - p, riemann_power(R, q)));
  return w * scalar_ratio<S>(1, factorial(n - 2 * q - p));
}

// Contraction route: c^{n-2q-p}(* R^q) / (n-2q-p)!.
template <class S>
DoubleForm<S> pq_curvature_contract(const AlgebraicCurvature<S>& R, int p, int q) {
  const int n = R.n();
  require_pq(n, p, q, "pq_curvature_contract");
  auto w = contraction_power(hodge_star(riemann_power(R, q)), n - 2 * q - p);
  return w * scalar_ratio<S>(1, factorial(n - 2 * q - p));
}

// Alternating-trace route:
//   R^{(p,q)} = sum_{r=max(0,2q-p)}^{2q} (-1)^r/r! g^{p-2q+r}/(p-2q+r)! c^r(R^q).
template <class S>
DoubleForm<S> pq_curvature_alternating(const AlgebraicCurvature<S>& R, int p, int q) {
  const int n = R.n();
  require_pq(n, p, q, "pq_curvature_alternating");
  auto rq = riemann_power(R, q);
  DoubleForm<S> acc(n, p, p);
  auto tr = rq;  // c^r(R^q) built incrementally
  for (int r = 0; r <= 2 * q; ++r) {
    if (r > 0) tr = contraction(tr);
    const int gpow = p - 2 * q + r;
    if (gpow < 0) continue;  // negative metric powers drop out
    auto term = multiply_metric_power(gpow, tr);
    term *= scalar_ratio<S>((r % 2) ? -1 : 1, factorial(r) * factorial(gpow));
    acc += term;
  }
  return acc;
}

// Scalar member h_{2q} = R^{(0,q)}.
template <class S>
S gauss_bonnet(const AlgebraicCurvature<S>& R, int q) {
  return pq_curvature(R, 0, q).at(0, 0);
}

// h_4 in first norms: |R|^2 - |Ric|^2 + Scal^2/4 (exact in any scalar).
template <class S>
S h4_from_norms(const AlgebraicCurvature<S>& R) {
  const S r2 = inner_product(R.form, R.form);
  auto ric = ricci(R);
  const S ric2 = inner_product(ric, ric);
  const S sc = scalar_curvature(R);
  return r2 - ric2 + sc * sc / scalar_of<S>(4);
}

// h_4 as the pairing with the second double dual.
template <class S>
S h4_from_pairing(const AlgebraicCurvature<S>& R) {
  if (R.n() < 4) throw RangeError("h4_from_pairing: needs n >= 4");
  return inner_product(R.form, dd_star(R, 2));
}

// ---------------------------------------------------------------------------
// Einstein-Lovelock family

// T_{2q} = c^{2q}(R^q)/(2q)! g - c^{2q-1}(R^q)/(2q-1)!, valid for 2 <= 2q <= n;
// q = 1 gives the Einstein grid.  At 2q = n the value is identically zero
// (boundary case, kept computable).
template <class S>
DoubleForm<S> lovelock(const AlgebraicCurvature<S>& R, int q) {
  const int n = R.n();
  if (q == 0) return DoubleForm<S>::metric(n);  // conventional degree-zero member
  if (q < 1 || 2 * q > n) throw RangeError("lovelock: needs 1 <= q <= n/2");
  auto rq = riemann_power(R, q);
  auto c1 = contraction_power(rq, 2 * q - 1);  // (1,1)
  auto c0 = contraction(c1).at(0, 0);          // scalar
  auto out = DoubleForm<S>::metric(n) * (c0 / scalar_of<S>(factorial(2 * q)));
  out -= c1 * scalar_ratio<S>(1, factorial(2 * q - 1));
  return out;
}

// Second-order route for T_4 through the composition with *R*_2:
//   T_4 = (1/2) c^2(R o *R*_2) g - 2 c(R o *R*_2).
template <class S>
DoubleForm<S> lovelock4_via_composition(const AlgebraicCurvature<S>& R) {
  const int n = R.n();
  if (n < 4) throw RangeError("lovelock4_via_composition: needs n >= 4");
  auto comp = composition(R.form, dd_star(R, 2));
  auto c1 = contraction(comp);
  auto c2 = contraction(c1).at(0, 0);
  return DoubleForm<S>::metric(n) * (c2 / scalar_of<S>(2)) - c1 * scalar_of<S>(2);
}

// Residual of the contraction-of-composition identity
//   c(R o (g h)) = iota_h R + Ric o h
// for a symmetric (1,1) grid h; zero for every valid pair.
template <class S>
double iota_lemma_check(const AlgebraicCurvature<S>& R, const DoubleForm<S>& h) {
  if (h.p() != 1 || h.q() != 1) throw InputError("iota_lemma_check: h must be a (1,1) grid");
  auto lhs = contraction(composition(R.form, multiply_metric_power(1, h)));
  auto rhs = interior_iota(h, R.form) + composition(ricci(R), h);
  return residual(lhs, rhs);
}

// ---------------------------------------------------------------------------
// orthogonal decomposition and the shared-conformal-part expansion

template <class S>
struct Decomposition2 {
  S w0;                 // scalar part: R = w2 + g w1 + g^2 w0
  DoubleForm<S> w1;     // trace-free (1,1)
  DoubleForm<S> w2;     // conformal (trace-free (2,2)) part
};

template <class S>
Decomposition2<S> decompose2(const AlgebraicCurvature<S>& R) {
  const int n = R.n();
  if (n < 3) throw RangeError("decompose2: needs n >= 3");
  const S sc = scalar_curvature(R);
  auto g = DoubleForm<S>::metric(n);
  Decomposition2<S> d{sc / scalar_of<S>(2 * n * (n - 1)), DoubleForm<S>(n, 1, 1),
                      DoubleForm<S>(n, 2, 2)};
  d.w1 = (ricci(R) - g * (sc / scalar_of<S>(n))) * scalar_ratio<S>(1, n - 2);
  d.w2 = R.form - multiply_metric_power(1, d.w1) -
         DoubleForm<S>::metric_power(n, 2) * d.w0;
  return d;
}

template <class S>
DoubleForm<S> weyl_part(const AlgebraicCurvature<S>& R) {
  return decompose2(R).w2;
}

// *R*_p in decomposition parts:
//   *R*_p = g^{p-2} w2/(p-2)! - (n-p-1) g^{p-1} w1/(p-1)!
//           + (n-p)(n-p-1) g^p w0/p!,
// negative powers dropping out as usual.
template <class S>
DoubleForm<S> dd_star_from_parts(const Decomposition2<S>& d, int n, int p) {
  if (p < 0 || p > n - 2) throw RangeError("dd_star_from_parts: needs 0 <= p <= n-2");
  DoubleForm<S> acc(n, p, p);
  if (p >= 2) acc += multiply_metric_power(p - 2, d.w2) * scalar_ratio<S>(1, factorial(p - 2));
  if (p >= 1)
    acc -= multiply_metric_power(p - 1, d.w1) *
           scalar_ratio<S>(n - p - 1, factorial(p - 1));
  acc += DoubleForm<S>::metric_power(n, p) *
         (d.w0 * scalar_ratio<S>((n - p) * (n - p - 1), factorial(p)));
  return acc;
}

// General triangular recovery of trace-free parts: w = sum_i g^{k-i} om_i for a
// symmetric first-Bianchi (k,k) grid, recovered top-down by iterated
// contraction using c(g^a om) = g^a c(om) + a(n-2i-a+1) g^{a-1} om.
// Supported range: parts exist for i <= min(k, n-k).
template <class S>
std::vector<DoubleForm<S>> decompose_general(const DoubleForm<S>& w) {
  const int n = w.n(), k = w.p();
  if (w.p() != w.q()) throw InputError("decompose_general: needs a (k,k) grid");
  const int imax = std::min(k, n - k);

  // traces T_m = c^m(w) for m = 0..k
  std::vector<DoubleForm<S>> traces;
  traces.push_back(w);
  for (int m = 1; m <= k; ++m) traces.push_back(contraction(traces.back()));

  // mu(m, a, i) = prod_{t=0}^{m-1} (a-t)(n-2i-a+t+1): coefficient of
  // g^{a-m} om_i inside c^m(g^a om_i)
  auto mu = [&](int m, int a, int i) -> long long {
    long long r = 1;
    for (int t = 0; t < m; ++t) r *= static_cast<long long>(a - t) * (n - 2 * i - a + t + 1);
    return r;
  };

  std::vector<DoubleForm<S>> parts;
  for (int j = 0; j <= imax; ++j) {
    // T_{k-j} = sum_{i<=j} mu(k-j, k-i, i) g^{j-i} om_i
    DoubleForm<S> rhs = traces[static_cast<std::size_t>(k - j)];
    for (int i = 0; i < j; ++i)
      rhs -= multiply_metric_power(j - i, parts[static_cast<std::size_t>(i)]) *
             scalar_of<S>(mu(k - j, k - i, i));
    const long long lead = mu(k - j, k - j, j);
    if (lead == 0) throw RangeError("decompose_general: vanishing leading coefficient");
    parts.push_back(rhs * scalar_ratio<S>(1, lead));
  }
  return parts;
}

// Reconstruction sum_i g^{k-i} om_i for comparing against the input.
template <class S>
DoubleForm<S> recompose_general(const std::vector<DoubleForm<S>>& parts, int n, int k) {
  DoubleForm<S> acc(n, k, k);
  for (std::size_t i = 0; i < parts.size(); ++i)
    acc += multiply_metric_power(k - static_cast<int>(i), parts[i]);
  return acc;
}

// R^{(p,q)} from the trace-free parts om_i of R^q = sum_i g^{2q-i} om_i:
//   (n-2q-p)! R^{(p,q)} = sum_i (-1)^i ((n-p-i)!/(p-i)!) g^{p-i} om_i,
// the sum running to min(2q, n-2q, p).  Specializes at q = 1 to the
// shared-conformal-part expansion of *R*_p.
template <class S>
DoubleForm<S> pq_from_parts(const std::vector<DoubleForm<S>>& parts, int n, int p, int q) {
  require_pq(n, p, q, "pq_from_parts");
  DoubleForm<S> acc(n, p, p);
  const int imax = std::min({2 * q, n - 2 * q, p, static_cast<int>(parts.size()) - 1});
  for (int i = 0; i <= imax; ++i) {
    auto term = multiply_metric_power(p - i, parts[static_cast<std::size_t>(i)]);
    term *= scalar_ratio<S>(((i % 2) ? -1 : 1) * (factorial(n - p - i) / factorial(n - 2 * q - p)),
                            factorial(p - i));
    acc += term;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// sectional-trace scalars

// Gram-matrix orthonormality gate for the first p vectors of a family.
template <class S>
void require_orthonormal(const std::vector<std::vector<S>>& frame, int n, int p,
                         double tol = 1e-10) {
  if (static_cast<int>(frame.size()) < p) throw InputError("frame: too few vectors");
  for (int i = 0; i < p; ++i) {
    if (static_cast<int>(frame[static_cast<std::size_t>(i)].size()) != n)
      throw InputError("frame: vector length does not match dimension");
    for (int j = 0; j <= i; ++j) {
      S dot{};
      for (int t = 0; t < n; ++t)
        dot += frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] *
               frame[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(ScalarTraits<S>::to_double(dot) - want) > tol)
        throw InputError("frame: vectors are not orthonormal");
    }
  }
}

// s_p of the plane spanned by the first p vectors of an orthonormal family:
// twice the evaluation of *R*_p on that p-frame.
template <class S>
S p_curvature(const AlgebraicCurvature<S>& R, int p,
              const std::vector<std::vector<S>>& frame) {
  const int n = R.n();
  if (p < 0 || p > n - 2) throw RangeError("p_curvature: needs 0 <= p <= n-2");
  require_orthonormal(frame, n, p);
  auto w = dd_star(R, p);
  std::vector<std::vector<S>> head(frame.begin(), frame.begin() + p);
  return scalar_of<S>(2) * evaluate(w, head, head);
}

// Same scalar from first traces:
//   s_p = Scal - 2 sum_i Ric(e_i,e_i) + 2 sum_{i<j} R(e_i,e_j;e_i,e_j).
template <class S>
S p_curvature_trace_form(const AlgebraicCurvature<S>& R, int p,
                         const std::vector<std::vector<S>>& frame) {
  const int n = R.n();
  if (p < 2 || p > n - 2) throw RangeError("p_curvature_trace_form: needs 2 <= p <= n-2");
  require_orthonormal(frame, n, p);
  S acc = scalar_curvature(R);
  auto ric = ricci(R);
  for (int i = 0; i < p; ++i) {
    const std::vector<std::vector<S>> one{frame[static_cast<std::size_t>(i)]};
    acc -= scalar_of<S>(2) * evaluate(ric, one, one);
  }
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const std::vector<std::vector<S>> two{frame[static_cast<std::size_t>(i)],
                                            frame[static_cast<std::size_t>(j)]};
      acc += scalar_of<S>(2) * evaluate(R.form, two, two);
    }
  return acc;
}

// Dual scalar: 2 C_p = Scal - s_p on the orthogonal complement pairing.
template <class S>
S cp_curvature(const AlgebraicCurvature<S>& R, int p,
               const std::vector<std::vector<S>>& frame) {
  return (scalar_curvature(R) - p_curvature(R, p, frame)) / scalar_of<S>(2);
}

// Scal from the s_2 average over ordered basis-plane pairs, n >= 4:
//   Scal = sum_{i != j} s_2(e_i,e_j) / ((n-2)(n-3)).
template <class S>
S scal_from_s2(const AlgebraicCurvature<S>& R) {
  const int n = R.n();
  if (n < 4) throw RangeError("scal_from_s2: needs n >= 4");
  auto w2 = dd_star(R, 2);
  S acc{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      std::array<int, 2> t{i, j};
      acc += scalar_of<S>(2) * component(w2, t, t);
    }
  return acc / scalar_of<S>((n - 2) * (n - 3));
}

// ---------------------------------------------------------------------------
// middle-degree duality and spanning sets

// Middle-degree only (n = 2p): sup-norm defect |*w - sign w|; zero iff w is
// self-dual (sign = +1) resp. anti-self-dual (sign = -1).
template <class S>
double duality_defect(const DoubleForm<S>& w, int sign) {
  if (sign != 1 && sign != -1) throw InputError("duality_defect: sign must be +1 or -1");
  if (w.p() != w.q() || w.n() != 2 * w.p())
    throw RangeError("duality_defect: needs a middle-degree (p,p) grid, n = 2p");
  auto sw = hodge_star(w);
  return sign > 0 ? residual(sw, w) : residual_norm(sw + w);
}

// Spanning families of divergence-free (p,p) grids built linearly from R.
// Which members are divergence-free depends on two geometric flags of the
// underlying metric: constant scalar curvature, and harmonic conformal
// (trace-free) part, detected through its (1,1) potential.
template <class S>
std::vector<std::pair<std::string, DoubleForm<S>>> spanning_set(const AlgebraicCurvature<S>& R,
                                                                int p, bool weyl_harmonic,
                                                                bool scal_constant) {
  const int n = R.n();
  if (p < 1 || p > n - 2) throw RangeError("spanning_set: needs 1 <= p <= n-2");
  const S sc = scalar_curvature(R);
  std::vector<std::pair<std::string, DoubleForm<S>>> out;
  out.emplace_back("dd_star_p", dd_star(R, p));
  if (p == 1) {
    if (scal_constant) out.emplace_back("scal_metric", DoubleForm<S>::metric(n) * sc);
    return out;
  }
  if (weyl_harmonic && scal_constant) {
    out.emplace_back("star_metric_ricci",
                     hodge_star(multiply_metric_power(n - p - 1, ricci(R))));
    out.emplace_back("star_metric_scal",
                     hodge_star(DoubleForm<S>::metric_power(n, n - p) * sc));
  } else if (weyl_harmonic) {
    out.emplace_back("star_metric_schouten",
                     hodge_star(multiply_metric_power(n - p - 1, schouten_tensor(R))));
  } else if (scal_constant) {
    out.emplace_back("star_metric_scal",
                     hodge_star(DoubleForm<S>::metric_power(n, n - p) * sc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// degree bookkeeping

// Effective threshold: parts of the conformal decomposition reach R^{(p,q)}
// only for p >= min(2q, n-2q).
inline int effective_p_threshold(int n, int q) {
  if (q < 1 || 2 * q >= n) throw RangeError("effective_p_threshold: needs 2 <= 2q < n");
  return std::min(2 * q, n - 2 * q);
}

// d(n) = max over admissible q of that threshold; closed form by n mod 4.
inline int d_of_n(int n) {
  if (n < 3) throw RangeError("d_of_n: needs n >= 3");
  if (n % 2 == 1) return (n - 1) / 2;
  if (n % 4 == 0) return n / 2;
  return (n - 2) / 2;
}

inline int d_of_n_bruteforce(int n) {
  if (n < 3) throw RangeError("d_of_n_bruteforce: needs n >= 3");
  int best = 0;
  for (int q = 1; 2 * q < n; ++q) best = std::max(best, effective_p_threshold(n, q));
  return best;
}

}  // namespace curv
