// Chart-based numeric Riemannian geometry.  A MetricChart holds the metric as
// a coordinate function evaluable at four scalar levels (double and three
// nested dual-number levels), so every stage of the pipeline — connection,
// curvature, moving frame, covariant derivative — can be differentiated by
// lifting the scalar type instead of by symbolic work.
//
// Derivative engines:
//   dual     — forward-mode differentiation through the full pipeline (default)
//   analytic — closed-form first partials supplied with the chart; higher
//              orders still come from dual lifting of those partials
//   finite_difference — central differences at the base level, one Richardson
//              step, with a per-order step schedule (see kFdStep*); this
//              engine is a cross-check and never lifts scalars
//
// Conventions fixed here once:
//   coordinate curvature  Rc(i,j,k,l) = <R(d_i,d_j) d_k, d_l>
//   frame double form     R(a,b;c,d)  = <R(E_a,E_b) E_d, E_c>
// so that constant positive sectional curvature gives R = (k/2) g^2 in any
// orthonormal frame (calibrated against the polar two-sphere chart).
#pragma once

#include <array>
#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "curv/curvature.hpp"
#include "curv/dual.hpp"

namespace curv {

template <class S>
using Vec = std::vector<S>;
template <class S>
using Mat = std::vector<std::vector<S>>;

enum class DerivativeEngine { analytic, dual, finite_difference };

// Central-difference step schedule: differentiating the metric directly, a
// connection-level quantity, and a curvature-level field.  Steps grow with the
// depth of the quantity because each level already carries the roundoff of the
// one below; each application performs one Richardson extrapolation.  The
// triple (1e-3, 4e-3, 5e-3) balances roundoff amplification against the
// Richardson truncation term so that even third metric derivatives stay
// within 1e-6 of the dual-number values on every catalog chart.
inline constexpr double kFdStepMetric = 1e-3;
inline constexpr double kFdStepConnection = 4e-3;
inline constexpr double kFdStepField = 5e-3;

namespace detail {
template <class S>
struct ChartLevel;
template <>
struct ChartLevel<double> {
  static constexpr int value = 0;
};
template <>
struct ChartLevel<Dual1> {
  static constexpr int value = 1;
};
template <>
struct ChartLevel<Dual2> {
  static constexpr int value = 2;
};
template <>
struct ChartLevel<Dual3> {
  static constexpr int value = 3;
};
}  // namespace detail

class MetricChart {
 public:
  int n() const { return n_; }
  DerivativeEngine engine() const { return engine_; }
  void set_engine(DerivativeEngine e) {
    if (e == DerivativeEngine::analytic && !dg0_)
      throw InputError("MetricChart: no analytic partials attached");
    engine_ = e;
  }
  bool has_analytic() const { return static_cast<bool>(dg0_); }

  // metric value grid at any supported scalar level
  template <class S>
  Mat<S> metric(const Vec<S>& x) const {
    constexpr int level = detail::ChartLevel<S>::value;
    if (static_cast<int>(x.size()) != n_) throw InputError("MetricChart: bad point size");
    if constexpr (level == 0) return g0_(x);
    else if constexpr (level == 1) return g1_(x);
    else if constexpr (level == 2) return g2_(x);
    else return g3_(x);
  }

  // dg[k][i][j] = d_k g_ij at the level of S, routed through the active engine
  template <class S>
  std::vector<Mat<S>> metric_partials(const Vec<S>& x) const {
    constexpr int level = detail::ChartLevel<S>::value;
    const int n = n_;
    if (engine_ == DerivativeEngine::analytic) {
      if constexpr (level == 0) return dg0_(x);
      else if constexpr (level == 1) return dg1_(x);
      else if constexpr (level == 2) return dg2_(x);
      else throw NumericError("MetricChart: analytic partials not available this deep");
    }
    if (engine_ == DerivativeEngine::finite_difference) {
      if constexpr (level == 0) {
        auto diff = [&](double h) {
          std::vector<Mat<double>> out(static_cast<std::size_t>(n));
          for (int k = 0; k < n; ++k) {
            Vec<double> xp = x, xm = x;
            xp[static_cast<std::size_t>(k)] += h;
            xm[static_cast<std::size_t>(k)] -= h;
            auto gp = g0_(xp), gm = g0_(xm);
            Mat<double> d(static_cast<std::size_t>(n), Vec<double>(static_cast<std::size_t>(n)));
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (gp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                     gm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                    (2 * h);
            out[static_cast<std::size_t>(k)] = std::move(d);
          }
          return out;
        };
        auto coarse = diff(kFdStepMetric), fine = diff(kFdStepMetric / 2);
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              auto& f = fine[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(j)];
              f = (4 * f - coarse[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                               [static_cast<std::size_t>(j)]) / 3;
            }
        return fine;
      } else {
        throw NumericError("MetricChart: finite differences run at the base level only");
      }
    }
    // dual lifting: one more nesting level than the caller's
    if constexpr (level <= 2) {
      using L = Dual<S>;
      std::vector<Mat<S>> out(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k) {
        Vec<L> xl(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m)
          xl[static_cast<std::size_t>(m)] =
              L(x[static_cast<std::size_t>(m)],
                m == k ? scalar_of<S>(1) : scalar_of<S>(0));
        auto G = metric(xl);
        Mat<S> d(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                G[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].b;
        out[static_cast<std::size_t>(k)] = std::move(d);
      }
      return out;
    } else {
      throw NumericError("MetricChart: derivative order exceeds the supported nesting depth");
    }
  }

  // Build a chart from one scalar-generic metric function Vec<S> -> Mat<S>.
  template <class F>
  static MetricChart from_metric(int n, F f,
                                 DerivativeEngine e = DerivativeEngine::dual) {
    if (n < 1 || n > kMaxDim) throw InputError("MetricChart: bad dimension");
    MetricChart c;
    c.n_ = n;
    c.engine_ = e;
    c.g0_ = [f](const Vec<double>& x) { return f(x); };
    c.g1_ = [f](const Vec<Dual1>& x) { return f(x); };
    c.g2_ = [f](const Vec<Dual2>& x) { return f(x); };
    c.g3_ = [f](const Vec<Dual3>& x) { return f(x); };
    if (e == DerivativeEngine::analytic)
      throw InputError("MetricChart: analytic engine needs partials; use from_metric_analytic");
    return c;
  }

  // Same, with closed-form first partials df: Vec<S> -> dg[k][i][j].
  template <class F, class DF>
  static MetricChart from_metric_analytic(int n, F f, DF df,
                                          DerivativeEngine e = DerivativeEngine::analytic) {
    MetricChart c = from_metric(n, f, DerivativeEngine::dual);
    c.dg0_ = [df](const Vec<double>& x) { return df(x); };
    c.dg1_ = [df](const Vec<Dual1>& x) { return df(x); };
    c.dg2_ = [df](const Vec<Dual2>& x) { return df(x); };
    c.engine_ = e;
    return c;
  }

 private:
  int n_ = 0;
  DerivativeEngine engine_ = DerivativeEngine::dual;
  std::function<Mat<double>(const Vec<double>&)> g0_;
  std::function<Mat<Dual1>(const Vec<Dual1>&)> g1_;
  std::function<Mat<Dual2>(const Vec<Dual2>&)> g2_;
  std::function<Mat<Dual3>(const Vec<Dual3>&)> g3_;
  std::function<std::vector<Mat<double>>(const Vec<double>&)> dg0_;
  std::function<std::vector<Mat<Dual1>>(const Vec<Dual1>&)> dg1_;
  std::function<std::vector<Mat<Dual2>>(const Vec<Dual2>&)> dg2_;
};

// ---------------------------------------------------------------------------
// dense linear algebra on small symmetric positive-definite grids

template <class S>
Mat<S> cholesky_lower(const Mat<S>& g) {
  const int n = static_cast<int>(g.size());
  Mat<S> L(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n), scalar_of<S>(0)));
  for (int j = 0; j < n; ++j) {
    S d = g[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    for (int t = 0; t < j; ++t)
      d -= L[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] *
           L[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
    if (!(value_of(d) > 0)) throw NumericError("cholesky: grid is not positive definite");
    L[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      S s = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int t = 0; t < j; ++t)
        s -= L[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] *
             L[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          s / L[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
    }
  }
  return L;
}

template <class S>
Mat<S> spd_inverse(const Mat<S>& g) {
  const int n = static_cast<int>(g.size());
  auto L = cholesky_lower(g);
  Mat<S> inv(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n), scalar_of<S>(0)));
  Vec<S> y(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    for (int i = 0; i < n; ++i) {
      S s = (i == c) ? scalar_of<S>(1) : scalar_of<S>(0);
      for (int t = 0; t < i; ++t)
        s -= L[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] * y[static_cast<std::size_t>(t)];
      y[static_cast<std::size_t>(i)] = s / L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    for (int i = n - 1; i >= 0; --i) {
      S s = y[static_cast<std::size_t>(i)];
      for (int t = i + 1; t < n; ++t)
        s -= L[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] *
             inv[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
      inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
          s / L[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
  }
  return inv;
}

// g-inner product of coordinate vectors
template <class S>
S metric_dot(const Mat<S>& g, const Vec<S>& v, const Vec<S>& w) {
  const int n = static_cast<int>(g.size());
  S acc = scalar_of<S>(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      acc += v[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
             w[static_cast<std::size_t>(j)];
  return acc;
}

// Moving orthonormal frame: Gram-Schmidt of the coordinate basis in a fixed
// order; rows are frame vectors in coordinates.  Smooth in x wherever g is.
template <class S>
Mat<S> orthonormal_frame(const Mat<S>& g) {
  const int n = static_cast<int>(g.size());
  Mat<S> F;
  F.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    Vec<S> v(static_cast<std::size_t>(n), scalar_of<S>(0));
    v[static_cast<std::size_t>(a)] = scalar_of<S>(1);
    for (const auto& u : F) {
      S c = metric_dot(g, v, u);
      for (int t = 0; t < n; ++t) v[static_cast<std::size_t>(t)] -= c * u[static_cast<std::size_t>(t)];
    }
    S norm2 = metric_dot(g, v, v);
    if (!(value_of(norm2) > 0)) throw NumericError("orthonormal_frame: degenerate metric");
    S inv = scalar_of<S>(1) / sqrt(norm2);
    for (auto& t : v) t *= inv;
    F.push_back(std::move(v));
  }
  return F;
}

// ---------------------------------------------------------------------------
// connection and curvature in coordinates

// gam[k][i][j] = Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
template <class S>
std::vector<Mat<S>> christoffel(const MetricChart& chart, const Vec<S>& x) {
  const int n = chart.n();
  auto g = chart.metric(x);
  auto ginv = spd_inverse(g);
  auto dg = chart.metric_partials(x);
  std::vector<Mat<S>> gam(static_cast<std::size_t>(n),
                          Mat<S>(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n))));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        S acc = scalar_of<S>(0);
        for (int l = 0; l < n; ++l)
          acc += ginv[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] *
                 (dg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] +
                  dg[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)][static_cast<std::size_t>(l)] -
                  dg[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        acc = acc / scalar_of<S>(2);
        gam[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
        gam[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = acc;
      }
  return gam;
}

// dgam[m][k][i][j] = d_m Gamma^k_ij, through the engine of the chart
template <class S>
std::vector<std::vector<Mat<S>>> christoffel_partials(const MetricChart& chart, const Vec<S>& x) {
  const int n = chart.n();
  std::vector<std::vector<Mat<S>>> out(static_cast<std::size_t>(n));
  if (chart.engine() == DerivativeEngine::finite_difference) {
    if constexpr (detail::ChartLevel<S>::value == 0) {
      auto diff = [&](double h) {
        std::vector<std::vector<Mat<double>>> d(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
          Vec<double> xp = x, xm = x;
          xp[static_cast<std::size_t>(m)] += h;
          xm[static_cast<std::size_t>(m)] -= h;
          auto gp = christoffel(chart, xp), gm = christoffel(chart, xm);
          for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                gp[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (gp[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                     gm[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) /
                    (2 * h);
          d[static_cast<std::size_t>(m)] = std::move(gp);
        }
        return d;
      };
      auto coarse = diff(kFdStepConnection), fine = diff(kFdStepConnection / 2);
      for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              auto& f = fine[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)]
                            [static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
              f = (4 * f - coarse[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)]
                               [static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) / 3;
            }
      return fine;
    } else {
      throw NumericError("christoffel_partials: finite differences run at the base level only");
    }
  }
  if constexpr (detail::ChartLevel<S>::value <= 1) {
    using L = Dual<S>;
    for (int m = 0; m < n; ++m) {
      Vec<L> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] =
            L(x[static_cast<std::size_t>(t)], t == m ? scalar_of<S>(1) : scalar_of<S>(0));
      auto G = christoffel(chart, xl);
      std::vector<Mat<S>> d(static_cast<std::size_t>(n),
                            Mat<S>(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n))));
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            d[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                G[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].b;
      out[static_cast<std::size_t>(m)] = std::move(d);
    }
    return out;
  } else {
    throw NumericError("christoffel_partials: derivative order exceeds the supported nesting depth");
  }
}

// Coordinate curvature values Rc(i,j,k,l) = <R(d_i,d_j) d_k, d_l>.
template <class S>
struct Coord4 {
  int n = 0;
  std::vector<S> v;
  explicit Coord4(int dim)
      : n(dim), v(static_cast<std::size_t>(dim * dim * dim * dim), scalar_of<S>(0)) {}
  S& at(int i, int j, int k, int l) {
    return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  const S& at(int i, int j, int k, int l) const {
    return v[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

template <class S>
Coord4<S> riemann_coord(const MetricChart& chart, const Vec<S>& x) {
  const int n = chart.n();
  auto g = chart.metric(x);
  auto gam = christoffel(chart, x);
  auto dgam = christoffel_partials(chart, x);
  Coord4<S> rc(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // up^m = d_i Gamma^m_jk - d_j Gamma^m_ik + Gamma^m_it Gamma^t_jk
        //        - Gamma^m_jt Gamma^t_ik
        Vec<S> up(static_cast<std::size_t>(n), scalar_of<S>(0));
        for (int m = 0; m < n; ++m) {
          S acc = dgam[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)]
                      [static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                  dgam[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)]
                      [static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          for (int t = 0; t < n; ++t)
            acc += gam[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] *
                       gam[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                   gam[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] *
                       gam[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
          up[static_cast<std::size_t>(m)] = acc;
        }
        for (int l = 0; l < n; ++l) {
          S low = scalar_of<S>(0);
          for (int m = 0; m < n; ++m)
            low += g[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)] * up[static_cast<std::size_t>(m)];
          rc.at(i, j, k, l) = low;
          rc.at(j, i, k, l) = -low;
        }
      }
  return rc;
}

// Curvature as a frame (2,2) double form: R(a,b;c,d) = <R(E_a,E_b) E_d, E_c>.
template <class S>
DoubleForm<S> curvature_in_frame(const MetricChart& chart, const Vec<S>& x) {
  const int n = chart.n();
  auto rc = riemann_coord(chart, x);
  auto F = orthonormal_frame(chart.metric(x));
  const auto& pairs = IndexSpace::get(n, 2);
  DoubleForm<S> w(n, 2, 2);
  for (int ri = 0; ri < pairs.size(); ++ri) {
    const int a = pairs.at(ri)[0], b = pairs.at(ri)[1];
    for (int ci = 0; ci < pairs.size(); ++ci) {
      const int c = pairs.at(ci)[0], d = pairs.at(ci)[1];
      S acc = scalar_of<S>(0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const S fab = F[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                        F[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)];
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              acc += fab * F[static_cast<std::size_t>(d)][static_cast<std::size_t>(k)] *
                     F[static_cast<std::size_t>(c)][static_cast<std::size_t>(l)] * rc.at(i, j, k, l);
        }
      w.at(ri, ci) = acc;
    }
  }
  return w;
}

// Frame connection coefficients omega[a][b][c] = <nabla_{E_a} E_b, E_c>.
template <class S>
std::vector<Mat<S>> frame_connection(const MetricChart& chart, const Vec<S>& x) {
  const int n = chart.n();
  auto g = chart.metric(x);
  auto gam = christoffel(chart, x);
  auto F = orthonormal_frame(g);

  // dF[m][b][v] = d_m F_b^v
  std::vector<Mat<S>> dF(static_cast<std::size_t>(n));
  if (chart.engine() == DerivativeEngine::finite_difference) {
    if constexpr (detail::ChartLevel<S>::value == 0) {
      auto diff = [&](double h) {
        std::vector<Mat<double>> d(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) {
          Vec<double> xp = x, xm = x;
          xp[static_cast<std::size_t>(m)] += h;
          xm[static_cast<std::size_t>(m)] -= h;
          auto Fp = orthonormal_frame(chart.metric(xp));
          auto Fm = orthonormal_frame(chart.metric(xm));
          Mat<double> dd(static_cast<std::size_t>(n), Vec<double>(static_cast<std::size_t>(n)));
          for (int b = 0; b < n; ++b)
            for (int v = 0; v < n; ++v)
              dd[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)] =
                  (Fp[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)] -
                   Fm[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)]) /
                  (2 * h);
          d[static_cast<std::size_t>(m)] = std::move(dd);
        }
        return d;
      };
      auto coarse = diff(kFdStepMetric), fine = diff(kFdStepMetric / 2);
      for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b)
          for (int v = 0; v < n; ++v)
            fine[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)][static_cast<std::size_t>(v)] =
                (4 * fine[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)]
                         [static_cast<std::size_t>(v)] -
                 coarse[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)]
                       [static_cast<std::size_t>(v)]) / 3;
      dF = std::move(fine);
    } else {
      throw NumericError("frame_connection: finite differences run at the base level only");
    }
  } else if constexpr (detail::ChartLevel<S>::value <= 2) {
    using L = Dual<S>;
    for (int m = 0; m < n; ++m) {
      Vec<L> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] =
            L(x[static_cast<std::size_t>(t)], t == m ? scalar_of<S>(1) : scalar_of<S>(0));
      auto Fl = orthonormal_frame(chart.metric(xl));
      Mat<S> dd(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n)));
      for (int b = 0; b < n; ++b)
        for (int v = 0; v < n; ++v)
          dd[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)] =
              Fl[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)].b;
      dF[static_cast<std::size_t>(m)] = std::move(dd);
    }
  } else {
    throw NumericError("frame_connection: derivative order exceeds the supported nesting depth");
  }

  std::vector<Mat<S>> omega(static_cast<std::size_t>(n),
                            Mat<S>(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n))));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      // covariant derivative of the frame field along E_a, in coordinates
      Vec<S> nab(static_cast<std::size_t>(n), scalar_of<S>(0));
      for (int v = 0; v < n; ++v) {
        S acc = scalar_of<S>(0);
        for (int m = 0; m < n; ++m) {
          S term = dF[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)][static_cast<std::size_t>(v)];
          for (int l = 0; l < n; ++l)
            term += F[static_cast<std::size_t>(b)][static_cast<std::size_t>(l)] *
                    gam[static_cast<std::size_t>(v)][static_cast<std::size_t>(m)][static_cast<std::size_t>(l)];
          acc += F[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] * term;
        }
        nab[static_cast<std::size_t>(v)] = acc;
      }
      for (int c = 0; c < n; ++c) {
        S acc = scalar_of<S>(0);
        for (int v = 0; v < n; ++v)
          for (int r = 0; r < n; ++r)
            acc += nab[static_cast<std::size_t>(v)] *
                   g[static_cast<std::size_t>(v)][static_cast<std::size_t>(r)] *
                   F[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
        omega[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)] = acc;
      }
    }
  return omega;
}

// Double-level snapshot of everything frame-based at one point.
struct FramedCurvature {
  Vec<double> point;
  Mat<double> frame;                     // rows = frame vectors in coordinates
  AlgebraicCurvature<double> R;
  std::vector<Mat<double>> connection;   // [a][b][c] = omega^c_{ab}
};

inline FramedCurvature riemann_at(const MetricChart& chart, const Vec<double>& x) {
  auto w = curvature_in_frame(chart, x);
  return FramedCurvature{x, orthonormal_frame(chart.metric(x)),
                         AlgebraicCurvature<double>::checked(std::move(w), 1e-8),
                         frame_connection(chart, x)};
}

// ---------------------------------------------------------------------------
// covariant derivative of frame-component fields

// Field: generic callable Vec<S> -> DoubleForm<S> for S in {double, Dual1},
// e.g. a lambda running the chart pipeline and some double-form algebra.
// Returns {nabla_{E_a} T} for a = 0..n-1, as frame-component grids.
template <class Field>
std::vector<DoubleForm<double>> covariant_derivative(const MetricChart& chart, Field&& field,
                                                     const Vec<double>& x) {
  const int n = chart.n();
  const DoubleForm<double> T0 = field(x);
  const int p = T0.p(), q = T0.q();
  auto F = orthonormal_frame(chart.metric(x));
  auto omega = frame_connection(chart, x);
  const auto& rows = IndexSpace::get(n, p);
  const auto& cols = IndexSpace::get(n, q);

  std::vector<DoubleForm<double>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    DoubleForm<double> da(n, p, q);
    if (chart.engine() == DerivativeEngine::finite_difference) {
      auto diff = [&](double h) {
        Vec<double> xp = x, xm = x;
        for (int t = 0; t < n; ++t) {
          xp[static_cast<std::size_t>(t)] += h * F[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
          xm[static_cast<std::size_t>(t)] -= h * F[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
        }
        auto Tp = field(xp), Tm = field(xm);
        Tp -= Tm;
        Tp *= 1.0 / (2 * h);
        return Tp;
      };
      auto coarse = diff(kFdStepField);
      da = diff(kFdStepField / 2);
      da *= 4.0 / 3.0;
      coarse *= 1.0 / 3.0;
      da -= coarse;
    } else if constexpr (std::is_invocable_v<Field&, const Vec<Dual1>&>) {
      Vec<Dual1> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] =
            Dual1(x[static_cast<std::size_t>(t)], F[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)]);
      const DoubleForm<Dual1> Tl = field(xl);
      for (int ri = 0; ri < rows.size(); ++ri)
        for (int ci = 0; ci < cols.size(); ++ci) da.at(ri, ci) = Tl.at(ri, ci).b;
    } else {
      throw InputError(
          "covariant_derivative: field cannot be dual-lifted; switch the chart to the "
          "finite_difference engine");
    }

    // connection corrections, one slot at a time
    std::array<int, 16> tup{};
    for (int ri = 0; ri < rows.size(); ++ri) {
      const MultiIndex& I = rows.at(ri);
      for (int ci = 0; ci < cols.size(); ++ci) {
        const MultiIndex& J = cols.at(ci);
        double corr = 0.0;
        for (int t = 0; t < p; ++t) {
          for (int b = 0; b < n; ++b) {
            const double om =
                omega[static_cast<std::size_t>(a)][static_cast<std::size_t>(I[t])][static_cast<std::size_t>(b)];
            if (om == 0.0) continue;
            for (int s = 0; s < p; ++s) tup[static_cast<std::size_t>(s)] = I[s];
            tup[static_cast<std::size_t>(t)] = b;
            std::array<int, 16> jt{};
            for (int s = 0; s < q; ++s) jt[static_cast<std::size_t>(s)] = J[s];
            corr += om * component(T0, std::span<const int>(tup.data(), static_cast<std::size_t>(p)),
                                   std::span<const int>(jt.data(), static_cast<std::size_t>(q)));
          }
        }
        for (int t = 0; t < q; ++t) {
          for (int b = 0; b < n; ++b) {
            const double om =
                omega[static_cast<std::size_t>(a)][static_cast<std::size_t>(J[t])][static_cast<std::size_t>(b)];
            if (om == 0.0) continue;
            std::array<int, 16> it{};
            for (int s = 0; s < p; ++s) it[static_cast<std::size_t>(s)] = I[s];
            for (int s = 0; s < q; ++s) tup[static_cast<std::size_t>(s)] = J[s];
            tup[static_cast<std::size_t>(t)] = b;
            corr += om * component(T0, std::span<const int>(it.data(), static_cast<std::size_t>(p)),
                                   std::span<const int>(tup.data(), static_cast<std::size_t>(q)));
          }
        }
        da.at(ri, ci) -= corr;
      }
    }
    out.push_back(std::move(da));
  }
  return out;
}

// divergence: (delta T)(x_2..x_p; y..) = -sum_a (nabla_{E_a} T)(E_a, x_2..; y..)
template <class Field>
DoubleForm<double> divergence_delta(const MetricChart& chart, Field&& field, const Vec<double>& x) {
  const int n = chart.n();
  auto nab = covariant_derivative(chart, field, x);
  const int p = nab[0].p(), q = nab[0].q();
  if (p < 1) throw RangeError("divergence_delta: needs p >= 1");
  DoubleForm<double> out(n, p - 1, q);
  const auto& rows = IndexSpace::get(n, p - 1);
  const auto& cols = IndexSpace::get(n, q);
  std::array<int, 16> tup{};
  std::array<int, 16> jt{};
  for (int ri = 0; ri < rows.size(); ++ri) {
    const MultiIndex& I = rows.at(ri);
    for (int ci = 0; ci < cols.size(); ++ci) {
      const MultiIndex& J = cols.at(ci);
      for (int s = 0; s < q; ++s) jt[static_cast<std::size_t>(s)] = J[s];
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        tup[0] = a;
        for (int s = 0; s < p - 1; ++s) tup[static_cast<std::size_t>(s + 1)] = I[s];
        acc += component(nab[static_cast<std::size_t>(a)],
                         std::span<const int>(tup.data(), static_cast<std::size_t>(p)),
                         std::span<const int>(jt.data(), static_cast<std::size_t>(q)));
      }
      out.at(ri, ci) = -acc;
    }
  }
  return out;
}

// alternated covariant derivative over the first factor:
// (D T)(x_1..x_{p+1}; y..) = sum_j (-1)^{j+1} (nabla_{x_j} T)(.. x_j dropped ..; y..)
template <class Field>
DoubleForm<double> bianchi_sum_D(const MetricChart& chart, Field&& field, const Vec<double>& x) {
  const int n = chart.n();
  auto nab = covariant_derivative(chart, field, x);
  const int p = nab[0].p(), q = nab[0].q();
  if (p + 1 > n) throw RangeError("bianchi_sum_D: degree overflow");
  DoubleForm<double> out(n, p + 1, q);
  const auto& rows = IndexSpace::get(n, p + 1);
  const auto& cols = IndexSpace::get(n, q);
  for (int ri = 0; ri < rows.size(); ++ri) {
    const MultiIndex& K = rows.at(ri);
    for (int ci = 0; ci < cols.size(); ++ci) {
      const MultiIndex& J = cols.at(ci);
      double acc = 0.0;
      for (int t = 0; t <= p; ++t) {
        MultiIndex rest;
        for (int s = 0; s <= p; ++s)
          if (s != t) rest.push_back(K[s]);
        const double term = nab[static_cast<std::size_t>(K[t])].at(rest, J);
        acc += (t % 2 == 0) ? term : -term;
      }
      out.at(ri, ci) = acc;
    }
  }
  return out;
}

// star-conjugated divergence; equals (-1)^p D on (p,p) fields
template <class Field>
DoubleForm<double> star_delta_star(const MetricChart& chart, Field&& field, const Vec<double>& x) {
  auto starred = [&](const auto& pt) { return hodge_star(field(pt)); };
  return hodge_star(divergence_delta(chart, starred, x));
}

// frame components of the gradient of a scalar chart function
template <class F>
Vec<double> frame_gradient(const MetricChart& chart, F&& f, const Vec<double>& x) {
  const int n = chart.n();
  auto F0 = orthonormal_frame(chart.metric(x));
  Vec<double> out(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    if (chart.engine() == DerivativeEngine::finite_difference) {
      auto diff = [&](double h) {
        Vec<double> xp = x, xm = x;
        for (int t = 0; t < n; ++t) {
          xp[static_cast<std::size_t>(t)] += h * F0[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
          xm[static_cast<std::size_t>(t)] -= h * F0[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
        }
        return (f(xp) - f(xm)) / (2 * h);
      };
      out[static_cast<std::size_t>(a)] =
          (4 * diff(kFdStepField / 2) - diff(kFdStepField)) / 3;
    } else if constexpr (std::is_invocable_v<F&, const Vec<Dual1>&>) {
      Vec<Dual1> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] =
            Dual1(x[static_cast<std::size_t>(t)], F0[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)]);
      out[static_cast<std::size_t>(a)] = f(xl).b;
    } else {
      throw InputError(
          "frame_gradient: function cannot be dual-lifted; switch the chart to the "
          "finite_difference engine");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// cross-engine probe of raw metric partials

// Flattened d^order g_ij values over all coordinate direction tuples, computed
// with a chosen engine regardless of the chart's active one.  Orders 1..3.
std::vector<double> metric_derivative_probe(const MetricChart& chart, const Vec<double>& x,
                                            int order, DerivativeEngine engine);

}  // namespace curv
