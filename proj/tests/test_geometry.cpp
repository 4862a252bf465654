#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "curv/geometry.hpp"
#include "curv/models.hpp"

using curv::AlgebraicCurvature;
using curv::DerivativeEngine;
using curv::DoubleForm;
using curv::Mat;
using curv::MetricChart;
using curv::Model;
using curv::Rational;
using curv::Vec;

namespace {

double worst_norm(const std::vector<DoubleForm<double>>& fam) {
  double w = 0;
  for (const auto& d : fam) w = std::max(w, curv::residual_norm(d));
  return w;
}

double max_abs(const std::vector<double>& v) {
  double w = 0;
  for (double t : v) w = std::max(w, std::abs(t));
  return w;
}

DoubleForm<double> space_form_grid(int n, double k) {
  auto w = DoubleForm<double>::metric_power(n, 2);
  w *= k / 2;
  return w;
}

// worst deviation of frame^T g frame from the identity
double frame_gram_defect(const MetricChart& chart, const Vec<double>& x) {
  auto g = chart.metric(x);
  auto F = curv::orthonormal_frame(g);
  const int n = chart.n();
  double w = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double dot = curv::metric_dot(g, F[static_cast<std::size_t>(a)],
                                          F[static_cast<std::size_t>(b)]);
      w = std::max(w, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return w;
}

// point -> frame curvature grid, evaluable at double and first dual level
auto curvature_field(const MetricChart& chart) {
  return [&chart](const auto& x) { return curv::curvature_in_frame(chart, x); };
}

double engine_probe_gap(const MetricChart& chart, const Vec<double>& x, int order,
                        DerivativeEngine a, DerivativeEngine b) {
  auto va = curv::metric_derivative_probe(chart, x, order, a);
  auto vb = curv::metric_derivative_probe(chart, x, order, b);
  double w = 0;
  for (std::size_t t = 0; t < va.size(); ++t) w = std::max(w, std::abs(va[t] - vb[t]));
  return w;
}

}  // namespace

TEST_CASE("connection coefficients: flat chart, polar calibration, engine agreement") {
  Model flat = curv::make_model("euclidean:n=4");
  for (const auto& x : flat.sample_points) {
    auto gam = curv::christoffel(flat.chart, x);
    double w = 0;
    for (const auto& m : gam)
      for (const auto& row : m)
        for (double v : row) w = std::max(w, std::abs(v));
    CHECK(w == 0.0);
  }

  // closed-form check on the polar two-sphere chart g = diag(r^2, r^2 sin^2)
  Model polar = curv::make_model("polar2:r=1");
  const double th = 1.1;
  Vec<double> x = {th, 0.4};
  auto gam = curv::christoffel(polar.chart, x);
  CHECK(std::abs(gam[0][1][1] - (-std::sin(th) * std::cos(th))) <= 1e-12);
  CHECK(std::abs(gam[1][0][1] - std::cos(th) / std::sin(th)) <= 1e-12);
  CHECK(std::abs(gam[1][1][0] - std::cos(th) / std::sin(th)) <= 1e-12);
  CHECK(gam[0][0][0] == 0.0);
  CHECK(gam[0][0][1] == 0.0);
  CHECK(gam[1][0][0] == 0.0);

  // first-order dual vs finite-difference agreement through christoffel
  Model pf = curv::make_model("perturbed_flat:n=4,seed=1,eps=0.05,deg=2");
  MetricChart fd = pf.chart;
  fd.set_engine(DerivativeEngine::finite_difference);
  auto gd = curv::christoffel(pf.chart, pf.sample_points[0]);
  auto gf = curv::christoffel(fd, pf.sample_points[0]);
  double w = 0;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        w = std::max(w, std::abs(gd[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(j)] -
                                 gf[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(j)]));
  CHECK(w <= 1e-6);
}

TEST_CASE("metric derivative probes agree across all three engines, orders 1..3") {
  const std::vector<std::string> specs = {"sphere:n=3,r=1", "hyperbolic:n=3,r=1", "polar2:r=1",
                                          "perturbed_flat:n=4,seed=1,eps=0.05,deg=2",
                                          "product(sphere:n=2,r=1|hyperbolic:n=2,r=1)"};
  for (const auto& spec : specs) {
    CAPTURE(spec);
    Model m = curv::make_model(spec);
    const Vec<double>& x = m.sample_points[2];
    for (int order = 1; order <= 3; ++order) {
      CAPTURE(order);
      CHECK(engine_probe_gap(m.chart, x, order, DerivativeEngine::analytic,
                             DerivativeEngine::dual) <= 1e-10);
      CHECK(engine_probe_gap(m.chart, x, order, DerivativeEngine::dual,
                             DerivativeEngine::finite_difference) <= 1e-6);
      CHECK(engine_probe_gap(m.chart, x, order, DerivativeEngine::analytic,
                             DerivativeEngine::finite_difference) <= 1e-6);
    }
  }
  Model m = curv::make_model("sphere:n=3,r=1");
  CHECK_THROWS_AS(curv::metric_derivative_probe(m.chart, m.sample_points[0], 0,
                                                DerivativeEngine::dual),
                  curv::RangeError);
  CHECK_THROWS_AS(curv::metric_derivative_probe(m.chart, m.sample_points[0], 4,
                                                DerivativeEngine::dual),
                  curv::RangeError);
}

TEST_CASE("curvature at a point reproduces space forms in the moving frame") {
  Model s4 = curv::make_model("sphere:n=4,r=1");
  for (const auto& x : s4.sample_points) {
    auto fc = curv::riemann_at(s4.chart, x);
    CHECK(curv::residual(fc.R.form, space_form_grid(4, 1.0)) <= 1e-8);
    CHECK(std::abs(curv::scalar_curvature(fc.R) - 12.0) <= 1e-8);
  }

  Model h4 = curv::make_model("hyperbolic:n=4,r=1");
  auto fc = curv::riemann_at(h4.chart, h4.sample_points[3]);
  CHECK(curv::residual(fc.R.form, space_form_grid(4, -1.0)) <= 1e-8);

  Model s2 = curv::make_model("polar2:r=1");
  auto fc2 = curv::riemann_at(s2.chart, s2.sample_points[0]);
  CHECK(curv::residual(fc2.R.form, space_form_grid(2, 1.0)) <= 1e-10);

  Model flat = curv::make_model("euclidean:n=4");
  auto fc0 = curv::riemann_at(flat.chart, flat.sample_points[0]);
  CHECK(curv::residual_norm(fc0.R.form) == 0.0);

  // radius scaling: sectional curvature 1/r^2
  Model s4r2 = curv::make_model("sphere:n=4,r=2");
  auto fcr = curv::riemann_at(s4r2.chart, s4r2.sample_points[1]);
  CHECK(curv::residual(fcr.R.form, space_form_grid(4, 0.25)) <= 1e-8);
}

TEST_CASE("framed curvature invariants hold on every catalog model") {
  for (const auto& spec : curv::model_catalog()) {
    CAPTURE(spec);
    Model m = curv::make_model(spec);
    for (int pick : {1, 3}) {
      const auto& x = m.sample_points[static_cast<std::size_t>(pick)];
      auto fc = curv::riemann_at(m.chart, x);  // checked() at 1e-8 inside
      CHECK(curv::symmetry_defect(fc.R.form) <= 1e-8);
      if (m.n >= 3)
        CHECK(curv::residual_norm(curv::first_bianchi_sum(fc.R.form)) <= 1e-8);
      CHECK(frame_gram_defect(m.chart, x) <= 1e-10);
      // metric connection in an orthonormal frame: omega antisymmetric in (b,c)
      double w = 0;
      for (int a = 0; a < m.n; ++a)
        for (int b = 0; b < m.n; ++b)
          for (int c = 0; c < m.n; ++c)
            w = std::max(w, std::abs(fc.connection[static_cast<std::size_t>(a)]
                                                  [static_cast<std::size_t>(b)]
                                                  [static_cast<std::size_t>(c)] +
                                     fc.connection[static_cast<std::size_t>(a)]
                                                  [static_cast<std::size_t>(c)]
                                                  [static_cast<std::size_t>(b)]));
      CHECK(w <= 1e-8);
    }
  }
}

TEST_CASE("product charts produce block curvature with flat mixed planes") {
  Model ss = curv::make_model("product(sphere:n=2,r=1|sphere:n=2,r=1)");
  auto fc = curv::riemann_at(ss.chart, ss.sample_points[1]);
  CHECK(std::abs(curv::component(fc.R.form, {0, 1}, {0, 1}) - 1.0) <= 1e-8);
  CHECK(std::abs(curv::component(fc.R.form, {2, 3}, {2, 3}) - 1.0) <= 1e-8);
  CHECK(std::abs(curv::component(fc.R.form, {0, 2}, {0, 2})) <= 1e-10);
  CHECK(std::abs(curv::component(fc.R.form, {1, 3}, {1, 3})) <= 1e-10);
  CHECK(std::abs(curv::scalar_curvature(fc.R) - 4.0) <= 1e-8);

  Model sh = curv::make_model("product(sphere:n=2,r=1|hyperbolic:n=2,r=1)");
  auto fc2 = curv::riemann_at(sh.chart, sh.sample_points[2]);
  CHECK(std::abs(curv::component(fc2.R.form, {0, 1}, {0, 1}) - 1.0) <= 1e-8);
  CHECK(std::abs(curv::component(fc2.R.form, {2, 3}, {2, 3}) + 1.0) <= 1e-8);
  CHECK(std::abs(curv::scalar_curvature(fc2.R)) <= 1e-8);

  // chart curvature matches the exact block tensor entry by entry
  auto exact = curv::exact_curvature(sh);
  double w = 0;
  for (int i = 0; i < fc2.R.form.rows(); ++i)
    for (int j = 0; j < fc2.R.form.cols(); ++j)
      w = std::max(w, std::abs(fc2.R.form.at(i, j) -
                               curv::ScalarTraits<Rational>::to_double(exact.form.at(i, j))));
  CHECK(w <= 1e-10);
}

TEST_CASE("covariant derivative: metric compatibility, local symmetry, engine agreement") {
  Model s4 = curv::make_model("sphere:n=4,r=1");
  auto g_field = [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    return DoubleForm<S>::metric(4);
  };
  CHECK(worst_norm(curv::covariant_derivative(s4.chart, g_field, s4.sample_points[0])) <= 1e-8);

  // constant curvature is locally symmetric: the full curvature field is parallel
  CHECK(worst_norm(curv::covariant_derivative(s4.chart, curvature_field(s4.chart),
                                              s4.sample_points[1])) <= 1e-6);

  Model pf = curv::make_model("perturbed_flat:n=4,seed=1,eps=0.05,deg=2");
  CHECK(worst_norm(curv::covariant_derivative(pf.chart, g_field, pf.sample_points[2])) <= 1e-8);

  // dual engine vs finite-difference engine on the same curvature field
  MetricChart fd = pf.chart;
  fd.set_engine(DerivativeEngine::finite_difference);
  auto nd = curv::covariant_derivative(pf.chart, curvature_field(pf.chart), pf.sample_points[0]);
  auto nf = curv::covariant_derivative(fd, [&fd](const Vec<double>& x) {
    return curv::curvature_in_frame(fd, x);
  }, pf.sample_points[0]);
  double w = 0;
  for (std::size_t t = 0; t < nd.size(); ++t) {
    nd[t] -= nf[t];
    w = std::max(w, curv::residual_norm(nd[t]));
  }
  CHECK(w <= 1e-6);

  // a double-only field demands the finite-difference engine
  auto double_only = [&pf](const Vec<double>& x) { return curv::curvature_in_frame(pf.chart, x); };
  CHECK_THROWS_AS(curv::covariant_derivative(pf.chart, double_only, pf.sample_points[0]),
                  curv::InputError);
  CHECK_NOTHROW(curv::covariant_derivative(fd, double_only, pf.sample_points[0]));
}

TEST_CASE("divergence-free families and the second Bianchi operator on generic metrics") {
  for (const char* spec : {"perturbed_flat:n=4,seed=1,eps=0.05,deg=2",
                           "perturbed_flat:n=5,seed=3,eps=0.05,deg=2"}) {
    CAPTURE(spec);
    Model pf = curv::make_model(spec);
    const int n = pf.n;
    const auto& x = pf.sample_points[1];
    auto r_field = curvature_field(pf.chart);

    // the differential Bianchi identity
    CHECK(curv::residual_norm(curv::bianchi_sum_D(pf.chart, r_field, x)) <= 1e-6);

    // contracted hierarchy members are divergence free; plain Ricci is not
    auto einstein_field = [&pf](const auto& p) {
      using S = std::decay_t<decltype(p[0])>;
      return curv::einstein_tensor(
          AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, p)));
    };
    CHECK(curv::residual_norm(curv::divergence_delta(pf.chart, einstein_field, x)) <= 1e-6);
    auto ricci_field = [&pf](const auto& p) {
      using S = std::decay_t<decltype(p[0])>;
      return curv::ricci(AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, p)));
    };
    CHECK(curv::residual_norm(curv::divergence_delta(pf.chart, ricci_field, x)) > 1e-3);

    for (int p = 1; p <= std::min(3, n - 2); ++p) {
      CAPTURE(p);
      auto dd_field = [&pf, p](const auto& pt) {
        using S = std::decay_t<decltype(pt[0])>;
        return curv::dd_star(AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, pt)),
                             p);
      };
      CHECK(curv::residual_norm(curv::divergence_delta(pf.chart, dd_field, x)) <= 1e-6);
    }
    for (int q = 1; 2 * q < n; ++q) {
      CAPTURE(q);
      auto t_field = [&pf, q](const auto& pt) {
        using S = std::decay_t<decltype(pt[0])>;
        return curv::lovelock(
            AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, pt)), q);
      };
      CHECK(curv::residual_norm(curv::divergence_delta(pf.chart, t_field, x)) <= 1e-6);
    }

    // generic witness: the middle double dual fails the second Bianchi identity
    auto dd2_field = [&pf](const auto& pt) {
      using S = std::decay_t<decltype(pt[0])>;
      return curv::dd_star(AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, pt)),
                           2);
    };
    CHECK(curv::residual_norm(curv::bianchi_sum_D(pf.chart, dd2_field, x)) >= 1e-3);

    // star-conjugated divergence: with the per-factor star the sign is (-1)^(n-p),
    // so it reduces to (-1)^p exactly on even-dimensional charts
    for (int p = 1; p <= std::min(3, n - 2); ++p) {
      CAPTURE(p);
      auto field = [&pf, p](const auto& pt) {
        using S = std::decay_t<decltype(pt[0])>;
        auto R = AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, pt));
        return p == 1 ? curv::ricci(R) : curv::dd_star(R, p);
      };
      auto sds = curv::star_delta_star(pf.chart, field, x);
      auto bd = curv::bianchi_sum_D(pf.chart, field, x);
      if ((n - p) % 2 == 0)
        sds -= bd;
      else
        sds += bd;
      CHECK(curv::residual_norm(sds) <= 1e-6);
    }

    // Codazzi pairing: delta T small exactly when D(star T) is small
    auto star_dd2 = [&dd2_field](const auto& pt) { return curv::hodge_star(dd2_field(pt)); };
    CHECK(curv::residual_norm(curv::bianchi_sum_D(pf.chart, star_dd2, x)) <= 1e-6);
    auto star_ric = [&ricci_field](const auto& pt) { return curv::hodge_star(ricci_field(pt)); };
    CHECK(curv::residual_norm(curv::bianchi_sum_D(pf.chart, star_ric, x)) > 1e-3);
  }
}

TEST_CASE("scalar gradient, divergence of scaled metric, and Cotton trace") {
  Model pf = curv::make_model("perturbed_flat:n=4,seed=2,eps=0.05,deg=2");
  const auto& x = pf.sample_points[0];
  auto scal_field = [&pf](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    return curv::scalar_curvature(
        AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, p)));
  };
  auto grad = curv::frame_gradient(pf.chart, scal_field, x);
  CHECK(max_abs(grad) > 1e-3);  // generically non-constant scalar curvature

  // delta(Scal * g) = -grad Scal in the remaining slot
  auto sg_field = [&pf](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    auto R = AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, p));
    auto g = DoubleForm<S>::metric(4);
    g *= curv::scalar_curvature(R);
    return g;
  };
  auto dsg = curv::divergence_delta(pf.chart, sg_field, x);
  double w = 0;
  for (int a = 0; a < 4; ++a)
    w = std::max(w, std::abs(dsg.at(0, a) + grad[static_cast<std::size_t>(a)]));
  CHECK(w <= 1e-6);

  // Cotton grid: alternated derivative of the Schouten field; always trace free
  auto schouten_field = [&pf](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    return curv::schouten_tensor(
        AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(pf.chart, p)));
  };
  auto cotton = curv::bianchi_sum_D(pf.chart, schouten_field, x);
  CHECK(curv::residual_norm(cotton) > 1e-4);  // generic metric: nonzero Cotton grid
  CHECK(curv::residual_norm(curv::contraction(cotton)) <= 1e-8);

  // sphere: constant scalar curvature and parallel Schouten grid
  Model s4 = curv::make_model("sphere:n=4,r=1");
  auto s_scal = [&s4](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    return curv::scalar_curvature(
        AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(s4.chart, p)));
  };
  CHECK(max_abs(curv::frame_gradient(s4.chart, s_scal, s4.sample_points[2])) <= 1e-8);
  auto s_schouten = [&s4](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    return curv::schouten_tensor(
        AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(s4.chart, p)));
  };
  CHECK(curv::residual_norm(curv::bianchi_sum_D(s4.chart, s_schouten, s4.sample_points[2])) <=
        1e-6);
}

TEST_CASE("spanning family members are divergence free on the round five-sphere chart") {
  Model s5 = curv::make_model("sphere:n=5,r=1");
  const auto& x = s5.sample_points[0];
  auto base = AlgebraicCurvature<double>::unchecked(curv::curvature_in_frame(s5.chart, x));

  // constant scalar + harmonic trace-free part: three members at p = 2
  auto members = curv::spanning_set(base, 2, true, true);
  REQUIRE(members.size() == 3);
  for (std::size_t idx = 0; idx < members.size(); ++idx) {
    CAPTURE(members[idx].first);
    auto field = [&s5, idx](const auto& pt) {
      using S = std::decay_t<decltype(pt[0])>;
      auto R = AlgebraicCurvature<S>::unchecked(curv::curvature_in_frame(s5.chart, pt));
      return curv::spanning_set(R, 2, true, true)[idx].second;
    };
    CHECK(curv::residual_norm(curv::divergence_delta(s5.chart, field, x)) <= 1e-6);
  }

  // no geometric hypotheses: the family degenerates to the double dual alone
  auto bare = curv::spanning_set(base, 2, false, false);
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].first == "dd_star_p");
}

TEST_CASE("chart and linear-algebra guard rails") {
  CHECK_THROWS_AS(MetricChart::from_metric(0, [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    return Mat<S>{};
  }),
                  curv::InputError);

  Model pf = curv::make_model("perturbed_flat:n=3,seed=1,eps=0.05,deg=2");
  CHECK(pf.chart.has_analytic());
  CHECK(pf.chart.engine() == DerivativeEngine::dual);
  Vec<double> bad = {0.1, 0.2};
  CHECK_THROWS_AS(pf.chart.metric(bad), curv::InputError);

  // finite differences never run above the base scalar level
  MetricChart fd = pf.chart;
  fd.set_engine(DerivativeEngine::finite_difference);
  Vec<curv::Dual1> xl = {curv::Dual1(0.1), curv::Dual1(0.1), curv::Dual1(0.1)};
  CHECK_THROWS_AS(fd.metric_partials(xl), curv::NumericError);

  // dual lifting is capped at third derivatives of the metric
  Vec<curv::Dual3> x3(3, curv::Dual3(curv::from_double<curv::Dual2>(0.1)));
  CHECK_THROWS_AS(pf.chart.metric_partials(x3), curv::NumericError);

  // charts without closed-form partials reject the analytic engine
  auto plain = MetricChart::from_metric(2, [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    Mat<S> g(2, Vec<S>(2, curv::scalar_of<S>(0)));
    g[0][0] = curv::scalar_of<S>(1) + x[1] * x[1];
    g[1][1] = curv::scalar_of<S>(1);
    return g;
  });
  CHECK_FALSE(plain.has_analytic());
  CHECK_THROWS_AS(plain.set_engine(DerivativeEngine::analytic), curv::InputError);
  CHECK_NOTHROW(curv::riemann_at(plain, Vec<double>{0.2, -0.1}));

  Mat<double> notspd = {{1.0, 2.0}, {2.0, 1.0}};
  CHECK_THROWS_AS(curv::cholesky_lower(notspd), curv::NumericError);

  Model h2 = curv::make_model("hyperbolic:n=2,r=1");
  Vec<double> outside = {0.8, 0.7};
  CHECK_THROWS_AS(h2.chart.metric(outside), curv::NumericError);

  // degree gates on the differential operators
  Model polar = curv::make_model("polar2:r=1");
  auto scalar_field = [](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    return DoubleForm<S>::scalar_form(2, curv::scalar_of<S>(1));
  };
  CHECK_THROWS_AS(curv::divergence_delta(polar.chart, scalar_field, polar.sample_points[0]),
                  curv::RangeError);
  CHECK_THROWS_AS(
      curv::bianchi_sum_D(polar.chart, curvature_field(polar.chart), polar.sample_points[0]),
      curv::RangeError);
}

TEST_CASE("model catalog: canonical names, expected tables, exact block curvature") {
  for (const auto& spec : curv::model_catalog()) {
    CAPTURE(spec);
    Model m = curv::make_model(spec);
    CHECK(m.name == spec);  // canonical specs round-trip
    CHECK(m.sample_points.size() == 5);
    CHECK(m.chart.n() == m.n);
  }

  Model s4 = curv::make_model("sphere:n=4,r=1");
  REQUIRE(s4.expected.scal.has_value());
  CHECK(*s4.expected.scal == 12.0);
  CHECK(*s4.expected.ric_factor == 3.0);
  CHECK(*s4.expected.h4 == 6.0);
  CHECK(*s4.expected.sectional == 1.0);
  CHECK(*s4.expected.self_dual_sign == 1);
  CHECK(s4.expected.scal_constant);
  CHECK(s4.expected.weyl_harmonic);
  CHECK(s4.expected.einstein);
  CHECK_FALSE(s4.expected.flat);

  Model s5 = curv::make_model("sphere:n=5,r=1");
  CHECK(*s5.expected.h4 == 30.0);

  Model sh = curv::make_model("product(sphere:n=2,r=1|hyperbolic:n=2,r=1)");
  CHECK(*sh.expected.scal == 0.0);
  CHECK(*sh.expected.h4 == -2.0);
  CHECK(*sh.expected.self_dual_sign == -1);
  CHECK(sh.expected.scal_constant);
  CHECK_FALSE(sh.expected.einstein);

  Model ss = curv::make_model("product(sphere:n=2,r=1|sphere:n=2,r=1)");
  CHECK(*ss.expected.h4 == 2.0);
  CHECK(*ss.expected.self_dual_sign == 1);
  CHECK(ss.expected.einstein);

  Model flat = curv::make_model("euclidean:n=4");
  CHECK(flat.expected.flat);
  CHECK(*flat.expected.scal == 0.0);

  // exact rational curvature agrees with the expectations and the chart
  REQUIRE(s4.exact);
  auto exact = curv::exact_curvature(s4);
  CHECK(curv::scalar_curvature(exact) == curv::scalar_ratio<Rational>(12, 1));
  auto fc = curv::riemann_at(s4.chart, s4.sample_points[4]);
  double w = 0;
  for (int i = 0; i < fc.R.form.rows(); ++i)
    for (int j = 0; j < fc.R.form.cols(); ++j)
      w = std::max(w, std::abs(fc.R.form.at(i, j) -
                               curv::ScalarTraits<Rational>::to_double(exact.form.at(i, j))));
  CHECK(w <= 1e-10);

  Model pf = curv::make_model("perturbed_flat:n=4,seed=1,eps=0.05,deg=2");
  CHECK_FALSE(pf.exact);
  CHECK_THROWS_AS(curv::exact_curvature(pf), curv::InputError);
  CHECK_FALSE(pf.expected.scal.has_value());
}

TEST_CASE("model spec parsing and seeded perturbations are deterministic") {
  auto a = curv::make_model("perturbed_flat:n=4,seed=7,eps=0.05,deg=2");
  auto b = curv::make_model("perturbed_flat:n=4,seed=7,eps=0.05,deg=2");
  auto c = curv::make_model("perturbed_flat:n=4,seed=8,eps=0.05,deg=2");
  const Vec<double> x = a.sample_points[0];
  auto ga = a.chart.metric(x), gb = b.chart.metric(x), gc = c.chart.metric(x);
  double same = 0, diff = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      same = std::max(same, std::abs(ga[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                     gb[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
      diff = std::max(diff, std::abs(ga[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                     gc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
  CHECK(same == 0.0);
  CHECK(diff > 1e-6);

  CHECK(a.name == "perturbed_flat:n=4,seed=7,eps=0.05,deg=2");
  CHECK(curv::make_model("  sphere:n=4 , r=1 ").name == "sphere:n=4,r=1");
  CHECK(curv::make_model("sphere:n=4").name == "sphere:n=4,r=1");  // defaults filled in

  CHECK_THROWS_AS(curv::make_model("torus:n=4"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("sphere"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("sphere:n=4,r=0"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("sphere:n=4,colour=red"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("sphere:n=nope"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("sphere:n=99"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("product(sphere:n=2,r=1)"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("product(product(sphere:n=2|sphere:n=2)|sphere:n=2)"),
                  curv::InputError);
  CHECK_THROWS_AS(curv::make_model("perturbed_flat:n=4,deg=9"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("polynomial_metric:n=3"), curv::InputError);
  CHECK_THROWS_AS(curv::make_model("product(sphere:n=8,r=1|sphere:n=9,r=1)"), curv::InputError);
}

TEST_CASE("polynomial metric configuration through JSON") {
  const std::string text = R"({"polynomial_metric": {"n": 3, "epsilon": 0.1,
    "coefficients": [
      {"i": 0, "j": 1, "monomial": [0, 0, 1], "value": 1.0},
      {"i": 2, "j": 2, "monomial": [2, 0, 0], "value": 0.5}
    ]}})";
  Model m = curv::model_from_json(text);
  CHECK(m.n == 3);
  CHECK(m.name == "polynomial_metric:n=3");
  CHECK_FALSE(m.exact);

  Vec<double> x = {0.2, -0.1, 0.3};
  auto g = m.chart.metric(x);
  CHECK(std::abs(g[0][1] - 0.1 * 0.3) <= 1e-15);
  CHECK(std::abs(g[1][0] - 0.1 * 0.3) <= 1e-15);
  CHECK(std::abs(g[2][2] - (1.0 + 0.1 * 0.5 * 0.04)) <= 1e-15);
  CHECK(g[0][0] == 1.0);

  // analytic partials written by hand match the dual engine
  for (int order = 1; order <= 3; ++order)
    CHECK(engine_probe_gap(m.chart, x, order, DerivativeEngine::analytic,
                           DerivativeEngine::dual) <= 1e-12);

  // spec-string form with parameters in a separate object
  Model s = curv::model_from_json(R"({"model": "sphere", "params": {"n": 4, "r": 1}})");
  CHECK(s.name == "sphere:n=4,r=1");
  Model s2 = curv::model_from_json(R"({"model": "sphere:n=4,r=1"})");
  CHECK(s2.name == "sphere:n=4,r=1");

  CHECK_THROWS_AS(curv::model_from_json("{"), curv::InputError);
  CHECK_THROWS_AS(curv::model_from_json(R"({"modle": "sphere"})"), curv::InputError);
  CHECK_THROWS_AS(curv::model_from_json(R"({"model": "sphere:n=4", "params": {"r": 1}})"),
                  curv::InputError);
  CHECK_THROWS_AS(
      curv::model_from_json(
          R"({"polynomial_metric": {"n": 3, "coefficients": [{"i": 0, "j": 5, "monomial": [0,0,0], "value": 1}]}})"),
      curv::InputError);
  CHECK_THROWS_AS(
      curv::model_from_json(
          R"({"polynomial_metric": {"n": 3, "coefficients": [{"i": 0, "j": 1, "monomial": [0,1], "value": 1}]}})"),
      curv::InputError);
}
