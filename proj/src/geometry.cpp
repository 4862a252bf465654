#include "curv/geometry.hpp"

namespace curv {

namespace {

// order-1 values [k][i][j] through whatever engine the chart copy is set to
std::vector<double> probe_order1(const MetricChart& c, const Vec<double>& x) {
  const int n = c.n();
  auto dg = c.metric_partials<double>(x);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * n * n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.push_back(dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                        [static_cast<std::size_t>(j)]);
  return out;
}

std::vector<double> probe_fd(const MetricChart& c, const Vec<double>& x, int order) {
  if (order == 1) return probe_order1(c, x);
  const int n = c.n();
  const double step = (order == 2) ? kFdStepConnection : kFdStepField;
  std::vector<double> out;
  for (int m = 0; m < n; ++m) {
    auto diff = [&](double h) {
      Vec<double> xp = x, xm = x;
      xp[static_cast<std::size_t>(m)] += h;
      xm[static_cast<std::size_t>(m)] -= h;
      auto vp = probe_fd(c, xp, order - 1);
      auto vm = probe_fd(c, xm, order - 1);
      for (std::size_t t = 0; t < vp.size(); ++t) vp[t] = (vp[t] - vm[t]) / (2 * h);
      return vp;
    };
    auto coarse = diff(step);
    auto fine = diff(step / 2);
    for (std::size_t t = 0; t < fine.size(); ++t) fine[t] = (4 * fine[t] - coarse[t]) / 3;
    out.insert(out.end(), fine.begin(), fine.end());
  }
  return out;
}

}  // namespace

std::vector<double> metric_derivative_probe(const MetricChart& chart, const Vec<double>& x,
                                            int order, DerivativeEngine engine) {
  if (order < 1 || order > 3) throw RangeError("metric_derivative_probe: order must be 1..3");
  MetricChart c = chart;
  c.set_engine(engine);
  const int n = c.n();
  if (engine == DerivativeEngine::finite_difference) return probe_fd(c, x, order);
  if (order == 1) return probe_order1(c, x);
  std::vector<double> out;
  if (order == 2) {
    for (int m = 0; m < n; ++m) {
      Vec<Dual1> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] = Dual1(x[static_cast<std::size_t>(t)], t == m ? 1.0 : 0.0);
      auto dg = c.metric_partials<Dual1>(xl);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            out.push_back(dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(j)].b);
    }
    return out;
  }
  for (int r = 0; r < n; ++r)
    for (int m = 0; m < n; ++m) {
      // cross seed: .a.b differentiates along m, .b.a along r; .b.b collects
      // the mixed second derivative of the analytic/dual first partials
      Vec<Dual2> xl(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t)
        xl[static_cast<std::size_t>(t)] =
            Dual2(Dual1(x[static_cast<std::size_t>(t)], t == m ? 1.0 : 0.0),
                  Dual1(t == r ? 1.0 : 0.0, 0.0));
      auto dg = c.metric_partials<Dual2>(xl);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            out.push_back(dg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(j)].b.b);
    }
  return out;
}

}  // namespace curv
