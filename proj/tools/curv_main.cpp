// Command-line front end for the double-form curvature library.
//
// Subcommands:
//   compute  --model <spec|file|inline JSON>  [--mode float|rational] [--out path]
//   verify   [--filter regex] [--mode all|rational|float] [--seed k] [--out path]
//            [--self-test-corrupt]
//   bench    [--n 4..6]
//   models   list
//
// Exit codes: 0 success; 1 verification failure; 2 usage or configuration
// error; 3 numeric failure.  compute and verify emit deterministic JSON:
// byte-identical output for a fixed (model, mode, seed) triple.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "curv/combinatorics.hpp"
#include "curv/curvature.hpp"
#include "curv/errors.hpp"
#include "curv/geometry.hpp"
#include "curv/models.hpp"
#include "curv/oracle.hpp"
#include "curv/verify.hpp"

namespace {

using curv::AlgebraicCurvature;
using curv::DoubleForm;
using curv::Rational;
using nlohmann::ordered_json;

constexpr int kMaxComputeDim = 8;

std::string rational_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

ordered_json rational_value(const Rational& r) { return rational_string(r); }
ordered_json double_value(double v) { return v; }

// Dense (p,q) grid with its multi-index bases, rows and columns in
// increasing-rank order (ranks enumerate p-subsets lexicographically).
template <class S, class ToJson>
ordered_json grid_json(const DoubleForm<S>& w, ToJson&& value) {
  ordered_json out;
  out["p"] = w.p();
  out["q"] = w.q();
  auto basis_of = [&w](int deg) {
    ordered_json basis = ordered_json::array();
    for (long long r = 0; r < curv::binomial(w.n(), deg); ++r) {
      auto I = curv::unrank(static_cast<int>(r), w.n(), deg);
      ordered_json tuple = ordered_json::array();
      for (int t = 0; t < I.size(); ++t) tuple.push_back(I[t]);
      basis.push_back(std::move(tuple));
    }
    return basis;
  };
  if (w.p() == w.q()) {
    out["basis"] = basis_of(w.p());
  } else {
    out["row_basis"] = basis_of(w.p());
    out["col_basis"] = basis_of(w.q());
  }
  ordered_json values = ordered_json::array();
  for (int i = 0; i < w.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < w.cols(); ++j) row.push_back(value(w.at(i, j)));
    values.push_back(std::move(row));
  }
  out["values"] = std::move(values);
  return out;
}

// The full hierarchy payload for one algebraic curvature tensor.
template <class S, class ToJson>
ordered_json curvature_payload(const AlgebraicCurvature<S>& R, ToJson&& value) {
  const int n = R.n();
  ordered_json doc;
  doc["scal"] = value(curv::scalar_curvature(R));
  doc["ricci"] = grid_json(curv::ricci(R), value);
  doc["einstein"] = grid_json(curv::einstein_tensor(R), value);

  ordered_json duals = ordered_json::array();
  for (int p = 0; p <= n - 2; ++p) {
    ordered_json entry;
    entry["p"] = p;
    entry["grid"] = grid_json(curv::dd_star(R, p), value);
    duals.push_back(std::move(entry));
  }
  doc["dd_star"] = std::move(duals);

  // s_p of the leading coordinate planes (the grid frame is orthonormal)
  ordered_json splanes = ordered_json::array();
  for (int p = 0; p <= n - 2; ++p) {
    std::vector<std::vector<S>> frame;
    for (int i = 0; i < p; ++i) {
      std::vector<S> e(static_cast<std::size_t>(n), curv::scalar_of<S>(0));
      e[static_cast<std::size_t>(i)] = curv::scalar_of<S>(1);
      frame.push_back(std::move(e));
    }
    ordered_json entry;
    entry["p"] = p;
    ordered_json plane = ordered_json::array();
    for (int i = 0; i < p; ++i) plane.push_back(i);
    entry["plane"] = std::move(plane);
    entry["value"] = value(curv::p_curvature(R, p, frame));
    splanes.push_back(std::move(entry));
  }
  doc["s_p"] = std::move(splanes);

  ordered_json lovelocks = ordered_json::array();
  ordered_json scalars = ordered_json::array();
  for (int q = 1; 2 * q <= n; ++q) {
    if (2 * q + 1 <= n) {
      ordered_json entry;
      entry["q"] = q;
      entry["grid"] = grid_json(curv::lovelock(R, q), value);
      lovelocks.push_back(std::move(entry));
    }
    ordered_json h;
    h["q"] = q;
    h["value"] = value(curv::gauss_bonnet(R, q));
    scalars.push_back(std::move(h));
  }
  doc["lovelock"] = std::move(lovelocks);
  doc["gauss_bonnet"] = std::move(scalars);

  auto parts = curv::decompose2(R);
  ordered_json decomposition;
  decomposition["scalar_part"] = value(parts.w0);
  decomposition["traceless_ricci_norm_sq"] = value(inner_product(parts.w1, parts.w1));
  decomposition["conformal_norm_sq"] = value(inner_product(parts.w2, parts.w2));
  doc["decomposition"] = std::move(decomposition);

  if (n % 2 == 0 && n >= 4) {
    const int mid = n / 2;
    auto w = curv::dd_star(R, mid);
    ordered_json duality;
    duality["p"] = mid;
    duality["self_dual_defect"] = curv::duality_defect(w, +1);
    duality["anti_self_dual_defect"] = curv::duality_defect(w, -1);
    doc["duality"] = std::move(duality);
  }

  if (n >= 3) doc["d_of_n"] = curv::d_of_n(n);
  return doc;
}

AlgebraicCurvature<double> lower_to_double(const AlgebraicCurvature<Rational>& R) {
  DoubleForm<double> w(R.n(), 2, 2);
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j)
      w.at(i, j) = curv::ScalarTraits<Rational>::to_double(R.form.at(i, j));
  return AlgebraicCurvature<double>::unchecked(std::move(w));
}

curv::Model resolve_model(const std::string& arg) {
  std::string trimmed = arg;
  const auto first = trimmed.find_first_not_of(" \t\n");
  if (first != std::string::npos && trimmed[first] == '{') return curv::model_from_json(trimmed);
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    if (!in) throw curv::InputError("compute: cannot read model file: " + arg);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return curv::model_from_json(buffer.str());
  }
  return curv::make_model(arg);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw curv::InputError("cannot open output file: " + out_path);
  out << text;
}

int run_compute(const std::string& model_arg, const std::string& mode,
                const std::string& out_path) {
  curv::Model model = resolve_model(model_arg);
  if (model.n > kMaxComputeDim)
    throw curv::InputError("compute: dimension capped at " + std::to_string(kMaxComputeDim));
  if (mode == "rational" && !model.exact)
    throw curv::InputError("compute: rational mode needs a model with exact curvature: " +
                           model.name);

  ordered_json doc;
  doc["version"] = 1;
  doc["model"] = model.name;
  doc["n"] = model.n;
  doc["mode"] = mode;

  ordered_json payload;
  if (mode == "rational") {
    doc["source"] = "closed_form";
    payload = curvature_payload(curv::exact_curvature(model), rational_value);
  } else if (model.exact) {
    doc["source"] = "closed_form";
    payload = curvature_payload(lower_to_double(curv::exact_curvature(model)), double_value);
  } else {
    doc["source"] = "chart";
    const auto& x = model.sample_points.at(0);
    doc["point"] = x;
    auto framed = curv::riemann_at(model.chart, x);
    payload = curvature_payload(framed.R, double_value);
  }
  for (auto& [key, val] : payload.items()) doc[key] = std::move(val);

  emit(doc.dump(2) + "\n", out_path);
  return 0;
}

int run_verify(const curv::SuiteConfig& config, const std::string& out_path) {
  auto report = curv::run_suite(config);
  emit(curv::report_to_json(report), out_path);
  return report.failed > 0 ? 1 : 0;
}

int run_bench(int n) {
  if (n < 4 || n > 6) throw curv::InputError("bench: dimension gated to 4 <= n <= 6");
  curv::SplitMix64 rng(2026);
  auto R = curv::random_algebraic_curvature<Rational>(rng, n);

  struct Row {
    std::string object;
    int p, q;
    double oracle_ms, fast_ms;
  };
  std::vector<Row> rows;
  auto ms_of = [](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  for (int p = 0; p <= n - 2; ++p) {
    auto slow = curv::oracle_dd_star(R, p);
    auto fast = curv::dd_star(R, p);
    slow -= fast;  // equality asserted before any timing
    if (Rational(sup_norm(slow)) != 0)
      throw curv::NumericError("bench: oracle and dd_star disagree at p=" + std::to_string(p));
    rows.push_back(Row{"dd_star", p, 1,
                       ms_of([&] { (void)curv::oracle_dd_star(R, p); }),
                       ms_of([&] { (void)curv::dd_star(R, p); })});
  }
  if (n <= 5) {
    for (int p = 0; p + 4 <= n; ++p) {
      auto slow = curv::oracle_pq_curvature(R, p, 2);
      auto fast = curv::pq_curvature(R, p, 2);
      slow -= fast;
      if (Rational(sup_norm(slow)) != 0)
        throw curv::NumericError("bench: oracle and pq_curvature disagree at p=" +
                                 std::to_string(p));
      rows.push_back(Row{"pq_curvature", p, 2,
                         ms_of([&] { (void)curv::oracle_pq_curvature(R, p, 2); }),
                         ms_of([&] { (void)curv::pq_curvature(R, p, 2); })});
    }
  }

  std::printf("oracle vs optimized, random rational tensor (n=%d, seed=2026)\n", n);
  std::printf("%-14s %3s %3s %8s %12s %12s\n", "object", "p", "q", "equal", "oracle_ms",
              "optimized_ms");
  for (const auto& r : rows)
    std::printf("%-14s %3d %3d %8s %12.3f %12.3f\n", r.object.c_str(), r.p, r.q, "yes",
                r.oracle_ms, r.fast_ms);
  return 0;
}

int run_models(const std::string& action) {
  if (action != "list") throw curv::InputError("models: unknown action: " + action);
  for (const auto& name : curv::model_catalog()) std::cout << name << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-form curvature toolkit"};
  app.require_subcommand(1);

  std::string model_arg, compute_mode = "float", compute_out;
  auto* compute = app.add_subcommand("compute", "curvature hierarchy report for one model");
  compute->add_option("--model", model_arg, "model spec, JSON file path, or inline JSON")
      ->required();
  compute->add_option("--mode", compute_mode, "scalar mode")
      ->check(CLI::IsMember({"float", "rational"}));
  compute->add_option("--out", compute_out, "output path (default stdout)");

  curv::SuiteConfig suite;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "run the identity-verification suite");
  verify->add_option("--filter", suite.filter, "full-match regex over check ids");
  verify->add_option("--mode", suite.mode, "restrict to one scalar mode")
      ->check(CLI::IsMember({"all", "rational", "float"}));
  verify->add_option("--seed", suite.seed, "master seed for randomized checks");
  verify->add_option("--out", verify_out, "output path (default stdout)");
  verify->add_flag("--self-test-corrupt", suite.corrupt,
                   "inject one failure to exercise the harness");

  int bench_n = 5;
  auto* bench = app.add_subcommand("bench", "time the literal-sum oracles vs the pipeline");
  bench->add_option("--n", bench_n, "dimension (4..6)");

  std::string models_action;
  auto* models = app.add_subcommand("models", "catalog operations");
  models->add_option("action", models_action, "list")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (compute->parsed()) return run_compute(model_arg, compute_mode, compute_out);
    if (verify->parsed()) return run_verify(suite, verify_out);
    if (bench->parsed()) return run_bench(bench_n);
    return run_models(models_action);
  } catch (const curv::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const curv::RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const curv::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
}
