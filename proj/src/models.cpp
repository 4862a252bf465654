#include "curv/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "curv/rng.hpp"
#include "json.hpp"

namespace curv {

namespace {

struct Block {
  enum class Kind { euclidean, sphere, hyperbolic, polar2, perturbed, polynomial };
  Kind kind = Kind::euclidean;
  int n = 0;
  double r = 1.0;                  // space-form radius
  std::vector<PolyEntry> entries;  // perturbed/polynomial terms, epsilon folded in
  // naming metadata for perturbed blocks
  std::uint64_t seed = 0;
  double eps = 0.0;
  int deg = 0;
};

template <class S>
S sin_s(const S& v) {
  using std::sin;
  return sin(v);
}
template <class S>
S cos_s(const S& v) {
  using std::cos;
  return cos(v);
}

template <class S>
S ipow(const S& x, int e) {
  S acc = scalar_of<S>(1);
  for (int t = 0; t < e; ++t) acc *= x;
  return acc;
}

template <class S>
Mat<S> eval_metric(const std::vector<Block>& blocks, const Vec<S>& x) {
  int n = 0;
  for (const auto& b : blocks) n += b.n;
  Mat<S> g(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n), scalar_of<S>(0)));
  int off = 0;
  for (const Block& b : blocks) {
    const auto o = static_cast<std::size_t>(off);
    switch (b.kind) {
      case Block::Kind::euclidean:
        for (int t = 0; t < b.n; ++t) g[o + t][o + t] = scalar_of<S>(1);
        break;
      case Block::Kind::sphere:
      case Block::Kind::hyperbolic: {
        const double r2 = b.r * b.r;
        S s2 = scalar_of<S>(0);
        for (int t = 0; t < b.n; ++t) s2 += x[o + t] * x[o + t];
        S denom = (b.kind == Block::Kind::sphere) ? from_double<S>(r2) + s2
                                                  : from_double<S>(r2) - s2;
        if (!(value_of(denom) > 0))
          throw NumericError("hyperbolic chart: point outside the coordinate ball");
        const S lam = from_double<S>(4 * r2 * r2) / (denom * denom);
        for (int t = 0; t < b.n; ++t) g[o + t][o + t] = lam;
        break;
      }
      case Block::Kind::polar2: {
        const double r2 = b.r * b.r;
        const S s = sin_s(x[o]);
        g[o][o] = from_double<S>(r2);
        g[o + 1][o + 1] = from_double<S>(r2) * s * s;
        break;
      }
      case Block::Kind::perturbed:
      case Block::Kind::polynomial: {
        for (int t = 0; t < b.n; ++t) g[o + t][o + t] = scalar_of<S>(1);
        for (const PolyEntry& e : b.entries) {
          S mono = from_double<S>(e.value);
          for (int t = 0; t < b.n; ++t)
            if (e.exponents[static_cast<std::size_t>(t)] > 0)
              mono *= ipow(x[o + t], e.exponents[static_cast<std::size_t>(t)]);
          g[o + e.i][o + e.j] += mono;
          if (e.i != e.j) g[o + e.j][o + e.i] += mono;
        }
        break;
      }
    }
    off += b.n;
  }
  return g;
}

template <class S>
std::vector<Mat<S>> eval_partials(const std::vector<Block>& blocks, const Vec<S>& x) {
  int n = 0;
  for (const auto& b : blocks) n += b.n;
  std::vector<Mat<S>> dg(
      static_cast<std::size_t>(n),
      Mat<S>(static_cast<std::size_t>(n), Vec<S>(static_cast<std::size_t>(n), scalar_of<S>(0))));
  int off = 0;
  for (const Block& b : blocks) {
    const auto o = static_cast<std::size_t>(off);
    switch (b.kind) {
      case Block::Kind::euclidean:
        break;
      case Block::Kind::sphere:
      case Block::Kind::hyperbolic: {
        const double r2 = b.r * b.r;
        S s2 = scalar_of<S>(0);
        for (int t = 0; t < b.n; ++t) s2 += x[o + t] * x[o + t];
        S denom = (b.kind == Block::Kind::sphere) ? from_double<S>(r2) + s2
                                                  : from_double<S>(r2) - s2;
        if (!(value_of(denom) > 0))
          throw NumericError("hyperbolic chart: point outside the coordinate ball");
        const double c = (b.kind == Block::Kind::sphere) ? -16 * r2 * r2 : 16 * r2 * r2;
        const S denom3 = denom * denom * denom;
        for (int k = 0; k < b.n; ++k) {
          const S dl = from_double<S>(c) * x[o + k] / denom3;
          for (int i = 0; i < b.n; ++i) dg[o + k][o + i][o + i] = dl;
        }
        break;
      }
      case Block::Kind::polar2:
        dg[o][o + 1][o + 1] = from_double<S>(2 * b.r * b.r) * sin_s(x[o]) * cos_s(x[o]);
        break;
      case Block::Kind::perturbed:
      case Block::Kind::polynomial:
        for (const PolyEntry& e : b.entries)
          for (int k = 0; k < b.n; ++k) {
            const int ek = e.exponents[static_cast<std::size_t>(k)];
            if (ek == 0) continue;
            S mono = from_double<S>(e.value * ek);
            for (int t = 0; t < b.n; ++t) {
              const int p = e.exponents[static_cast<std::size_t>(t)] - (t == k ? 1 : 0);
              if (p > 0) mono *= ipow(x[o + t], p);
            }
            dg[o + k][o + e.i][o + e.j] += mono;
            if (e.i != e.j) dg[o + k][o + e.j][o + e.i] += mono;
          }
        break;
    }
    off += b.n;
  }
  return dg;
}

MetricChart chart_for(std::vector<Block> blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.n;
  auto desc = std::make_shared<const std::vector<Block>>(std::move(blocks));
  auto f = [desc](const auto& x) { return eval_metric(*desc, x); };
  auto df = [desc](const auto& x) { return eval_partials(*desc, x); };
  return MetricChart::from_metric_analytic(n, f, df, DerivativeEngine::dual);
}

// All monomial exponent vectors with total degree 1..deg, lexicographic.
void collect_monomials(int n, int deg, std::vector<int>& cur, int pos,
                       std::vector<std::vector<int>>& out) {
  if (pos == n) {
    int total = 0;
    for (int e : cur) total += e;
    if (total >= 1) out.push_back(cur);
    return;
  }
  int used = 0;
  for (int t = 0; t < pos; ++t) used += cur[static_cast<std::size_t>(t)];
  for (int e = 0; e <= deg - used; ++e) {
    cur[static_cast<std::size_t>(pos)] = e;
    collect_monomials(n, deg, cur, pos + 1, out);
  }
  cur[static_cast<std::size_t>(pos)] = 0;
}

std::vector<PolyEntry> make_perturbed(int n, std::uint64_t seed, double eps, int deg) {
  std::vector<std::vector<int>> monos;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  collect_monomials(n, deg, cur, 0, monos);
  SplitMix64 rng(seed);
  std::vector<PolyEntry> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * monos.size());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (const auto& m : monos)
        out.push_back(PolyEntry{i, j, m, eps * rng.uniform(-1.0, 1.0)});
  return out;
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string block_name(const Block& b) {
  switch (b.kind) {
    case Block::Kind::euclidean:
      return "euclidean:n=" + std::to_string(b.n);
    case Block::Kind::sphere:
      return "sphere:n=" + std::to_string(b.n) + ",r=" + fmt_num(b.r);
    case Block::Kind::hyperbolic:
      return "hyperbolic:n=" + std::to_string(b.n) + ",r=" + fmt_num(b.r);
    case Block::Kind::polar2:
      return "polar2:r=" + fmt_num(b.r);
    case Block::Kind::perturbed:
      return "perturbed_flat:n=" + std::to_string(b.n) + ",seed=" + std::to_string(b.seed) +
             ",eps=" + fmt_num(b.eps) + ",deg=" + std::to_string(b.deg);
    case Block::Kind::polynomial:
      return "polynomial_metric:n=" + std::to_string(b.n);
  }
  return "";
}

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  auto b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& key) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError("model spec: bad number for " + key + ": '" + s + "'");
  }
  if (used != s.size()) throw InputError("model spec: bad number for " + key + ": '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& key) {
  const double v = parse_num(s, key);
  if (v != std::floor(v)) throw InputError("model spec: " + key + " must be an integer");
  return static_cast<long long>(v);
}

Block parse_block(const std::string& raw) {
  const std::string s = trim(raw);
  const auto colon = s.find(':');
  const std::string name = s.substr(0, colon == std::string::npos ? s.size() : colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    for (const auto& part : split(s.substr(colon + 1), ',')) {
      const auto p = trim(part);
      if (p.empty()) continue;
      const auto eq = p.find('=');
      if (eq == std::string::npos) throw InputError("model spec: expected key=value, got '" + p + "'");
      kv[trim(p.substr(0, eq))] = trim(p.substr(eq + 1));
    }
  }
  auto take_int = [&](const std::string& key, long long def, bool required) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw InputError("model spec: " + name + " needs " + key + "=");
      return def;
    }
    const long long v = parse_int(it->second, key);
    kv.erase(it);
    return v;
  };
  auto take_num = [&](const std::string& key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    const double v = parse_num(it->second, key);
    kv.erase(it);
    return v;
  };

  Block b;
  if (name == "euclidean") {
    b.kind = Block::Kind::euclidean;
    b.n = static_cast<int>(take_int("n", 0, true));
  } else if (name == "sphere" || name == "hyperbolic") {
    b.kind = name == "sphere" ? Block::Kind::sphere : Block::Kind::hyperbolic;
    b.n = static_cast<int>(take_int("n", 0, true));
    b.r = take_num("r", 1.0);
    if (!(b.r > 0)) throw InputError("model spec: radius must be positive");
  } else if (name == "polar2") {
    b.kind = Block::Kind::polar2;
    b.n = 2;
    b.r = take_num("r", 1.0);
    if (!(b.r > 0)) throw InputError("model spec: radius must be positive");
  } else if (name == "perturbed_flat") {
    b.kind = Block::Kind::perturbed;
    b.n = static_cast<int>(take_int("n", 0, true));
    b.seed = static_cast<std::uint64_t>(take_int("seed", 1, false));
    b.eps = take_num("eps", 0.05);
    b.deg = static_cast<int>(take_int("deg", 2, false));
    if (b.deg < 1 || b.deg > 4) throw InputError("model spec: deg must be 1..4");
    if (b.n >= 1 && b.n <= kMaxDim) b.entries = make_perturbed(b.n, b.seed, b.eps, b.deg);
  } else if (name == "polynomial_metric") {
    throw InputError("model spec: polynomial_metric models are configured through JSON");
  } else {
    throw InputError("model spec: unknown model '" + name + "'");
  }
  if (b.n < 1 || b.n > kMaxDim) throw InputError("model spec: dimension out of range");
  if (!kv.empty()) throw InputError("model spec: unknown key '" + kv.begin()->first + "'");
  return b;
}

// constant sectional curvature of a block, when it is a space form
std::optional<double> space_k(const Block& b) {
  switch (b.kind) {
    case Block::Kind::euclidean:
      return 0.0;
    case Block::Kind::sphere:
    case Block::Kind::polar2:
      return 1.0 / (b.r * b.r);
    case Block::Kind::hyperbolic:
      return -1.0 / (b.r * b.r);
    case Block::Kind::perturbed:
    case Block::Kind::polynomial:
      if (b.entries.empty()) return 0.0;
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Rational> exact_k(const Block& b) {
  const bool integral = b.r == std::floor(b.r) && b.r >= 1 && b.r <= 1000;
  switch (b.kind) {
    case Block::Kind::euclidean:
      return scalar_of<Rational>(0);
    case Block::Kind::sphere:
    case Block::Kind::polar2:
      if (!integral) return std::nullopt;
      return scalar_ratio<Rational>(1, static_cast<long long>(b.r) * static_cast<long long>(b.r));
    case Block::Kind::hyperbolic:
      if (!integral) return std::nullopt;
      return scalar_ratio<Rational>(-1, static_cast<long long>(b.r) * static_cast<long long>(b.r));
    case Block::Kind::perturbed:
    case Block::Kind::polynomial:
      if (b.entries.empty()) return scalar_of<Rational>(0);
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Vec<double>> default_points(const std::vector<Block>& blocks, int n) {
  std::vector<Vec<double>> pts;
  for (int j = 0; j < 5; ++j) {
    Vec<double> x(static_cast<std::size_t>(n), 0.0);
    int off = 0;
    for (const Block& b : blocks) {
      if (b.kind == Block::Kind::polar2) {
        x[static_cast<std::size_t>(off)] = 0.7 + 0.15 * j;
        x[static_cast<std::size_t>(off + 1)] = 0.3 + 0.2 * j;
      } else {
        for (int t = 0; t < b.n; ++t) {
          const int m = off + t;
          const double sign = ((m + j) % 2 == 0) ? 1.0 : -1.0;
          x[static_cast<std::size_t>(m)] = sign * (0.03 * (j + 1) + 0.015 * (m + 1));
        }
      }
      off += b.n;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

Model assemble(std::vector<Block> blocks) {
  Model m;
  for (const auto& b : blocks) m.n += b.n;
  if (m.n > kMaxDim) throw InputError("model spec: total dimension out of range");

  if (blocks.size() == 1) {
    m.name = block_name(blocks[0]);
  } else {
    m.name = "product(";
    for (std::size_t t = 0; t < blocks.size(); ++t) {
      if (t) m.name += "|";
      m.name += block_name(blocks[t]);
    }
    m.name += ")";
  }

  // closed-form expectations
  std::vector<double> ks;
  std::vector<int> dims;
  bool all_space = true;
  for (const auto& b : blocks) {
    auto k = space_k(b);
    if (!k) {
      all_space = false;
      break;
    }
    ks.push_back(*k);
    dims.push_back(b.n);
  }
  if (all_space) {
    auto& ev = m.expected;
    ev.scal_constant = true;
    ev.weyl_harmonic = true;  // space forms and their products are locally symmetric
    double scal = 0.0;
    for (std::size_t t = 0; t < ks.size(); ++t) scal += dims[t] * (dims[t] - 1) * ks[t];
    ev.scal = scal;
    bool einstein = true;
    const double rf0 = (dims[0] - 1) * ks[0];
    for (std::size_t t = 0; t < ks.size(); ++t)
      if ((dims[t] - 1) * ks[t] != rf0) einstein = false;
    ev.einstein = einstein;
    if (einstein) ev.ric_factor = rf0;
    bool flat = true;
    for (double k : ks)
      if (k != 0.0) flat = false;
    ev.flat = flat;
    if (blocks.size() == 1) {
      const double k = ks[0];
      ev.sectional = k;
      if (m.n >= 4)
        ev.h4 = k * k / 4.0 * m.n * (m.n - 1) * (m.n - 2) * (m.n - 3);
      if (m.n == 4 && !flat) ev.self_dual_sign = 1;
    } else if (blocks.size() == 2 && dims[0] == 2 && dims[1] == 2) {
      ev.h4 = 2.0 * ks[0] * ks[1];
      if (!flat) {
        if (ks[0] == ks[1]) ev.self_dual_sign = 1;
        else if (ks[0] == -ks[1]) ev.self_dual_sign = -1;
      }
    }
    if (flat) ev.sectional = 0.0;
  }

  // exactness
  m.exact = true;
  for (const auto& b : blocks) {
    auto k = exact_k(b);
    if (!k) {
      m.exact = false;
      m.exact_blocks.clear();
      break;
    }
    m.exact_blocks.emplace_back(b.n, *k);
  }

  m.sample_points = default_points(blocks, m.n);
  m.chart = chart_for(std::move(blocks));
  return m;
}

}  // namespace

AlgebraicCurvature<Rational> exact_curvature(const Model& m) {
  if (!m.exact || m.exact_blocks.empty())
    throw InputError("exact_curvature: model '" + m.name + "' has no rational closed form");
  auto R = AlgebraicCurvature<Rational>::constant_curvature(m.exact_blocks[0].first,
                                                            m.exact_blocks[0].second);
  for (std::size_t t = 1; t < m.exact_blocks.size(); ++t)
    R = block_sum(R, AlgebraicCurvature<Rational>::constant_curvature(m.exact_blocks[t].first,
                                                                      m.exact_blocks[t].second));
  return R;
}

Model make_model(const std::string& spec) {
  const std::string s = trim(spec);
  std::vector<Block> blocks;
  if (s.rfind("product(", 0) == 0) {
    if (s.back() != ')') throw InputError("model spec: unterminated product(...)");
    const std::string inner = s.substr(8, s.size() - 9);
    const auto parts = split(inner, '|');
    if (parts.size() < 2) throw InputError("model spec: product needs at least two factors");
    for (const auto& p : parts) {
      if (trim(p).rfind("product", 0) == 0)
        throw InputError("model spec: nested products are not supported");
      blocks.push_back(parse_block(p));
    }
  } else {
    blocks.push_back(parse_block(s));
  }
  return assemble(std::move(blocks));
}

Model model_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model config: ") + e.what());
  }
  try {
    if (j.contains("polynomial_metric")) {
      const auto& pm = j.at("polynomial_metric");
      const int n = pm.at("n").get<int>();
      if (n < 1 || n > kMaxDim) throw InputError("model config: dimension out of range");
      const double eps = pm.value("epsilon", 1.0);
      Block b;
      b.kind = Block::Kind::polynomial;
      b.n = n;
      for (const auto& c : pm.at("coefficients")) {
        PolyEntry e;
        e.i = c.at("i").get<int>();
        e.j = c.at("j").get<int>();
        e.exponents = c.at("monomial").get<std::vector<int>>();
        e.value = eps * c.at("value").get<double>();
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n)
          throw InputError("model config: coefficient index out of range");
        if (static_cast<int>(e.exponents.size()) != n)
          throw InputError("model config: monomial must list one exponent per coordinate");
        for (int p : e.exponents)
          if (p < 0 || p > 8) throw InputError("model config: exponent out of range");
        if (e.i > e.j) std::swap(e.i, e.j);
        b.entries.push_back(std::move(e));
      }
      std::vector<Block> blocks;
      blocks.push_back(std::move(b));
      return assemble(std::move(blocks));
    }
    if (j.contains("model")) {
      std::string spec = j.at("model").get<std::string>();
      if (j.contains("params")) {
        if (spec.find(':') != std::string::npos || spec.rfind("product(", 0) == 0)
          throw InputError(
              "model config: give parameters either inline in the spec or under \"params\"");
        std::string p;
        for (const auto& [key, val] : j.at("params").items()) {
          if (!p.empty()) p += ",";
          if (val.is_number_integer()) p += key + "=" + std::to_string(val.get<long long>());
          else if (val.is_number()) p += key + "=" + fmt_num(val.get<double>());
          else if (val.is_string()) p += key + "=" + val.get<std::string>();
          else throw InputError("model config: unsupported parameter type for " + key);
        }
        if (!p.empty()) spec += ":" + p;
      }
      return make_model(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model config: ") + e.what());
  }
  throw InputError("model config: expected a \"model\" or \"polynomial_metric\" object");
}

const std::vector<std::string>& model_catalog() {
  static const std::vector<std::string> names = {
      "euclidean:n=4",
      "sphere:n=4,r=1",
      "sphere:n=5,r=1",
      "hyperbolic:n=4,r=1",
      "polar2:r=1",
      "product(sphere:n=2,r=1|sphere:n=2,r=1)",
      "product(sphere:n=2,r=1|hyperbolic:n=2,r=1)",
      "perturbed_flat:n=4,seed=1,eps=0.05,deg=2",
      "perturbed_flat:n=5,seed=1,eps=0.05,deg=2",
  };
  return names;
}

}  // namespace curv
