// Catalog of desk-scale Riemannian models: flat space, round spheres on the
// stereographic chart, hyperbolic balls, a polar two-sphere calibration chart,
// block products, and seeded polynomial perturbations of the flat metric.
// Every chart ships analytic first partials; space forms and their products
// additionally expose exact rational curvature.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curv/curvature.hpp"
#include "curv/geometry.hpp"

namespace curv {

// one monomial contribution  value * prod_t x_t^exponents[t]  to g_ij
struct PolyEntry {
  int i = 0, j = 0;
  std::vector<int> exponents;
  double value = 0.0;
};

// Closed-form expectations, populated only where a closed form exists.
struct ExpectedValues {
  std::optional<double> sectional;      // constant sectional curvature
  std::optional<double> scal;
  std::optional<double> ric_factor;     // Ric = factor * g
  std::optional<double> h4;             // second Gauss-Bonnet scalar
  std::optional<int> self_dual_sign;    // +1 / -1 for the middle double dual, n = 4
  bool scal_constant = false;
  bool weyl_harmonic = false;
  bool einstein = false;
  bool flat = false;
};

struct Model {
  std::string name;                     // canonical spec, parseable by make_model
  int n = 0;
  MetricChart chart;
  ExpectedValues expected;
  std::vector<Vec<double>> sample_points;
  bool exact = false;                   // rational curvature closed form available
  // (dimension, sectional curvature) per product block when exact
  std::vector<std::pair<int, Rational>> exact_blocks;
};

// Block-diagonal constant-curvature tensor promised by exact_blocks.
AlgebraicCurvature<Rational> exact_curvature(const Model& m);

// Spec grammar:
//   simple   :=  name[:key=value,...]
//   product  :=  product(simple|simple[|simple...])
// names and keys:
//   euclidean        n
//   sphere           n, r (radius, default 1)
//   hyperbolic       n, r (Poincare ball radius, default 1)
//   polar2           r (default 1; dimension is 2)
//   perturbed_flat   n, seed (default 1), eps (default 0.05), deg (default 2)
Model make_model(const std::string& spec);

// JSON forms: {"model": <spec or name>, "params": {...}} or
// {"polynomial_metric": {"n":..., "epsilon":..., "coefficients":
//   [{"i":..., "j":..., "monomial":[exponents...], "value":...}, ...]}}
Model model_from_json(const std::string& json_text);

// canonical spec strings of the shipped catalog entries
const std::vector<std::string>& model_catalog();

}  // namespace curv
