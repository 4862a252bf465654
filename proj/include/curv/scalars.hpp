// Scalar contract for the grid algebra.  Every templated operation works over
// any type providing field arithmetic plus the small trait surface below:
//   * double          — fast mode, tolerance-based comparisons;
//   * Rational        — exact mode (GMP mpq_class), equality is exact;
//   * Dual<...>       — forward-mode differentiation, nested for higher order.
#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

namespace curv {

using Rational = mpq_class;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double from_int(long long v) { return static_cast<double>(v); }
  static double ratio(long long a, long long b) {
    return static_cast<double>(a) / static_cast<double>(b);
  }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static std::string name() { return "float64"; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational from_int(long long v) {
    return Rational(static_cast<long>(v));
  }
  static Rational ratio(long long a, long long b) {
    Rational r(static_cast<long>(a), static_cast<long>(b));
    r.canonicalize();
    return r;
  }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static std::string name() { return "rational"; }
};

// Convenience: exact integer embedding into any scalar.
template <class S>
S scalar_of(long long v) {
  return ScalarTraits<S>::from_int(v);
}

// a/b as a scalar (exact for Rational, rounded once for double).
template <class S>
S scalar_ratio(long long a, long long b) {
  return ScalarTraits<S>::ratio(a, b);
}

}  // namespace curv
