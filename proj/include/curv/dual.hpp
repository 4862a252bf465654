// Forward-mode dual numbers, nestable for higher-order derivatives:
// Dual<double> carries one directional derivative, Dual<Dual<double>> two
// orders, and so on.  The chart layer differentiates the full metric →
// connection → curvature pipeline this way, which needs order 3 (a divergence
// of a curvature-level field sees third derivatives of the metric).
#pragma once

#include <cmath>
#include <string>

#include "curv/scalars.hpp"

namespace curv {

template <class T>
struct Dual {
  T a{};  // value
  T b{};  // derivative part

  Dual() = default;
  Dual(const T& value) : a(value) {}  // NOLINT: implicit lift is the point
  Dual(const T& value, const T& deriv) : a(value), b(deriv) {}

  Dual& operator+=(const Dual& o) { a += o.a; b += o.b; return *this; }
  Dual& operator-=(const Dual& o) { a -= o.a; b -= o.b; return *this; }
  Dual& operator*=(const Dual& o) {
    b = a * o.b + b * o.a;
    a = a * o.a;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    a = a / o.a;
    b = (b - a * o.b) / o.a;
    return *this;
  }

  friend Dual operator+(Dual x, const Dual& y) { return x += y; }
  friend Dual operator-(Dual x, const Dual& y) { return x -= y; }
  friend Dual operator*(Dual x, const Dual& y) { return x *= y; }
  friend Dual operator/(Dual x, const Dual& y) { return x /= y; }
  friend Dual operator-(const Dual& x) { return Dual(-x.a, -x.b); }

  friend bool operator==(const Dual& x, const Dual& y) { return x.a == y.a && x.b == y.b; }
};

// Leading value of an arbitrarily nested dual.
inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.a); }

// Constant lift of a double into any nesting level (the implicit constructor
// chain only covers one level at a time).
template <class S>
struct FromDouble {
  static S get(double c) { return S(c); }
};
template <class T>
struct FromDouble<Dual<T>> {
  static Dual<T> get(double c) { return Dual<T>(FromDouble<T>::get(c)); }
};
template <class S>
S from_double(double c) {
  return FromDouble<S>::get(c);
}

using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T r = sqrt(x.a);
  return Dual<T>(r, x.b / (scalar_of<T>(2) * r));
}
template <class T>
Dual<T> sin(const Dual<T>& x) { return Dual<T>(sin(x.a), x.b * cos(x.a)); }
template <class T>
Dual<T> cos(const Dual<T>& x) { return Dual<T>(cos(x.a), -x.b * sin(x.a)); }
template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.a);
  return Dual<T>(e, x.b * e);
}

template <class T>
Dual<T> dual_abs(const Dual<T>& x) { return value_of(x) < 0 ? -x : x; }

template <class T>
struct ScalarTraits<Dual<T>> {
  static constexpr bool exact = false;
  static Dual<T> from_int(long long v) { return Dual<T>(ScalarTraits<T>::from_int(v)); }
  static Dual<T> ratio(long long a, long long b) { return Dual<T>(ScalarTraits<T>::ratio(a, b)); }
  static Dual<T> abs(const Dual<T>& x) { return dual_abs(x); }
  static double to_double(const Dual<T>& x) { return value_of(x); }
  static std::string name() { return "dual<" + ScalarTraits<T>::name() + ">"; }
};

// The three nesting levels used by the chart layer.
using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;

}  // namespace curv
