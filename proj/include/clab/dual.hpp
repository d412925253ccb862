#pragma once
// Forward-mode dual numbers. Nesting gives higher derivatives:
//   HyperDual = Dual<Dual<double>>  carries f, f_a, f_b, f_ab
// and Dual<HyperDual> adds one more independent direction.

#include <cmath>
#include <type_traits>

#include <Eigen/Core>

namespace clab {

template <class T>
struct Dual {
  T v{};
  T d{};

  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit on purpose
  Dual(const T& value, const T& deriv) : v(value), d(deriv) {}
  template <class U, std::enable_if_t<!std::is_same_v<U, T> && !std::is_same_v<U, double> &&
                                          std::is_constructible_v<T, U>, int> = 0>
  Dual(const U& x) : v(x), d(0.0) {}  // NOLINT

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    T inv = T(1.0) / o.v;
    v *= inv;
    d = (d - v * o.d) * inv;
    return *this;
  }
};

using Dual1 = Dual<double>;
using HyperDual = Dual<Dual<double>>;
using HyperDual3 = Dual<HyperDual>;

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

inline double real(double x) { return x; }
template <class T>
double real(const Dual<T>& x) { return real(x.v); }

// Arithmetic
template <class T> Dual<T> operator+(const Dual<T>& a) { return a; }
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class T> Dual<T> operator+(Dual<T> a, double b) { a.v += b; return a; }
template <class T> Dual<T> operator+(double b, Dual<T> a) { a.v += b; return a; }
template <class T> Dual<T> operator-(Dual<T> a, double b) { a.v -= b; return a; }
template <class T> Dual<T> operator-(double b, const Dual<T>& a) { return {b - a.v, -a.d}; }
template <class T> Dual<T> operator*(Dual<T> a, double b) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator*(double b, Dual<T> a) { a.v *= b; a.d *= b; return a; }
template <class T> Dual<T> operator/(Dual<T> a, double b) { a.v /= b; a.d /= b; return a; }
template <class T> Dual<T> operator/(double b, const Dual<T>& a) {
  T inv = T(1.0) / a.v;
  return {b * inv, -b * a.d * inv * inv};
}

// Comparisons look at the value only.
template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return real(a) < real(b); }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return real(a) > real(b); }
template <class T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return real(a) <= real(b); }
template <class T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return real(a) >= real(b); }
template <class T> bool operator==(const Dual<T>& a, const Dual<T>& b) { return a.v == b.v && a.d == b.d; }
template <class T> bool operator!=(const Dual<T>& a, const Dual<T>& b) { return !(a == b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return real(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return real(a) > b; }
template <class T> bool operator<(double a, const Dual<T>& b) { return a < real(b); }
template <class T> bool operator>(double a, const Dual<T>& b) { return a > real(b); }

// Elementary functions. The chain rule is applied once per nesting level.
using std::sqrt; using std::sin; using std::cos; using std::exp; using std::log;
using std::atan2; using std::asin; using std::acos; using std::atan; using std::pow; using std::abs;
using std::tan;

template <class T> Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -sin(a.v) * a.d}; }
template <class T> Dual<T> tan(const Dual<T>& a) {
  T t = tan(a.v);
  return {t, (1.0 + t * t) * a.d};
}
template <class T> Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T> Dual<T> log(const Dual<T>& a) { return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> atan(const Dual<T>& a) { return {atan(a.v), a.d / (1.0 + a.v * a.v)}; }
template <class T> Dual<T> asin(const Dual<T>& a) { return {asin(a.v), a.d / sqrt(1.0 - a.v * a.v)}; }
template <class T> Dual<T> acos(const Dual<T>& a) { return {acos(a.v), -a.d / sqrt(1.0 - a.v * a.v)}; }
template <class T> Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T r2 = x.v * x.v + y.v * y.v;
  return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}
template <class T> Dual<T> pow(const Dual<T>& a, double p) {
  T pm1 = pow(a.v, p - 1.0);
  return {pm1 * a.v, p * pm1 * a.d};
}
template <class T> Dual<T> abs(const Dual<T>& a) { return real(a) < 0.0 ? -a : a; }

template <class T> inline T sq(const T& x) { return x * x; }

// Seed helpers
inline Dual1 seed1(double x, double dx) { return {x, dx}; }
inline HyperDual seed2(double x, double da, double db) { return {Dual1(x, da), Dual1(db, 0.0)}; }

inline double hd_value(const HyperDual& h) { return h.v.v; }
inline double hd_da(const HyperDual& h) { return h.v.d; }
inline double hd_db(const HyperDual& h) { return h.d.v; }
inline double hd_dab(const HyperDual& h) { return h.d.d; }

// Lift a value into the outermost derivative slot of Dual<T>.
template <class T> Dual<T> constant(const T& x) { return {x, T(0.0)}; }

}  // namespace clab

namespace Eigen {
template <class T>
struct NumTraits<clab::Dual<T>> : NumTraits<double> {
  using Real = clab::Dual<T>;
  using NonInteger = clab::Dual<T>;
  using Nested = clab::Dual<T>;
  using Literal = clab::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost
  };
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<clab::Dual<T>, double, BinaryOp> { using ReturnType = clab::Dual<T>; };
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, clab::Dual<T>, BinaryOp> { using ReturnType = clab::Dual<T>; };
}  // namespace Eigen
