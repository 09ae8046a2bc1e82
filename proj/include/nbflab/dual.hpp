#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace nbflab {

/// Forward-mode dual number with N derivative slots. The scalar type T may
/// itself be a Dual, which yields exact second derivatives by nesting.
/// Only the operations the flux/closure algebra needs are provided.
template <class T, std::size_t N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  Dual() = default;
  Dual(T value) : v(value) { d.fill(T{}); }  // NOLINT(google-explicit-constructor)
  Dual(T value, std::size_t slot) : v(value) {
    d.fill(T{});
    d[slot] = T{1};
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator-(const Dual& a) {
    Dual r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v * b.v;
    for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r;
    r.v = a.v / b.v;
    const T inv_b2 = T{1} / (b.v * b.v);
    for (std::size_t i = 0; i < N; ++i)
      r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv_b2;
    return r;
  }

  friend Dual operator*(double s, const Dual& a) { return Dual(T{s}) * a; }
  friend Dual operator*(const Dual& a, double s) { return a * Dual(T{s}); }
  friend Dual operator+(double s, const Dual& a) { return Dual(T{s}) + a; }
  friend Dual operator+(const Dual& a, double s) { return a + Dual(T{s}); }
  friend Dual operator-(double s, const Dual& a) { return Dual(T{s}) - a; }
  friend Dual operator-(const Dual& a, double s) { return a - Dual(T{s}); }
  friend Dual operator/(const Dual& a, double s) { return a / Dual(T{s}); }
  friend Dual operator/(double s, const Dual& a) { return Dual(T{s}) / a; }
};

template <class T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  Dual<T, N> r;
  r.v = sqrt(a.v);
  const T half_inv = T{0.5} / r.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * half_inv;
  return r;
}

}  // namespace nbflab
