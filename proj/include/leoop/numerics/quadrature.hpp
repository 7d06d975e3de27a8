#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "leoop/errors.hpp"

namespace leoop {

struct QuadratureSpec {
  double rel_tol = 1e-4;
  double abs_tol = 0.0;
  int max_subdivisions = 200;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1)
      throw DomainError("QuadratureSpec: need rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1");
  }
};

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline bool finite_value(double v) { return std::isfinite(v); }
inline bool finite_value(const std::complex<double>& v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T fv[15];
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    fv[14 - j] = f(center + dx);
  }
  for (const T& v : fv)
    if (!finite_value(v)) {
      std::ostringstream os;
      os << "adaptive_quad: non-finite integrand on [" << a << ", " << b << "]";
      throw NumericError(os.str());
    }

  T kron = fv[7] * kWgk[7];
  T gauss = fv[7] * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const T pair = fv[j] + fv[14 - j];
    kron += pair * kWgk[j];
    if (j % 2 == 1) gauss += pair * kWg[j / 2];
  }
  const T mean = kron * 0.5;
  double resasc = kWgk[7] * magnitude(fv[7] - mean);
  double resabs = kWgk[7] * magnitude(fv[7]);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (magnitude(fv[j] - mean) + magnitude(fv[14 - j] - mean));
    resabs += kWgk[j] * (magnitude(fv[j]) + magnitude(fv[14 - j]));
  }
  resasc *= std::abs(half);
  resabs *= std::abs(half);

  double err = magnitude((kron - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, kron * half, err};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature: always bisects the interval
// with the largest error estimate. Works for real or complex integrands.
template <class F>
auto adaptive_quad_detailed(F&& f, double a, double b, const QuadratureSpec& spec = {})
    -> QuadResult<std::decay_t<decltype(f(a))>> {
  using T = std::decay_t<decltype(f(a))>;
  spec.validate();
  if (!(a < b)) throw DomainError("adaptive_quad: need a < b");

  std::priority_queue<detail::Segment<T>> heap;
  heap.push(detail::gk15<T>(f, a, b));
  T total = heap.top().value;
  double err = heap.top().error;
  int splits = 1;

  auto done = [&] { return err <= std::max(spec.abs_tol, spec.rel_tol * detail::magnitude(total)); };
  while (!done()) {
    if (splits >= spec.max_subdivisions) {
      std::ostringstream os;
      os << "adaptive_quad: subdivision budget (" << spec.max_subdivisions
         << ") exhausted, estimate " << detail::magnitude(total) << " +/- " << err;
      throw NumericError(os.str(), detail::magnitude(total), err);
    }
    detail::Segment<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15<T>(f, worst.a, mid);
    auto right = detail::gk15<T>(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++splits;
  }
  // Re-sum to shed the drift of the running updates.
  T sum{};
  double esum = 0.0;
  while (!heap.empty()) {
    sum += heap.top().value;
    esum += heap.top().error;
    heap.pop();
  }
  return {sum, esum, splits};
}

template <class F>
auto adaptive_quad(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  return adaptive_quad_detailed(std::forward<F>(f), a, b, spec).value;
}

// ∫_a^∞ f via t = a + s/(1-s).
template <class F>
auto adaptive_quad_semi_infinite(F&& f, double a, const QuadratureSpec& spec = {}) {
  auto g = [&](double s) {
    const double w = 1.0 - s;
    return f(a + s / w) * (1.0 / (w * w));
  };
  return adaptive_quad_detailed(g, 0.0, 1.0, spec);
}

}  // namespace leoop
