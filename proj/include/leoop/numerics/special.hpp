#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "leoop/errors.hpp"
#include "leoop/numerics/quadrature.hpp"

namespace leoop {

using cplx = std::complex<double>;

namespace detail {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

inline bool is_integer(double x, double tol = 0.0) {
  return std::abs(x - std::round(x)) <= tol * std::max(1.0, std::abs(x));
}

// 1/Γ(x), zero at the poles.
inline double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 170.0) return std::exp(-std::lgamma(x));
  return 1.0 / std::tgamma(x);
}

inline double digamma(double x) { return boost::math::digamma(x); }

template <class T>
double mag(const T& v) {
  return std::abs(v);
}

}  // namespace detail

inline double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

inline double lower_incomplete_gamma(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0)) throw DomainError("lower_incomplete_gamma: need s > 0, x >= 0");
  if (x == 0.0) return 0.0;
  try {
    return boost::math::tgamma_lower(s, x);
  } catch (const std::exception& e) {
    throw NumericError(std::string("lower_incomplete_gamma: ") + e.what());
  }
}

inline double pochhammer(double x, unsigned k) {
  double r = 1.0;
  for (unsigned i = 0; i < k; ++i) r *= x + i;
  return r;
}

// K_v(x); negative orders map to |v|.
inline double bessel_k(double v, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: argument must be positive");
  try {
    return boost::math::cyl_bessel_k(std::abs(v), x);
  } catch (const std::overflow_error&) {
    std::ostringstream os;
    os << "bessel_k: overflow at v=" << v << ", x=" << x;
    throw NumericError(os.str());
  }
}

namespace detail {

template <class T>
struct Series {
  T value;
  double largest;  // largest |term|, used to judge cancellation
};

// Kummer's M(a,b,z) = Σ (a)_k/(b)_k z^k/k!.
template <class T>
Series<T> kummer_m(double a, double b, T z) {
  T term = 1.0, sum = 1.0;
  double largest = 1.0;
  for (int k = 0; k < 5000; ++k) {
    term *= z * ((a + k) / ((b + k) * (k + 1.0)));
    sum += term;
    largest = std::max(largest, mag(term));
    if (mag(term) <= kEps * mag(sum) && k + 1.0 > mag(z)) return {sum, largest};
    if (term == T(0.0)) return {sum, largest};
  }
  throw NumericError("kummer_m: series did not converge");
}

// U(-n, b, z) is a polynomial of degree n.
template <class T>
Series<T> tricomi_u_polynomial(int n, double b, T z) {
  T sum = 0.0;
  double largest = 0.0;
  double binom = 1.0;
  T zs = 1.0;
  for (int s = 0; s <= n; ++s) {
    const T term = binom * pochhammer(b + s, static_cast<unsigned>(n - s)) * zs * ((s % 2 == 0) ? 1.0 : -1.0);
    sum += term;
    largest = std::max(largest, mag(term));
    binom = binom * (n - s) / (s + 1.0);
    zs *= z;
  }
  if (n % 2 != 0) sum = -sum;
  return {sum, largest};
}

// U(a, n+1, z) for integer n >= 0 (logarithmic case).
template <class T>
Series<T> tricomi_u_integer_b(double a, int n, T z) {
  T result = 0.0;
  double largest = 0.0;

  const double ra_n = rgamma(a - n);
  if (ra_n != 0.0) {
    double fact_n = 1.0;
    for (int i = 2; i <= n; ++i) fact_n *= i;
    const double pref = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * ra_n / fact_n;
    const T lz = std::log(z);
    double psi_a = digamma(a), psi_1 = digamma(1.0), psi_n = digamma(n + 1.0);
    double c = 1.0;
    T zk = 1.0;
    T sum = 0.0;
    int quiet = 0;
    for (int k = 0; k < 5000; ++k) {
      const T term = pref * c * zk * (lz + psi_a - psi_1 - psi_n);
      sum += term;
      largest = std::max(largest, mag(term));
      if (mag(term) <= kEps * mag(sum) && k + 1.0 > mag(z)) {
        if (++quiet == 2) break;
      } else {
        quiet = 0;
      }
      c *= (a + k) / ((n + 1.0 + k) * (k + 1.0));
      zk *= z;
      psi_a += 1.0 / (a + k);
      psi_1 += 1.0 / (1.0 + k);
      psi_n += 1.0 / (n + 1.0 + k);
      if (k == 4999) throw NumericError("tricomi_u: logarithmic series did not converge");
    }
    result += sum;
  }

  const double ra = rgamma(a);
  if (ra != 0.0 && n > 0) {
    T zinv = 1.0 / z, zpow = zinv;
    double fact_km1 = 1.0;  // (k-1)!
    for (int k = 1; k <= n; ++k) {
      double fact_nk = 1.0;
      for (int i = 2; i <= n - k; ++i) fact_nk *= i;
      const T term = ra * fact_km1 * pochhammer(1.0 - a + k, static_cast<unsigned>(n - k)) / fact_nk * zpow;
      result += term;
      largest = std::max(largest, mag(term));
      fact_km1 *= k;
      zpow *= zinv;
    }
  }
  return {result, largest};
}

// U(a,b,z) for non-integer b through the two Kummer solutions.
template <class T>
Series<T> tricomi_u_general_b(double a, double b, T z) {
  T result = 0.0;
  double largest = 0.0;
  const double c1 = std::tgamma(1.0 - b) * rgamma(a - b + 1.0);
  if (c1 != 0.0) {
    auto m1 = kummer_m(a, b, z);
    result += c1 * m1.value;
    largest = std::max(largest, std::abs(c1) * m1.largest);
  }
  const double c2 = std::tgamma(b - 1.0) * rgamma(a);
  if (c2 != 0.0) {
    auto m2 = kummer_m(a - b + 1.0, 2.0 - b, z);
    const T zp = std::pow(z, 1.0 - b);
    result += c2 * zp * m2.value;
    largest = std::max(largest, std::abs(c2) * mag(zp) * m2.largest);
  }
  return {result, largest};
}

// z^{-a} Σ (a)_k (a-b+1)_k / k! (-z)^{-k}; returns false if the smallest
// term is still above 1e-12 of the sum when the terms start growing.
template <class T>
bool tricomi_u_asymptotic(double a, double b, T z, T& out) {
  T term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int k = 0; k < 500; ++k) {
    term *= -(a + k) * (a - b + 1.0 + k) / (k + 1.0) / z;
    const double m = mag(term);
    if (m == 0.0) break;
    if (m > prev) {
      if (prev <= 1e-12 * mag(sum)) break;
      return false;
    }
    sum += term;
    prev = m;
    if (m <= kEps * mag(sum)) break;
    if (k == 499) return false;
  }
  out = sum * std::pow(z, -a);
  return true;
}

template <class T>
bool in_right_half_plane(const T& z) {
  return std::real(z) > 0.0;
}

}  // namespace detail

// Tricomi's confluent hypergeometric function U(a,b,z) for real or complex
// z off the negative real axis.
template <class T>
T tricomi_u(double a, double b, T z) {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>);
  if constexpr (std::is_same_v<T, double>) {
    if (!(z > 0.0)) throw DomainError("tricomi_u: real argument must be positive");
  } else {
    if (z == cplx(0.0) || (z.imag() == 0.0 && z.real() < 0.0))
      throw DomainError("tricomi_u: argument on the branch cut");
  }

  if (detail::is_nonpositive_integer(a)) return detail::tricomi_u_polynomial(static_cast<int>(-a), b, z).value;

  const double az = std::abs(z);
  if (az >= 20.0) {
    T v;
    if (detail::tricomi_u_asymptotic(a, b, z, v)) return v;
  }

  detail::Series<T> s{};
  if (detail::is_integer(b, 1e-13)) {
    const int bi = static_cast<int>(std::lround(b));
    if (bi >= 1) {
      s = detail::tricomi_u_integer_b(a, bi - 1, z);
    } else {
      // Kummer transformation moves b to 2-b >= 2.
      const double a2 = a - bi + 1.0;
      if (detail::is_nonpositive_integer(a2)) {
        s = detail::tricomi_u_polynomial(static_cast<int>(-a2), 2.0 - bi, z);
      } else {
        s = detail::tricomi_u_integer_b(a2, 1 - bi, z);
      }
      const T zp = std::pow(z, 1.0 - bi);
      s.value *= zp;
      s.largest *= std::abs(zp);
    }
  } else {
    s = detail::tricomi_u_general_b(a, b, z);
  }

  const double loss = detail::kEps * s.largest / std::max(std::abs(s.value), std::numeric_limits<double>::min());
  if (loss <= 1e-10) return s.value;

  // Heavy cancellation: fall back to Γ(a)U = ∫ e^{-zt} t^{a-1} (1+t)^{b-a-1} dt.
  if (a > 0.0 && detail::in_right_half_plane(z)) {
    auto f = [&](double t) -> T {
      if (t <= 0.0) return T(0.0);
      return std::exp(-z * t) * std::pow(t, a - 1.0) * std::pow(1.0 + t, b - a - 1.0);
    };
    QuadratureSpec qs{1e-10, 0.0, 2000};
    auto r = adaptive_quad_semi_infinite(f, 0.0, qs);
    return r.value * detail::rgamma(a);
  }
  std::ostringstream os;
  os << "tricomi_u: series lost precision (estimated relative error " << loss << ") at a=" << a << ", b=" << b
     << ", |z|=" << az;
  throw NumericError(os.str(), std::abs(s.value), loss * std::abs(s.value));
}

// Whittaker W_{k,m}(z) = e^{-z/2} z^{m+1/2} U(m-k+1/2, 1+2m, z).
template <class T>
T whittaker_w(double k, double m, T z) {
  if constexpr (std::is_same_v<T, double>) {
    if (!(z > 0.0)) throw DomainError("whittaker_w: argument must be positive");
  }
  return std::exp(-0.5 * z) * std::pow(z, m + 0.5) * tricomi_u(m - k + 0.5, 1.0 + 2.0 * m, z);
}

namespace detail {

template <class T>
T hyp2f1_direct(double a, double b, double c, T z, int max_terms = 20000) {
  T term = 1.0, sum = 1.0;
  int quiet = 0;
  for (int k = 0; k < max_terms; ++k) {
    term *= z * ((a + k) * (b + k) / ((c + k) * (k + 1.0)));
    sum += term;
    if (term == T(0.0)) return sum;
    if (mag(term) <= kEps * mag(sum)) {
      if (++quiet == 2) return sum;
    } else {
      quiet = 0;
    }
  }
  std::ostringstream os;
  os << "hyp2f1: power series did not converge at |z|=" << mag(z);
  throw NumericError(os.str());
}

// Expansions around z = 1 (w = 1 - z), split by whether c-a-b is an integer.
template <class T>
T hyp2f1_one_minus_z(double a, double b, double c, T z) {
  const T w = 1.0 - z;
  const double s = c - a - b;
  const double m_round = std::round(s);
  if (std::abs(s - m_round) > 1e-9) {
    const double g1 = std::tgamma(c) * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
    const double g2 = std::tgamma(c) * std::tgamma(-s) * rgamma(a) * rgamma(b);
    T r = 0.0;
    if (g1 != 0.0) r += g1 * hyp2f1_direct(a, b, 1.0 - s, w);
    if (g2 != 0.0) r += g2 * std::pow(w, s) * hyp2f1_direct(c - a, c - b, 1.0 + s, w);
    return r;
  }

  const int m = static_cast<int>(m_round);
  const T lw = std::log(w);
  auto log_series = [&](double a0, double b0, int shift, double pa0, double pb0) {
    // Σ_n (a0)_n (b0)_n / (n! (n+shift)!) w^n [ln w - ψ(n+1) - ψ(n+shift+1) + ψ(pa0+n) + ψ(pb0+n)]
    double fact_shift = 1.0;
    for (int i = 2; i <= shift; ++i) fact_shift *= i;
    double coef = 1.0 / fact_shift;
    double psi1 = digamma(1.0), psis = digamma(shift + 1.0);
    double psa = digamma(pa0), psb = digamma(pb0);
    T wn = 1.0, sum = 0.0;
    int quiet = 0;
    for (int n = 0; n < 20000; ++n) {
      const T term = coef * wn * (lw - psi1 - psis + psa + psb);
      sum += term;
      if (mag(term) <= kEps * mag(sum)) {
        if (++quiet == 2) return sum;
      } else {
        quiet = 0;
      }
      coef *= (a0 + n) * (b0 + n) / ((n + 1.0) * (n + shift + 1.0));
      wn *= w;
      psi1 += 1.0 / (n + 1.0);
      psis += 1.0 / (n + shift + 1.0);
      psa += 1.0 / (pa0 + n);
      psb += 1.0 / (pb0 + n);
    }
    throw NumericError("hyp2f1: logarithmic series did not converge");
  };

  if (m == 0) {
    // c = a + b
    const double pref = std::tgamma(a + b) * rgamma(a) * rgamma(b);
    return -pref * log_series(a, b, 0, a, b);
  }
  if (m > 0) {
    // c = a + b + m
    T finite = 0.0, wn = 1.0;
    double coef = 1.0;
    for (int n = 0; n < m; ++n) {
      finite += coef * wn;
      coef *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n));
      wn *= w;
    }
    const double cab = a + b + m;
    const T first = std::tgamma(static_cast<double>(m)) * std::tgamma(cab) * rgamma(a + m) * rgamma(b + m) * finite;
    const double pref = std::tgamma(cab) * rgamma(a) * rgamma(b);
    if (pref == 0.0) return first;
    return first - std::pow(-w, static_cast<double>(m)) * pref * log_series(a + m, b + m, m, a + m, b + m);
  }
  // c = a + b - mm
  const int mm = -m;
  T finite = 0.0, wn = 1.0;
  double coef = 1.0;
  for (int n = 0; n < mm; ++n) {
    finite += coef * wn;
    coef *= (a - mm + n) * (b - mm + n) / ((n + 1.0) * (1.0 - mm + n));
    wn *= w;
  }
  const double cab = a + b - mm;
  const T first = std::tgamma(static_cast<double>(mm)) * std::tgamma(cab) * rgamma(a) * rgamma(b) *
                  std::pow(w, -static_cast<double>(mm)) * finite;
  const double pref = std::tgamma(cab) * rgamma(a - mm) * rgamma(b - mm);
  if (pref == 0.0) return first;
  return first - ((mm % 2 == 0) ? 1.0 : -1.0) * pref * log_series(a, b, mm, a, b);
}

}  // namespace detail

// Gauss hypergeometric ₂F₁(a,b;c;z) for real or complex z.
template <class T>
T hyp2f1(double a, double b, double c, T z) {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>);
  if (detail::is_nonpositive_integer(c)) throw DomainError("hyp2f1: c must not be a non-positive integer");
  if (z == T(0.0)) return T(1.0);
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b))
    return detail::hyp2f1_direct(a, b, c, z);

  const double az = std::abs(z);
  if (az <= 0.9) return detail::hyp2f1_direct(a, b, c, z);
  if (std::abs(T(1.0) - z) <= 0.9) return detail::hyp2f1_one_minus_z(a, b, c, z);

  // Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a,c-b;c;z/(z-1)).
  const T zp = z / (z - 1.0);
  if (std::abs(zp) <= 0.9) return std::pow(1.0 - z, -a) * detail::hyp2f1_direct(a, c - b, c, zp);
  if (az < 1.0) return detail::hyp2f1_direct(a, b, c, z, 2000000);

  std::ostringstream os;
  os << "hyp2f1: no convergent representation for |z|=" << az;
  throw NumericError(os.str());
}

}  // namespace leoop
