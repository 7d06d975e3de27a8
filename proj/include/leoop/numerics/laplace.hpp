#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "leoop/errors.hpp"

namespace leoop {

// Fourier-series inversion with Euler summation of the tail.
struct EulerInversionSpec {
  double D = 10.0 * std::numbers::ln10;
  int N = 21;
  int Q = 15;

  void validate() const {
    if (!(D > 0.0) || N < 1 || Q < 1) throw DomainError("EulerInversionSpec: need D > 0, N >= 1, Q >= 1");
  }
};

// Recovers F(x) from its Laplace transform F̂(s). For a CDF with flipped
// MGF M, pass s -> M(-s)/s. The value is not clamped.
template <class Transform>
double invert_laplace_euler(Transform&& transform, double x, const EulerInversionSpec& spec = {}) {
  spec.validate();
  if (!(x > 0.0)) throw DomainError("invert_laplace_euler: x must be positive");

  const int last = spec.N + spec.Q + 1;
  std::vector<double> re(static_cast<std::size_t>(last) + 1);
  for (int n = 0; n <= last; ++n) {
    const std::complex<double> s((spec.D) / (2.0 * x), 2.0 * std::numbers::pi * n / (2.0 * x));
    re[n] = std::real(transform(s));
  }

  // Partial sums with Δ_0 = 2, Δ_n = 1 otherwise.
  std::vector<double> partial(re.size());
  double acc = 0.0;
  for (int n = 0; n <= last; ++n) {
    acc += ((n % 2 == 0) ? 1.0 : -1.0) * re[n] / (n == 0 ? 2.0 : 1.0);
    partial[n] = acc;
  }

  double binom = 1.0;  // C(Q,q)
  double main_sum = 0.0, tail = 0.0;
  for (int q = 0; q <= spec.Q; ++q) {
    main_sum += binom * partial[spec.N + q];
    const int k = spec.N + q + 1;
    tail += ((k % 2 == 0) ? 1.0 : -1.0) * binom * re[k];
    binom = binom * (spec.Q - q) / (q + 1.0);
  }

  const double pref = std::exp2(-spec.Q) * std::exp(0.5 * spec.D) / x;
  const double discretization = std::exp(-spec.D) / (1.0 - std::exp(-spec.D));
  const double value = pref * main_sum + discretization + pref * tail;
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "invert_laplace_euler: non-finite result at x=" << x;
    throw NumericError(os.str());
  }
  return value;
}

}  // namespace leoop
