#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "leoop/errors.hpp"
#include "leoop/numerics/special.hpp"

namespace leoop {

// Shadowed-Rician power gain H = eta |h|^2 with integer Nakagami shape m.
struct ShadowedRicianParams {
  int m = 2;
  double b = 0.063;
  double omega = 0.0005;
  double eta = 1.0;

  static ShadowedRicianParams average_shadowing() { return {2, 0.063, 0.0005, 1.0}; }
  static ShadowedRicianParams heavy_shadowing() { return {5, 0.251, 0.279, 1.0}; }

  ShadowedRicianParams with_eta(double e) const {
    auto p = *this;
    p.eta = e;
    return p;
  }

  void validate() const {
    if (m < 1) throw DomainError("shadowed-Rician: m must be a positive integer");
    if (!(b > 0.0)) throw DomainError("shadowed-Rician: b must be positive");
    if (!(omega >= 0.0)) throw DomainError("shadowed-Rician: omega must be non-negative");
    if (!(eta > 0.0)) throw DomainError("shadowed-Rician: eta must be positive");
  }
};

// alpha, beta, delta and zeta(kappa) of the finite-sum density.
struct SrCoefficients {
  double alpha;
  double beta;
  double delta;
  std::vector<double> zeta;
  double slope() const { return beta - delta; }
};

inline SrCoefficients sr_coefficients(const ShadowedRicianParams& p) {
  p.validate();
  const double two_b = 2.0 * p.b;
  const double two_bm = two_b * p.m;
  SrCoefficients c;
  c.alpha = std::pow(two_bm / (two_bm + p.omega), p.m) / two_b;
  c.beta = 1.0 / two_b;
  c.delta = p.omega / (two_b * (two_bm + p.omega));
  c.zeta.resize(p.m);
  double fact = 1.0;
  for (int k = 0; k < p.m; ++k) {
    if (k > 0) fact *= k;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    c.zeta[k] = sign * pochhammer(1.0 - p.m, k) * std::pow(c.delta, k) / (fact * fact);
  }
  return c;
}

inline double sr_pdf(double x, const ShadowedRicianParams& p) {
  if (x < 0.0) return 0.0;
  const auto c = sr_coefficients(p);
  const double y = x / p.eta;
  double sum = 0.0, yk = 1.0;
  for (int k = 0; k < p.m; ++k) {
    sum += c.zeta[k] * yk;
    yk *= y;
  }
  return c.alpha / p.eta * sum * std::exp(-c.slope() * y);
}

inline double sr_cdf(double x, const ShadowedRicianParams& p) {
  if (x < 0.0) throw DomainError("sr_cdf: x must be non-negative");
  const auto c = sr_coefficients(p);
  if (x == 0.0) return 0.0;
  const double y = x / p.eta;
  const double s = c.slope();
  double survival = 0.0;
  double kfact = 1.0;
  for (int k = 0; k < p.m; ++k) {
    if (k > 0) kfact *= k;
    double inner = 0.0, pfact = 1.0, yp = 1.0;
    for (int q = 0; q <= k; ++q) {
      if (q > 0) {
        pfact *= q;
        yp *= y;
      }
      inner += kfact / pfact * std::pow(s, -(k + 1 - q)) * yp;
    }
    survival += c.zeta[k] * inner;
  }
  const double F = 1.0 - c.alpha * survival * std::exp(-s * y);
  return F < 0.0 ? 0.0 : F;
}

inline double sr_mean(const ShadowedRicianParams& p) {
  const auto c = sr_coefficients(p);
  double sum = 0.0, fact = 1.0;  // Γ(k+2) = (k+1)!
  for (int k = 0; k < p.m; ++k) {
    fact *= (k + 1);
    sum += c.zeta[k] * fact / std::pow(c.slope(), k + 2);
  }
  return c.alpha * p.eta * sum;
}

// h = sqrt(G) e^{j theta} + (X + jY), G ~ Gamma(m, omega/m), X,Y ~ N(0, b).
class SrSampler {
 public:
  explicit SrSampler(const ShadowedRicianParams& p)
      : p_(p),
        los_(static_cast<double>(p.m), p.omega > 0.0 ? p.omega / p.m : 1.0),
        diffuse_(0.0, std::sqrt(p.b)),
        phase_(0.0, 2.0 * std::numbers::pi) {
    p.validate();
  }

  template <class Rng>
  double operator()(Rng& rng) {
    double re = diffuse_(rng), im = diffuse_(rng);
    if (p_.omega > 0.0) {
      const double amp = std::sqrt(los_(rng));
      const double th = phase_(rng);
      re += amp * std::cos(th);
      im += amp * std::sin(th);
    }
    return p_.eta * (re * re + im * im);
  }

 private:
  ShadowedRicianParams p_;
  std::gamma_distribution<double> los_;
  std::normal_distribution<double> diffuse_;
  std::uniform_real_distribution<double> phase_;
};

template <class Rng>
std::vector<double> sample_sr(std::size_t n, const ShadowedRicianParams& p, Rng& rng) {
  SrSampler draw(p);
  std::vector<double> out(n);
  for (auto& v : out) v = draw(rng);
  return out;
}

struct CsiMismatch {
  double phi = 0.0;  // error scale
  double chi = 0.0;  // decay with link SNR
  double xi = 0.0;   // residual error per SIC cancellation

  void validate() const {
    if (!(phi >= 0.0) || !(chi >= 0.0) || !(xi >= 0.0))
      throw ConfigError("CSI mismatch parameters must be non-negative");
  }
};

inline double csi_error_variance(double phi, double chi, double eta) {
  if (!(eta > 0.0)) throw DomainError("csi_error_variance: eta must be positive");
  if (phi == 0.0) return 0.0;
  return phi * std::pow(eta, -chi);
}

}  // namespace leoop
