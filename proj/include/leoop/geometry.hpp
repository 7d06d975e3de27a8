#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "leoop/errors.hpp"

namespace leoop {

// BPP constellation seen from one ground user. Lengths in km, angle in degrees.
struct GeometryParams {
  double r_e = 6371.0;
  double r_min = 1200.0;  // orbital altitude d
  double theta0_deg = 10.0;
  int K = 720;

  void validate() const {
    if (!(r_e > 0.0)) throw ConfigError("geometry: earth radius must be positive");
    if (!(r_min > 0.0)) throw ConfigError("geometry: altitude must be positive");
    if (!(theta0_deg >= 0.0 && theta0_deg < 90.0)) throw ConfigError("geometry: mask angle must lie in [0, 90)");
    if (K < 1) throw ConfigError("geometry: constellation size must be >= 1");
  }
};

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Slant range at the mask angle: law of cosines in the Earth-centre /
// user / satellite triangle.
inline double max_slant_range(const GeometryParams& p) {
  const double rs = p.r_e * std::sin(deg_to_rad(p.theta0_deg));
  const double h = p.r_e + p.r_min;
  return std::sqrt(rs * rs + h * h - p.r_e * p.r_e) - rs;
}

inline double range_cdf(double r, const GeometryParams& p) {
  const double rmax = max_slant_range(p);
  if (r < p.r_min) return 0.0;
  if (r >= rmax) return 1.0;
  return (r * r - p.r_min * p.r_min) / (rmax * rmax - p.r_min * p.r_min);
}

inline double range_pdf(double r, const GeometryParams& p) {
  const double rmax = max_slant_range(p);
  if (r < p.r_min || r > rmax || !(rmax > p.r_min)) return 0.0;
  return 2.0 * r / (rmax * rmax - p.r_min * p.r_min);
}

// Inverse CDF.
inline double range_quantile(double u, const GeometryParams& p) {
  const double rmax = max_slant_range(p);
  const double r2 = p.r_min * p.r_min;
  return std::sqrt(r2 + u * (rmax * rmax - r2));
}

template <class Rng>
std::vector<double> sample_ranges(std::size_t n, const GeometryParams& p, Rng& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& r : out) r = range_quantile(uni(rng), p);
  return out;
}

// Fraction of the orbital sphere inside the visible cap.
inline double visibility_probability(const GeometryParams& p) {
  const double rmax = max_slant_range(p);
  const double v = (rmax * rmax - p.r_min * p.r_min) / (4.0 * p.r_e * (p.r_e + p.r_min));
  return v > 0.0 ? v : 0.0;
}

// P[Bin(K, P) >= S].
inline double binomial_upper_tail(int S, int K, double P) {
  if (S > K || K < 1) throw DomainError("binomial_upper_tail: need S <= K");
  if (!(P >= 0.0 && P <= 1.0)) throw DomainError("binomial_upper_tail: P must lie in [0,1]");
  if (S <= 0) return 1.0;
  if (P == 0.0) return 0.0;
  if (P == 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(S), static_cast<double>(K - S + 1), P);
}

inline double prob_at_least_visible(int S, const GeometryParams& p) {
  if (S < 1) throw DomainError("prob_at_least_visible: S must be >= 1");
  if (S > p.K) throw DomainError("prob_at_least_visible: S exceeds the constellation size");
  return binomial_upper_tail(S, p.K, visibility_probability(p));
}

// E[R^{-alpha}] in km^{-alpha}.
inline double mean_range_power(double alpha, const GeometryParams& p) {
  if (!(alpha > 0.0)) throw DomainError("mean_range_power: alpha must be positive");
  const double rmax = max_slant_range(p);
  const double rmin = p.r_min;
  if (!(rmax > rmin)) return std::pow(rmin, -alpha);
  const double L = std::log(rmax / rmin);
  const double eps = 2.0 - alpha;
  // (rmax^eps - rmin^eps)/eps written to stay exact as eps -> 0
  const double ratio = (eps == 0.0) ? L : std::expm1(eps * L) / eps;
  return 2.0 * std::pow(rmin, eps) * ratio / (rmax * rmax - rmin * rmin);
}

}  // namespace leoop
