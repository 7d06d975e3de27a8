#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <type_traits>
#include <vector>

#include "leoop/channel.hpp"
#include "leoop/errors.hpp"
#include "leoop/geometry.hpp"
#include "leoop/numerics/laplace.hpp"
#include "leoop/numerics/quadrature.hpp"
#include "leoop/numerics/special.hpp"
#include "leoop/system.hpp"

namespace leoop {

struct AnalyticSettings {
  QuadratureSpec quad{};
  EulerInversionSpec inversion{};
  int gs_average_samples = 10000;
  bool clamp_to_unit = true;
  std::uint64_t seed = 0x5eed;

  void validate() const {
    quad.validate();
    inversion.validate();
    if (gs_average_samples < 1) throw ConfigError("gs_average_samples must be >= 1");
  }
};

// op is what callers report; raw_cdf is the unclamped inversion output.
struct AnalyticOutcome {
  double op = 0.0;
  double raw_cdf = 0.0;
  double visibility_factor = 0.0;
  bool degenerate = false;
};

namespace detail {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double clamp_cdf(double v, const AnalyticSettings& s) { return s.clamp_to_unit ? std::clamp(v, 0.0, 1.0) : v; }

// 2 B^{(k2+1+z)/2} K_{k2+1-z}(2 sqrt B), with its small-B limit.
inline double bessel_block(int k2, int z, double B) {
  const int nu = k2 + 1 - z;
  if (B == 0.0) return nu > 0 ? (z == 0 ? factorial(nu - 1) : 0.0) : 0.0;
  const double arg = 2.0 * std::sqrt(B);
  if (arg < 1e-8) {
    if (nu > 0) return factorial(nu - 1) * std::pow(B, z);
    if (nu < 0) return factorial(-nu - 1) * std::pow(B, k2 + 1);
    return -2.0 * std::pow(B, 0.5 * (k2 + 1 + z)) * std::log(0.5 * arg);
  }
  const double kv = bessel_k(nu, arg);
  if (kv == 0.0) return 0.0;
  return 2.0 * std::exp(0.5 * (k2 + 1 + z) * std::log(B) + std::log(kv));
}

inline double range_m(double km) { return km * kMetresPerKm; }

}  // namespace detail

// CDF of the per-link SINR given the slant range (km), with the
// interference and error terms replaced by their means.
inline double cm_conditional_cdf(double x, double r_km, const SystemConfig& cfg, const DerivedConstants& k) {
  if (!(x >= 0.0)) throw DomainError("cm_conditional_cdf: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const auto cu = sr_coefficients(cfg.uplink_fading);
  const auto cs = sr_coefficients(cfg.downlink_fading);
  const double su = cu.slope(), ss = cs.slope();
  const double ra = std::pow(detail::range_m(r_km), cfg.alpha);
  const double ua = x * ra * k.a_const / k.eta_u;
  const double B = su * ss * x * ra * k.C_const / (k.eta_u * k.eta_s);
  const double decay = std::exp(-su * ua);

  double survival = 0.0;
  for (int k1 = 0; k1 < cfg.uplink_fading.m; ++k1)
    for (int p = 0; p <= k1; ++p) {
      const double T1 = cu.alpha * detail::factorial(k1) * cu.zeta[k1] /
                        (detail::factorial(p) * std::pow(su, k1 + 1 - p));
      for (int k2 = 0; k2 < cfg.downlink_fading.m; ++k2) {
        const double T2 = cs.alpha * cs.zeta[k2] / std::pow(ss, k2 + 1);
        for (int z = 0; z <= p; ++z)
          survival += T1 * T2 * detail::binomial(p, z) * std::pow(ua, p - z) * std::pow(su, -z) * decay *
                      detail::bessel_block(k2, z, B);
      }
    }
  return 1.0 - survival;
}

// E[exp(-t gamma) | r], Re t > 0.
inline cplx cm_conditional_mgf(cplx t, double r_km, const SystemConfig& cfg, const DerivedConstants& k) {
  if (!(t.real() > 0.0)) throw DomainError("cm_conditional_mgf: need Re(t) > 0");
  const auto cu = sr_coefficients(cfg.uplink_fading);
  const auto cs = sr_coefficients(cfg.downlink_fading);
  const double su = cu.slope(), ss = cs.slope();
  const double ra = std::pow(detail::range_m(r_km), cfg.alpha);
  const double at = ra * k.a_const / k.eta_u;
  const double bt = su * ss * ra * k.C_const / (k.eta_u * k.eta_s);
  const cplx eps = su * at + t;
  const cplx y = bt / eps;

  cplx sum = 0.0;
  for (int k1 = 0; k1 < cfg.uplink_fading.m; ++k1)
    for (int p = 0; p <= k1; ++p) {
      const double T1 = cu.alpha * detail::factorial(k1) * cu.zeta[k1] /
                        (detail::factorial(p) * std::pow(su, k1 + 1 - p));
      for (int k2 = 0; k2 < cfg.downlink_fading.m; ++k2) {
        const double T2 = cs.alpha * cs.zeta[k2] / std::pow(ss, k2 + 1);
        for (int z = 0; z <= p; ++z) {
          const int ua = p + 2 + k2 - z;
          const int ub = k2 + 2 - z;
          cplx block;
          if (bt == 0.0) {
            // C = 0: the Bessel block reduces to Γ(k2+1) at z = 0.
            if (z != 0) continue;
            block = detail::factorial(k2) * detail::factorial(p) * std::pow(eps, -(p + 1));
          } else {
            block = detail::factorial(ua - 1) * detail::factorial(p) * std::pow(y, k2 + 1) *
                    std::pow(eps, -(p + 1 - z)) * tricomi_u(static_cast<double>(ua), static_cast<double>(ub), y);
          }
          sum += T1 * T2 * detail::binomial(p, z) * std::pow(at, p - z) * std::pow(su, -z) * block;
        }
      }
    }
  return 1.0 - t * sum;
}

// Conditional MGF averaged over the slant-range distribution.
inline cplx cm_marginal_mgf(cplx t, const SystemConfig& cfg, const DerivedConstants& k,
                            const AnalyticSettings& settings = {}) {
  const double r1 = cfg.geometry.r_min;
  const double r2 = max_slant_range(cfg.geometry);
  if (!(r2 > r1 * (1.0 + 1e-12))) return cm_conditional_mgf(t, r1, cfg, k);
  auto f = [&](double r) { return r * cm_conditional_mgf(t, r, cfg, k); };
  return adaptive_quad(f, r1, r2, settings.quad) * (2.0 / (r2 * r2 - r1 * r1));
}

// Unclamped CDF of the MRC-combined SINR of a generic user.
inline double cm_combined_cdf(double x, const SystemConfig& cfg, const DerivedConstants& k,
                              const AnalyticSettings& settings = {}) {
  auto transform = [&](cplx s) { return std::pow(cm_marginal_mgf(s, cfg, k, settings), cfg.S) / s; };
  return invert_laplace_euler(transform, x, settings.inversion);
}

inline AnalyticOutcome cm_outage_detailed(const SystemConfig& cfg, const DerivedConstants& k,
                                          const AnalyticSettings& settings = {}) {
  settings.validate();
  AnalyticOutcome o;
  o.raw_cdf = cm_combined_cdf(k.gamma_th, cfg, k, settings);
  o.visibility_factor = k.visibility_factor;
  o.op = detail::clamp_cdf(o.raw_cdf, settings) * k.visibility_factor;
  return o;
}

inline double cm_outage(const SystemConfig& cfg, const DerivedConstants& k, const AnalyticSettings& settings = {}) {
  return cm_outage_detailed(cfg, k, settings).op;
}

// CDF of r^{-alpha} H (r in metres) under the slant-range law.
inline double sic_htilde_cdf(double z, const ShadowedRicianParams& fading, const GeometryParams& geom, double alpha) {
  if (!(z >= 0.0)) throw DomainError("sic_htilde_cdf: z must be non-negative");
  if (!(alpha > 0.0)) throw DomainError("sic_htilde_cdf: alpha must be positive");
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  const auto c = sr_coefficients(fading);
  const double s = c.slope();
  const double rho = s * z / fading.eta;
  const double R1 = detail::range_m(max_slant_range(geom));
  const double R2 = detail::range_m(geom.r_min);
  const double u1 = rho * std::pow(R1, alpha), u2 = rho * std::pow(R2, alpha);
  const bool point = !(R1 > R2 * (1.0 + 1e-12));
  const double span = std::pow(rho, 2.0 / alpha) * (R1 * R1 - R2 * R2);

  double survival = 0.0;
  for (int k = 0; k < fading.m; ++k)
    for (int p = 0; p <= k; ++p) {
      const double coef = c.alpha * detail::factorial(k) * c.zeta[k] / (detail::factorial(p) * std::pow(s, k + 1));
      double e;
      if (point) {
        e = std::pow(u2, p) * std::exp(-u2);
      } else {
        const double V = p + 2.0 / alpha;
        e = 2.0 * (lower_incomplete_gamma(V, u1) - lower_incomplete_gamma(V, u2)) / (alpha * span);
      }
      survival += coef * e;
    }
  return 1.0 - survival;
}

// MGF of r^{-alpha} H / (a + C/g) for one satellite given its downlink SNR g.
inline cplx sic_conditional_mgf(cplx t, double g, const SystemConfig& cfg, const DerivedConstants& k) {
  if (!(t.real() > 0.0)) throw DomainError("sic_conditional_mgf: need Re(t) > 0");
  if (!(g > 0.0)) throw DomainError("sic_conditional_mgf: g must be positive");
  const auto c = sr_coefficients(cfg.uplink_fading);
  const double s = c.slope();
  const double cg = k.a_const + k.C_const / g;
  const double r1 = max_slant_range(cfg.geometry), r2 = cfg.geometry.r_min;  // km
  const double delta = r1 * r1 - r2 * r2;
  const bool point = !(r1 > r2 * (1.0 + 1e-12));
  const double a = cfg.alpha;
  const double ups1 = s * std::pow(detail::range_m(r1), a) / k.eta_u * cg;
  const double ups2 = s * std::pow(detail::range_m(r2), a) / k.eta_u * cg;

  cplx sum = 0.0;
  for (int kk = 0; kk < cfg.uplink_fading.m; ++kk) {
    const double coef = c.alpha * detail::factorial(kk) * c.zeta[kk] / std::pow(s, kk + 1);
    for (int p = 0; p <= kk; ++p) {
      if (point) {
        const cplx den = ups2 + t;
        sum += coef * std::pow(ups2 / den, p) / den;
        continue;
      }
      const double V = p + 2.0 / a;
      auto piece = [&](double rj, double ups) {
        const cplx den = ups + t;
        const cplx zz = ups / den;
        return rj * rj * std::pow(zz, p) / den * hyp2f1(1.0, p + 1.0, V + 1.0, zz);
      };
      sum += coef * (2.0 / (a * V * delta)) * (piece(r1, ups1) - piece(r2, ups2));
    }
  }
  return 1.0 - t * sum;
}

// Unclamped CDF of one user's MRC SINR given the S downlink SNRs.
inline double sic_conditional_cdf(double x, const std::vector<double>& g, const SystemConfig& cfg,
                                  const DerivedConstants& k, const EulerInversionSpec& inv = {}) {
  auto transform = [&](cplx s) {
    cplx prod = 1.0;
    for (double gs : g) prod *= sic_conditional_mgf(s, gs, cfg, k);
    return prod / s;
  };
  return invert_laplace_euler(transform, x, inv);
}

// Lower bound on the first-decoded user's OP: G_s is averaged by seeded
// sampling.
inline AnalyticOutcome sic_best_outage_detailed(const SystemConfig& cfg, const DerivedConstants& k,
                                                const AnalyticSettings& settings = {}) {
  settings.validate();
  std::mt19937_64 rng(settings.seed);
  SrSampler draw(k.downlink);
  std::vector<double> g(cfg.S);
  double acc = 0.0, raw_acc = 0.0;
  for (int i = 0; i < settings.gs_average_samples; ++i) {
    for (auto& v : g) v = draw(rng);
    const double raw = sic_conditional_cdf(k.gamma_th, g, cfg, k, settings.inversion);
    raw_acc += raw;
    acc += std::pow(detail::clamp_cdf(raw, settings), cfg.U);
  }
  AnalyticOutcome o;
  o.raw_cdf = raw_acc / settings.gs_average_samples;
  o.visibility_factor = k.visibility_factor;
  o.op = acc / settings.gs_average_samples * k.visibility_factor;
  return o;
}

inline double sic_best_outage(const SystemConfig& cfg, const DerivedConstants& k,
                              const AnalyticSettings& settings = {}) {
  return sic_best_outage_detailed(cfg, k, settings).op;
}

// High-SNR link model: gamma ~ r^{-alpha} H / (eta_u I) with
// I = (U-1) E[r^-a] E|h|^2 + U sigma_e^2 E[r^-a].
struct AsymptoticModel {
  double I = 0.0;
  double eta_u = 1.0;
  bool degenerate = false;  // I = 0: interference-free branch
  double R1 = 0.0, R2 = 0.0;  // slant-range bounds, metres
  double alpha = 2.0;
  int m = 1;
  SrCoefficients coeffs;
};

inline AsymptoticModel asymptotic_model(const SystemConfig& cfg, const DerivedConstants& k) {
  AsymptoticModel am;
  am.I = (cfg.U - 1) * k.mean_range_power * k.mean_gain_u + cfg.U * k.sigma_e_u2 * k.mean_range_power;
  am.eta_u = k.eta_u;
  am.degenerate = !(am.I > 0.0);
  am.R1 = detail::range_m(max_slant_range(cfg.geometry));
  am.R2 = detail::range_m(cfg.geometry.r_min);
  am.alpha = cfg.alpha;
  am.m = cfg.uplink_fading.m;
  am.coeffs = sr_coefficients(cfg.uplink_fading);
  return am;
}

namespace detail {

// Sum over (k, p) shared by the asymptotic CDF (T = double, scale = x) and
// MGF (T = cplx, scale = 1/t). The inner series over q is summed in closed
// form: an incomplete gamma for the CDF and a Gauss function for the MGF.
template <class T>
T asymptotic_series(const AsymptoticModel& am, T scale) {
  const double s = am.coeffs.slope();
  const double level = am.degenerate ? 1.0 / am.eta_u : am.I;
  const double kappa = am.degenerate ? 0.0 : 1.0 / (am.I * am.eta_u);
  const double a = am.alpha;
  const double delta = am.R1 * am.R1 - am.R2 * am.R2;
  if (!(delta > 0.0)) throw DomainError("asymptotic: slant-range support is degenerate");
  const T w1 = s * level * std::pow(am.R1, a) * scale;
  const T w2 = s * level * std::pow(am.R2, a) * scale;

  T total = 0.0;
  for (int k = 0; k < am.m; ++k) {
    const double K = 2.0 * factorial(k) * am.coeffs.zeta[k] * am.coeffs.alpha / std::pow(s, k + 1);
    for (int p = 0; p <= k; ++p) {
      const double V = p + 2.0 / a;
      auto piece = [&](T w) -> T {
        if (w == T(0.0)) return 0.0;
        if constexpr (std::is_same_v<T, double>) {
          const double g = lower_incomplete_gamma(V, w) * std::pow(w, -2.0 / a) / factorial(p);
          return (g * (1.0 - 2.0 * kappa / a) + kappa * std::pow(w, p) / factorial(p) * std::exp(-w)) / a;
        } else {
          const T lead = std::pow(w / (1.0 + w), p) / (1.0 + w);
          const T f = hyp2f1(1.0, p + 1.0, V + 1.0, w / (1.0 + w));
          return lead * (f / V * (1.0 - 2.0 * kappa / a) + kappa) / a;
        }
      };
      total += K / delta * (am.R1 * am.R1 * piece(w1) - am.R2 * am.R2 * piece(w2));
    }
  }
  return total;
}

}  // namespace detail

inline double asymptotic_link_cdf(double x, const AsymptoticModel& am) {
  if (!(x >= 0.0)) throw DomainError("asymptotic_link_cdf: x must be non-negative");
  if (x == 0.0) return 0.0;
  return 1.0 - detail::asymptotic_series<double>(am, x);
}

inline cplx asymptotic_link_mgf(cplx t, const AsymptoticModel& am) {
  if (!(t.real() > 0.0)) throw DomainError("asymptotic_link_mgf: need Re(t) > 0");
  return 1.0 - detail::asymptotic_series<cplx>(am, 1.0 / t);
}

inline AnalyticOutcome asymptotic_cm_outage_detailed(const SystemConfig& cfg, const DerivedConstants& k,
                                                     const AnalyticSettings& settings = {}) {
  settings.validate();
  const auto am = asymptotic_model(cfg, k);
  auto transform = [&](cplx s) { return std::pow(asymptotic_link_mgf(s, am), cfg.S) / s; };
  AnalyticOutcome o;
  o.raw_cdf = invert_laplace_euler(transform, k.gamma_th, settings.inversion);
  o.visibility_factor = k.visibility_factor;
  o.degenerate = am.degenerate;
  o.op = detail::clamp_cdf(o.raw_cdf, settings) * k.visibility_factor;
  return o;
}

inline double asymptotic_cm_outage(const SystemConfig& cfg, const DerivedConstants& k,
                                   const AnalyticSettings& settings = {}) {
  return asymptotic_cm_outage_detailed(cfg, k, settings).op;
}

inline AnalyticOutcome asymptotic_sic_best_outage_detailed(const SystemConfig& cfg, const DerivedConstants& k,
                                                           const AnalyticSettings& settings = {}) {
  auto o = asymptotic_cm_outage_detailed(cfg, k, settings);
  o.op = std::pow(detail::clamp_cdf(o.raw_cdf, settings), cfg.U) * k.visibility_factor;
  return o;
}

inline double asymptotic_sic_best_outage(const SystemConfig& cfg, const DerivedConstants& k,
                                         const AnalyticSettings& settings = {}) {
  return asymptotic_sic_best_outage_detailed(cfg, k, settings).op;
}

}  // namespace leoop
