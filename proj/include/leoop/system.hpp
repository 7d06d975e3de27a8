#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "leoop/channel.hpp"
#include "leoop/errors.hpp"
#include "leoop/geometry.hpp"

namespace leoop {

enum class SicInterferenceModel {
  Decrementing,  // decoded users stop interfering
  AsPrinted,     // decoded users keep interfering
};

struct SystemConfig {
  int U = 5;
  int S = 3;
  GeometryParams geometry;
  ShadowedRicianParams uplink_fading = ShadowedRicianParams::average_shadowing();
  ShadowedRicianParams downlink_fading = ShadowedRicianParams::average_shadowing();
  double P_u_dBm = 4.0;
  double P_s_dBm = 40.0;
  double sigma_n2_dBm = -128.0;
  double sigma_w2_dBm = -98.0;
  double G_u_dBi = 0.0;
  double G_sat_dBi = 30.0;
  double G_gs_dBi = 30.0;
  double carrier_freq_Hz = 2e9;
  double alpha = 2.0;
  double rate_bps = 10e3;
  double bandwidth_Hz = 125e3;
  CsiMismatch csi;
  SicInterferenceModel sic_model = SicInterferenceModel::Decrementing;

  void validate() const {
    if (U < 1) throw ConfigError("U must be >= 1");
    geometry.validate();
    if (S < 1 || S > geometry.K) throw ConfigError("S must satisfy 1 <= S <= K");
    if (!(bandwidth_Hz > 0.0)) throw ConfigError("bandwidth must be positive");
    if (!(rate_bps > 0.0)) throw ConfigError("rate must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(carrier_freq_Hz > 0.0)) throw ConfigError("carrier frequency must be positive");
    for (double v : {P_u_dBm, P_s_dBm, sigma_n2_dBm, sigma_w2_dBm, G_u_dBi, G_sat_dBi, G_gs_dBi})
      if (!std::isfinite(v)) throw ConfigError("powers and gains must be finite");
    try {
      uplink_fading.validate();
      downlink_fading.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    csi.validate();
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMetresPerKm = 1000.0;

inline double sinr_threshold(double rate, double bandwidth) {
  if (!(bandwidth > 0.0) || !(rate >= 0.0)) throw DomainError("sinr_threshold: need rate >= 0, bandwidth > 0");
  return std::exp2(2.0 * rate / bandwidth) - 1.0;
}

// (lambda / 4 pi)^alpha
inline double free_space_factor(const SystemConfig& cfg) {
  const double lambda = kSpeedOfLight / cfg.carrier_freq_Hz;
  return std::pow(lambda / (4.0 * std::numbers::pi), cfg.alpha);
}

// E[r^-alpha] with r in metres.
inline double mean_range_power_si(const SystemConfig& cfg) {
  return mean_range_power(cfg.alpha, cfg.geometry) * std::pow(kMetresPerKm, -cfg.alpha);
}

inline double range_power_si(double r_km, double alpha) { return std::pow(r_km * kMetresPerKm, -alpha); }

struct DerivedConstants {
  double eta_u = 0.0;
  double eta_s = 0.0;
  double gamma_th = 0.0;
  double beta_af2 = 0.0;
  double sigma_e_u2 = 0.0;  // uplink CSI error variance
  double sigma_e_s2 = 0.0;  // downlink CSI error variance
  double mean_range_power = 0.0;  // E[r^-alpha], metres
  double mean_gain_u = 0.0;       // E|h|^2 of the uplink (eta = 1)
  double r_min_pow = 0.0;         // r_min^alpha, metres
  double Ibar = 0.0;
  double E1bar = 0.0;
  double E2bar = 0.0;
  double E3bar = 0.0;
  double C_hat = 0.0;
  double a_const = 1.0;
  double C_const = 0.0;
  double visibility_factor = 0.0;
  ShadowedRicianParams uplink;    // with eta_u
  ShadowedRicianParams downlink;  // with eta_s
};

inline double af_gain_factor(const SystemConfig& cfg) {
  const double Pu = dbm_to_watt(cfg.P_u_dBm);
  const double Ps = dbm_to_watt(cfg.P_s_dBm);
  const double noise = dbm_to_watt(cfg.sigma_n2_dBm);
  const double gains = db_to_linear(cfg.G_u_dBi) * db_to_linear(cfg.G_sat_dBi) * free_space_factor(cfg);
  const double eta_u = Pu / noise * gains;
  const double sigma_e2 = csi_error_variance(cfg.csi.phi, cfg.csi.chi, eta_u);
  const double per_user = mean_range_power_si(cfg) * (sr_mean(cfg.uplink_fading.with_eta(1.0)) + sigma_e2);
  return std::sqrt(Ps / (cfg.U * Pu * gains * per_user + noise));
}

inline DerivedConstants derive_constants(const SystemConfig& cfg) {
  cfg.validate();
  DerivedConstants k;
  const double fs = free_space_factor(cfg);
  const double g_sat = db_to_linear(cfg.G_sat_dBi);
  k.eta_u = dbm_to_watt(cfg.P_u_dBm) / dbm_to_watt(cfg.sigma_n2_dBm) * db_to_linear(cfg.G_u_dBi) * g_sat * fs;
  k.eta_s = dbm_to_watt(cfg.P_s_dBm) / dbm_to_watt(cfg.sigma_w2_dBm) * g_sat * db_to_linear(cfg.G_gs_dBi) * fs;
  k.gamma_th = sinr_threshold(cfg.rate_bps, cfg.bandwidth_Hz);
  k.sigma_e_u2 = csi_error_variance(cfg.csi.phi, cfg.csi.chi, k.eta_u);
  k.sigma_e_s2 = csi_error_variance(cfg.csi.phi, cfg.csi.chi, k.eta_s);
  k.mean_range_power = mean_range_power_si(cfg);
  k.mean_gain_u = sr_mean(cfg.uplink_fading.with_eta(1.0));
  k.r_min_pow = std::pow(cfg.geometry.r_min * kMetresPerKm, cfg.alpha);

  k.Ibar = k.eta_u * k.mean_gain_u * k.mean_range_power;
  k.E1bar = k.eta_u * k.sigma_e_u2 * k.mean_range_power;
  k.E2bar = k.eta_s * k.sigma_e_s2 * cfg.U * (k.Ibar + k.E1bar);
  k.E3bar = k.eta_u * cfg.csi.xi * k.mean_range_power;
  k.C_hat = k.r_min_pow * (1.0 + cfg.U * (k.Ibar + k.E1bar));
  k.a_const = (cfg.U - 1) * k.Ibar + cfg.U * k.E1bar + 1.0;
  k.C_const = k.E2bar + k.C_hat;
  const double beta = af_gain_factor(cfg);
  k.beta_af2 = beta * beta;
  k.visibility_factor = prob_at_least_visible(cfg.S, cfg.geometry);
  k.uplink = cfg.uplink_fading.with_eta(k.eta_u);
  k.downlink = cfg.downlink_fading.with_eta(k.eta_s);
  return k;
}

// End-to-end SINR of user u through one satellite. H holds uplink gains
// (eta_u |h|^2), R ranges in km; `cancelled` flags users already decoded.
inline double per_link_sinr(std::span<const double> H, double G, std::span<const double> R, int u,
                            const std::vector<bool>& cancelled, const SystemConfig& cfg,
                            const DerivedConstants& k) {
  const std::size_t U = H.size();
  if (R.size() != U || cancelled.size() != U || u < 0 || static_cast<std::size_t>(u) >= U)
    throw ContractViolation("per_link_sinr: inconsistent vector lengths or user index");
  if (cancelled[u]) throw ContractViolation("per_link_sinr: user already cancelled");

  const bool keep_cancelled = cfg.sic_model == SicInterferenceModel::AsPrinted;
  double interference = 0.0, error_up = 0.0, error_down = 0.0;
  int n_cancelled = 0;
  for (std::size_t i = 0; i < U; ++i) {
    const double g = range_power_si(R[i], cfg.alpha);
    if (cancelled[i]) ++n_cancelled;
    if (static_cast<int>(i) != u && (!cancelled[i] || keep_cancelled)) interference += g * H[i];
    error_up += k.eta_u * g * k.sigma_e_u2;
    error_down += g * (H[i] + k.eta_u * k.sigma_e_u2);
  }
  const double residual = n_cancelled * k.E3bar;
  const double num = range_power_si(R[u], cfg.alpha) * G * H[u];
  const double den = G * (interference + error_up + 1.0 + residual) + k.eta_s * k.sigma_e_s2 * (error_down + 1.0) + k.C_hat;
  return num / den;
}

inline double mrc_combine(std::span<const double> per_sat) {
  double s = 0.0;
  for (double v : per_sat) s += v;
  return s;
}

// Numeric scenario fields addressable by name (config keys and sweep axes).
inline const std::map<std::string, std::function<void(SystemConfig&, double)>>& config_field_setters() {
  auto as_int = [](const char* name, double v) {
    if (v != std::floor(v)) throw ConfigError(std::string(name) + ": expected an integer");
    return static_cast<int>(v);
  };
  static const std::map<std::string, std::function<void(SystemConfig&, double)>> setters = {
      {"U", [=](SystemConfig& c, double v) { c.U = as_int("U", v); }},
      {"S", [=](SystemConfig& c, double v) { c.S = as_int("S", v); }},
      {"K", [=](SystemConfig& c, double v) { c.geometry.K = as_int("K", v); }},
      {"earth_radius_km", [](SystemConfig& c, double v) { c.geometry.r_e = v; }},
      {"altitude_km", [](SystemConfig& c, double v) { c.geometry.r_min = v; }},
      {"mask_angle_deg", [](SystemConfig& c, double v) { c.geometry.theta0_deg = v; }},
      {"P_u_dBm", [](SystemConfig& c, double v) { c.P_u_dBm = v; }},
      {"P_s_dBm", [](SystemConfig& c, double v) { c.P_s_dBm = v; }},
      {"sigma_n2_dBm", [](SystemConfig& c, double v) { c.sigma_n2_dBm = v; }},
      {"sigma_w2_dBm", [](SystemConfig& c, double v) { c.sigma_w2_dBm = v; }},
      {"G_u_dBi", [](SystemConfig& c, double v) { c.G_u_dBi = v; }},
      {"G_sat_dBi", [](SystemConfig& c, double v) { c.G_sat_dBi = v; }},
      {"G_gs_dBi", [](SystemConfig& c, double v) { c.G_gs_dBi = v; }},
      {"carrier_freq_Hz", [](SystemConfig& c, double v) { c.carrier_freq_Hz = v; }},
      {"alpha", [](SystemConfig& c, double v) { c.alpha = v; }},
      {"rate_bps", [](SystemConfig& c, double v) { c.rate_bps = v; }},
      {"bandwidth_Hz", [](SystemConfig& c, double v) { c.bandwidth_Hz = v; }},
      {"phi", [](SystemConfig& c, double v) { c.csi.phi = v; }},
      {"chi", [](SystemConfig& c, double v) { c.csi.chi = v; }},
      {"xi", [](SystemConfig& c, double v) { c.csi.xi = v; }},
      {"uplink_m", [=](SystemConfig& c, double v) { c.uplink_fading.m = as_int("uplink_m", v); }},
      {"uplink_b", [](SystemConfig& c, double v) { c.uplink_fading.b = v; }},
      {"uplink_omega", [](SystemConfig& c, double v) { c.uplink_fading.omega = v; }},
      {"downlink_m", [=](SystemConfig& c, double v) { c.downlink_fading.m = as_int("downlink_m", v); }},
      {"downlink_b", [](SystemConfig& c, double v) { c.downlink_fading.b = v; }},
      {"downlink_omega", [](SystemConfig& c, double v) { c.downlink_fading.omega = v; }},
  };
  return setters;
}

inline void set_config_field(SystemConfig& cfg, const std::string& name, double value) {
  const auto& s = config_field_setters();
  auto it = s.find(name);
  if (it == s.end()) throw ConfigError("unknown configuration field '" + name + "'");
  it->second(cfg, value);
}

}  // namespace leoop
