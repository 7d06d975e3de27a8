#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "leoop/channel.hpp"
#include "leoop/errors.hpp"
#include "leoop/geometry.hpp"
#include "leoop/system.hpp"

namespace leoop {

enum class Scheme { CM, SIC };

inline const char* scheme_name(Scheme s) { return s == Scheme::CM ? "CM" : "SIC"; }

struct OutageResult {
  std::vector<double> per_user_op;  // indexed by decoding order
  double average_op = 0.0;
  std::vector<double> stderr_;
  double average_stderr = 0.0;
  double visibility_factor = 0.0;
  Scheme scheme = Scheme::CM;
  std::uint64_t realizations = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> failures;  // raw counts per order
};

inline double estimate_stderr(std::uint64_t failures, std::uint64_t L) {
  if (L == 0 || failures > L) throw DomainError("estimate_stderr: need 0 <= failures <= L, L >= 1");
  const double p = static_cast<double>(failures) / static_cast<double>(L);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(L));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

// One realization per row. Layout: H[(l*U + u)*S + s], G[l*S + s].
struct RealizationBatch {
  int U = 0, S = 0;
  std::size_t L = 0;
  std::vector<double> H, G, R;

  double h(std::size_t l, int u, int s) const { return H[(l * U + u) * S + s]; }
  double g(std::size_t l, int s) const { return G[l * S + s]; }
  double r(std::size_t l, int u, int s) const { return R[(l * U + u) * S + s]; }
};

namespace detail {

struct Samplers {
  SrSampler up, down;
  GeometryParams geom;
  std::uniform_real_distribution<double> uni{0.0, 1.0};
  Samplers(const SystemConfig& cfg, const DerivedConstants& k) : up(k.uplink), down(k.downlink), geom(cfg.geometry) {}
};

// Draw order per realization: G over satellites, then (R, H) user-major.
template <class Rng>
void draw_realization(Samplers& smp, Rng& rng, int U, int S, double* H, double* G, double* R) {
  for (int s = 0; s < S; ++s) G[s] = smp.down(rng);
  for (int u = 0; u < U; ++u)
    for (int s = 0; s < S; ++s) {
      R[u * S + s] = range_quantile(smp.uni(rng), smp.geom);
      H[u * S + s] = smp.up(rng);
    }
}

// Failure flags by decoding order for one realization. Uses per-satellite
// totals so SIC costs O(U^2 S).
struct RealizationEvaluator {
  const SystemConfig& cfg;
  const DerivedConstants& k;
  int U, S;
  std::vector<double> X, gsum, tot, err_up, down_term;
  std::vector<double> sinr;
  std::vector<char> done;

  RealizationEvaluator(const SystemConfig& c, const DerivedConstants& d)
      : cfg(c), k(d), U(c.U), S(c.S), X(U * S), gsum(S), tot(S), err_up(S), down_term(S), sinr(U), done(U) {}

  void load(const double* H, const double* G, const double* R) {
    const double eu = k.eta_u * k.sigma_e_u2;
    for (int s = 0; s < S; ++s) {
      double t = 0.0, gs = 0.0, dn = 0.0;
      for (int u = 0; u < U; ++u) {
        const double g = range_power_si(R[u * S + s], cfg.alpha);
        const double x = g * H[u * S + s];
        X[u * S + s] = x;
        t += x;
        gs += g;
        dn += x + g * eu;
      }
      tot[s] = t;
      gsum[s] = gs;
      err_up[s] = eu * gs;
      down_term[s] = k.eta_s * k.sigma_e_s2 * (dn + 1.0) + k.C_hat;
    }
    G_ = G;
  }

  // MRC SINR of user u given the cancelled mass per satellite.
  double combined(int u, const std::vector<double>& cancelled_mass, int n_cancelled) const {
    double sum = 0.0;
    const double residual = n_cancelled * k.E3bar;
    for (int s = 0; s < S; ++s) {
      const double x = X[u * S + s];
      const double interf = tot[s] - x - cancelled_mass[s];
      const double den = G_[s] * (interf + err_up[s] + 1.0 + residual) + down_term[s];
      sum += G_[s] * x / den;
    }
    return sum;
  }

  // fails[l] = 1 if the order-l user is in outage.
  void evaluate(Scheme scheme, std::vector<char>& fails, std::vector<double>& cmass) {
    std::fill(cmass.begin(), cmass.end(), 0.0);
    if (scheme == Scheme::CM) {
      for (int u = 0; u < U; ++u) sinr[u] = combined(u, cmass, 0);
      std::sort(sinr.begin(), sinr.end(), std::greater<>());
      for (int l = 0; l < U; ++l) fails[l] = sinr[l] <= k.gamma_th;
      return;
    }
    const bool keep = cfg.sic_model == SicInterferenceModel::AsPrinted;
    std::fill(done.begin(), done.end(), 0);
    for (int l = 0; l < U; ++l) {
      int best = -1;
      double best_v = -1.0;
      for (int u = 0; u < U; ++u) {
        if (done[u]) continue;
        const double v = combined(u, cmass, l);
        if (v > best_v) {
          best_v = v;
          best = u;
        }
      }
      if (best_v <= k.gamma_th) {
        for (int j = l; j < U; ++j) fails[j] = 1;
        return;
      }
      fails[l] = 0;
      done[best] = 1;
      if (!keep)
        for (int s = 0; s < S; ++s) cmass[s] += X[best * S + s];
    }
  }

 private:
  const double* G_ = nullptr;
};

struct Tally {
  std::vector<std::uint64_t> fail;
  std::uint64_t sum_k = 0, sum_k2 = 0;
  explicit Tally(int U = 0) : fail(U, 0) {}
  void merge(const Tally& o) {
    for (std::size_t i = 0; i < fail.size(); ++i) fail[i] += o.fail[i];
    sum_k += o.sum_k;
    sum_k2 += o.sum_k2;
  }
};

inline OutageResult finish(const Tally& t, std::uint64_t L, double vis, Scheme scheme, int U, std::uint64_t seed) {
  OutageResult r;
  r.scheme = scheme;
  r.realizations = L;
  r.seed = seed;
  r.visibility_factor = vis;
  r.failures = t.fail;
  double avg = 0.0;
  for (int u = 0; u < U; ++u) {
    const double p = static_cast<double>(t.fail[u]) / L;
    r.per_user_op.push_back(p * vis);
    r.stderr_.push_back(estimate_stderr(t.fail[u], L) * vis);
    avg += p * vis;
  }
  r.average_op = avg / U;
  // Per-realization failure fraction k/U; its sample variance gives the
  // stderr of the average.
  const double n = static_cast<double>(L);
  const double m1 = static_cast<double>(t.sum_k) / n / U;
  const double m2 = static_cast<double>(t.sum_k2) / n / (static_cast<double>(U) * U);
  const double var = L > 1 ? std::max(0.0, (m2 - m1 * m1) * n / (n - 1.0)) : 0.0;
  r.average_stderr = std::sqrt(var / n) * vis;
  return r;
}

}  // namespace detail

template <class Rng>
RealizationBatch generate_batch(const SystemConfig& cfg, const DerivedConstants& k, std::size_t L, Rng& rng) {
  RealizationBatch b;
  b.U = cfg.U;
  b.S = cfg.S;
  b.L = L;
  const std::size_t us = static_cast<std::size_t>(cfg.U) * cfg.S;
  b.H.resize(L * us);
  b.R.resize(L * us);
  b.G.resize(L * cfg.S);
  detail::Samplers smp(cfg, k);
  for (std::size_t l = 0; l < L; ++l)
    detail::draw_realization(smp, rng, cfg.U, cfg.S, &b.H[l * us], &b.G[l * cfg.S], &b.R[l * us]);
  return b;
}

// Straight per_link_sinr evaluation of a stored batch. Slow; kept as the
// reference the blocked engine is checked against.
inline std::vector<std::uint64_t> count_failures_reference(const RealizationBatch& b, const SystemConfig& cfg,
                                                           const DerivedConstants& k, Scheme scheme) {
  const int U = b.U, S = b.S;
  std::vector<std::uint64_t> fail(U, 0);
  std::vector<double> Hc(U), Rc(U), gam(U);
  for (std::size_t l = 0; l < b.L; ++l) {
    std::vector<bool> canc(U, false);
    auto user_sinr = [&](int u) {
      double sum = 0.0;
      for (int s = 0; s < S; ++s) {
        for (int i = 0; i < U; ++i) {
          Hc[i] = b.h(l, i, s);
          Rc[i] = b.r(l, i, s);
        }
        sum += per_link_sinr(Hc, b.g(l, s), Rc, u, canc, cfg, k);
      }
      return sum;
    };
    if (scheme == Scheme::CM) {
      for (int u = 0; u < U; ++u) gam[u] = user_sinr(u);
      std::sort(gam.begin(), gam.end(), std::greater<>());
      for (int o = 0; o < U; ++o) fail[o] += gam[o] <= k.gamma_th;
      continue;
    }
    for (int o = 0; o < U; ++o) {
      int best = -1;
      double bv = -1.0;
      for (int u = 0; u < U; ++u) {
        if (canc[u]) continue;
        const double v = user_sinr(u);
        if (v > bv) {
          bv = v;
          best = u;
        }
      }
      if (bv <= k.gamma_th) {
        for (int j = o; j < U; ++j) ++fail[j];
        break;
      }
      canc[best] = true;
    }
  }
  return fail;
}

struct SimulationOptions {
  std::size_t block_size = 4096;
  unsigned workers = 0;  // 0: hardware concurrency
};

inline OutageResult simulate(const SystemConfig& cfg, std::uint64_t L, std::uint64_t seed, Scheme scheme,
                             const SimulationOptions& opt = {}) {
  if (L < 1) throw DomainError("simulate: need L >= 1");
  if (opt.block_size < 1) throw DomainError("simulate: block size must be >= 1");
  const DerivedConstants k = derive_constants(cfg);
  const int U = cfg.U, S = cfg.S;
  const std::uint64_t n_blocks = (L + opt.block_size - 1) / opt.block_size;

  std::vector<detail::Tally> tallies(n_blocks, detail::Tally(U));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    detail::RealizationEvaluator ev(cfg, k);
    std::vector<double> H(U * S), R(U * S), G(S), cmass(S);
    std::vector<char> fails(U);
    for (std::uint64_t b; (b = next.fetch_add(1)) < n_blocks;) {
      std::mt19937_64 rng(derive_seed(seed, b));
      detail::Samplers smp(cfg, k);  // fresh per block: distributions cache state
      const std::uint64_t lo = b * opt.block_size;
      const std::uint64_t hi = std::min<std::uint64_t>(L, lo + opt.block_size);
      auto& t = tallies[b];
      for (std::uint64_t l = lo; l < hi; ++l) {
        detail::draw_realization(smp, rng, U, S, H.data(), G.data(), R.data());
        ev.load(H.data(), G.data(), R.data());
        ev.evaluate(scheme, fails, cmass);
        std::uint64_t kf = 0;
        for (int o = 0; o < U; ++o) {
          t.fail[o] += fails[o];
          kf += fails[o];
        }
        t.sum_k += kf;
        t.sum_k2 += kf * kf;
      }
    }
  };

  unsigned nw = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  nw = static_cast<unsigned>(std::min<std::uint64_t>(nw, n_blocks));
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  detail::Tally total(U);
  for (const auto& t : tallies) total.merge(t);
  return detail::finish(total, L, k.visibility_factor, scheme, U, seed);
}

inline std::uint64_t sweep_seed(std::uint64_t seed, std::size_t value_index, Scheme scheme) {
  return derive_seed(seed ^ 0x5eedULL, value_index, scheme == Scheme::CM ? 1 : 2);
}

// Results ordered value-major, then by the given scheme order.
inline std::vector<OutageResult> simulate_sweep(const SystemConfig& base, const std::string& param,
                                                const std::vector<double>& values, std::uint64_t L,
                                                std::uint64_t seed, const std::vector<Scheme>& schemes,
                                                const SimulationOptions& opt = {}) {
  std::vector<OutageResult> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SystemConfig cfg = base;
    set_config_field(cfg, param, values[i]);
    for (Scheme sc : schemes) out.push_back(simulate(cfg, L, sweep_seed(seed, i, sc), sc, opt));
  }
  return out;
}

}  // namespace leoop
