#pragma once

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "leoop/analytic.hpp"
#include "leoop/errors.hpp"
#include "leoop/montecarlo.hpp"
#include "leoop/system.hpp"

namespace leoop {

enum class Engine { MonteCarlo, Analytic, Asymptotic };

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::MonteCarlo: return "montecarlo";
    case Engine::Analytic: return "analytic";
    default: return "asymptotic";
  }
}

struct ExperimentSpec {
  SystemConfig base;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::vector<Scheme> schemes{Scheme::CM, Scheme::SIC};
  std::vector<Engine> engines{Engine::MonteCarlo};
  std::uint64_t L = 100000;
  std::uint64_t seed = 1;
  std::string output_path = "leoop_out.csv";
  AnalyticSettings analytic;
  std::string label;  // series name inside a preset

  void validate() const {
    if (sweep_values.empty()) throw ConfigError("sweep_values must not be empty");
    if (engines.empty()) throw ConfigError("engines must not be empty");
    if (schemes.empty()) throw ConfigError("schemes must not be empty");
    if (L < 1) throw ConfigError("realizations must be >= 1");
    analytic.validate();
    for (double v : sweep_values) {
      SystemConfig c = base;
      set_config_field(c, sweep_param, v);
      c.validate();
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v < 0 || v != std::floor(v) || v > 1.8e19) throw ConfigError("key '" + key + "': expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

inline ShadowedRicianParams parse_fading(const std::string& key, const std::string& text) {
  if (text == "average") return ShadowedRicianParams::average_shadowing();
  if (text == "heavy") return ShadowedRicianParams::heavy_shadowing();
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("key '" + key + "': expected average, heavy or m,b,omega");
  const double m = parse_number(key, parts[0]);
  if (m != std::floor(m) || m < 1) throw ConfigError("key '" + key + "': m must be a positive integer");
  return {static_cast<int>(m), parse_number(key, parts[1]), parse_number(key, parts[2]), 1.0};
}

// "a:b:step" (inclusive) or "v1, v2, ...".
inline std::vector<double> parse_values(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("key '" + key + "': range must be start:stop:step");
    const double a = parse_number(key, parts[0]), b = parse_number(key, parts[1]), st = parse_number(key, parts[2]);
    if (!(st > 0.0) || b < a) throw ConfigError("key '" + key + "': need step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / st + 1e-9));
    if (n > 100000) throw ConfigError("key '" + key + "': too many sweep points");
    for (long i = 0; i <= n; ++i) out.push_back(a + i * st);
    return out;
  }
  for (const auto& p : split(text, ',')) out.push_back(parse_number(key, p));
  return out;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F&& one) {
  std::vector<T> out;
  for (const auto& p : split(text, ',')) {
    const T v = one(p);
    if (std::find(out.begin(), out.end(), v) != out.end())
      throw ConfigError("key '" + key + "': duplicate entry '" + p + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': list must not be empty");
  return out;
}

}  // namespace detail

// Layers a `key = value` document onto spec. With require_core, U, S,
// sweep_param and sweep_values must appear.
inline void apply_config(const std::string& text, ExperimentSpec& spec, bool require_core) {
  using namespace detail;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    if (val.empty()) throw ConfigError("key '" + key + "': empty value");

    auto& c = spec.base;
    if (key == "uplink_fading") {
      c.uplink_fading = parse_fading(key, val);
    } else if (key == "downlink_fading") {
      c.downlink_fading = parse_fading(key, val);
    } else if (key == "sic_interference_model") {
      if (val == "decrementing") c.sic_model = SicInterferenceModel::Decrementing;
      else if (val == "as-printed") c.sic_model = SicInterferenceModel::AsPrinted;
      else throw ConfigError("key '" + key + "': expected decrementing or as-printed");
    } else if (key == "sweep_param") {
      if (!config_field_setters().count(val)) throw ConfigError("key 'sweep_param': unknown field '" + val + "'");
      spec.sweep_param = val;
    } else if (key == "sweep_values") {
      spec.sweep_values = parse_values(key, val);
    } else if (key == "schemes") {
      spec.schemes = parse_list<Scheme>(key, val, [&](const std::string& s) {
        if (s == "CM") return Scheme::CM;
        if (s == "SIC") return Scheme::SIC;
        throw ConfigError("key 'schemes': unknown scheme '" + s + "'");
      });
    } else if (key == "engines") {
      spec.engines = parse_list<Engine>(key, val, [&](const std::string& s) {
        if (s == "montecarlo") return Engine::MonteCarlo;
        if (s == "analytic") return Engine::Analytic;
        if (s == "asymptotic") return Engine::Asymptotic;
        throw ConfigError("key 'engines': unknown engine '" + s + "'");
      });
    } else if (key == "realizations") {
      spec.L = parse_count(key, val);
    } else if (key == "seed") {
      spec.seed = parse_count(key, val);
    } else if (key == "output") {
      spec.output_path = val;
    } else if (key == "gs_average_samples") {
      spec.analytic.gs_average_samples = static_cast<int>(std::min<std::uint64_t>(parse_count(key, val), 1u << 30));
    } else if (key == "quad_rel_tol") {
      spec.analytic.quad.rel_tol = parse_number(key, val);
    } else if (key == "euler_D") {
      spec.analytic.inversion.D = parse_number(key, val);
    } else if (key == "euler_N") {
      spec.analytic.inversion.N = static_cast<int>(std::min<std::uint64_t>(parse_count(key, val), 10000));
    } else if (key == "euler_Q") {
      spec.analytic.inversion.Q = static_cast<int>(std::min<std::uint64_t>(parse_count(key, val), 10000));
    } else if (key == "clamp_to_unit") {
      spec.analytic.clamp_to_unit = parse_bool(key, val);
    } else if (config_field_setters().count(key) && key.find("link_") == std::string::npos) {
      set_config_field(c, key, parse_number(key, val));
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (require_core)
    for (const char* k : {"U", "S", "sweep_param", "sweep_values"})
      if (!seen.count(k)) throw ConfigError(std::string("missing required key '") + k + "'");
  spec.validate();
}

inline ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  apply_config(text, spec, true);
  return spec;
}

struct Preset {
  std::string name;
  std::string description;
  std::vector<ExperimentSpec> series;
};

namespace detail {

inline std::vector<double> grid(double a, double b, double step) {
  std::vector<double> v;
  for (long i = 0; a + i * step <= b + 1e-9; ++i) v.push_back(a + i * step);
  return v;
}

inline ExperimentSpec preset_spec(const std::string& label, const std::string& param, std::vector<double> values,
                                  std::vector<Engine> engines) {
  ExperimentSpec s;
  s.label = label;
  s.sweep_param = param;
  s.sweep_values = std::move(values);
  s.engines = std::move(engines);
  s.analytic.gs_average_samples = 2000;
  return s;
}

}  // namespace detail

inline std::vector<Preset> list_presets() {
  using detail::grid;
  using detail::preset_spec;
  const std::vector<Engine> mc_an{Engine::MonteCarlo, Engine::Analytic};
  std::vector<Preset> out;

  {
    Preset p{"fig5_validation", "analytic vs Monte Carlo, U=5, S in {3,5}, P_u 4..20 dBm", {}};
    for (int S : {3, 5}) {
      auto s = preset_spec("S" + std::to_string(S), "P_u_dBm", grid(4, 20, 2), mc_an);
      s.base.U = 5;
      s.base.S = S;
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  {
    Preset p{"fig6_satellites", "OP vs satellites S=1..10, U in {5,10,15}, P_u 4 dBm", {}};
    for (int U : {5, 10, 15}) {
      auto s = preset_spec("U" + std::to_string(U), "S", grid(1, 10, 1), mc_an);
      s.base.U = U;
      s.base.S = 1;
      s.base.P_u_dBm = 4.0;
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  {
    Preset p{"fig7_users", "OP vs users U=2..15, S in {2,3,4}", {}};
    for (int S : {2, 3, 4}) {
      auto s = preset_spec("S" + std::to_string(S), "U", grid(2, 15, 1), mc_an);
      s.base.U = 2;
      s.base.S = S;
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  {
    Preset p{"fig8_altitude", "OP vs altitude 600..1800 km, U=15, S in {5,10,15}", {}};
    for (int S : {5, 10, 15}) {
      auto s = preset_spec("S" + std::to_string(S), "altitude_km", grid(600, 1800, 100), mc_an);
      s.base.U = 15;
      s.base.S = S;
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  {
    Preset p{"fig9_mask_angle", "OP vs mask angle 0..80 deg, S=3, U in {5,10,15}", {}};
    for (int U : {5, 10, 15}) {
      auto s = preset_spec("U" + std::to_string(U), "mask_angle_deg", grid(0, 80, 10), mc_an);
      s.base.U = U;
      s.base.S = 3;
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  {
    Preset p{"fig10_order", "per-order OP for CM and SIC, U=5, S=2", {}};
    auto s = preset_spec("", "P_u_dBm", grid(4, 20, 2), {Engine::MonteCarlo});
    s.base.U = 5;
    s.base.S = 2;
    p.series.push_back(s);
    out.push_back(p);
  }
  {
    Preset p{"fig11_icsi", "imperfect CSI, U=5, S=3, P_u 0..40 dBm", {}};
    struct Case {
      const char* label;
      double phi, chi, xi;
    };
    for (const Case& c : {Case{"perfect", 0.0, 0.0, 0.0}, Case{"chi0", 0.01, 0.0, 0.01},
                          Case{"chi0.05", 0.01, 0.05, 0.01}, Case{"chi0.1", 0.01, 0.1, 0.01}}) {
      auto s = preset_spec(c.label, "P_u_dBm", grid(0, 40, 4), mc_an);
      s.base.U = 5;
      s.base.S = 3;
      s.base.csi = {c.phi, c.chi, c.xi};
      p.series.push_back(s);
    }
    out.push_back(p);
  }
  for (auto& p : out)
    for (auto& s : p.series) s.output_path = p.name + ".csv";
  return out;
}

inline const Preset& find_preset(const std::string& name) {
  static const std::vector<Preset> all = list_presets();
  for (const auto& p : all)
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + name + "'");
}

struct CsvRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::CM;
  Engine engine = Engine::MonteCarlo;
  int order = 0;  // 0 = average
  double op = 0.0;
  double stderr_ = 0.0;
  double visibility = 0.0;
  std::uint64_t seed = 0;
};

inline const char* kCsvHeader = "sweep_param,sweep_value,scheme,engine,user_order,op,stderr,visibility_factor,seed";

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_row(const std::string& param, const CsvRow& r) {
  std::ostringstream os;
  os << param << ',' << format_number(r.sweep_value) << ',' << scheme_name(r.scheme) << ',' << engine_name(r.engine)
     << ',' << (r.order == 0 ? std::string("avg") : std::to_string(r.order)) << ',' << format_number(r.op) << ','
     << format_number(r.stderr_) << ',' << format_number(r.visibility) << ',' << r.seed;
  return os.str();
}

// Rows for one (value, scheme, engine) cell.
inline std::vector<CsvRow> evaluate_cell(const ExperimentSpec& spec, std::size_t vi, Scheme scheme, Engine engine,
                                         unsigned mc_workers = 1) {
  SystemConfig cfg = spec.base;
  set_config_field(cfg, spec.sweep_param, spec.sweep_values[vi]);
  const double x = spec.sweep_values[vi];
  std::vector<CsvRow> rows;
  if (engine == Engine::MonteCarlo) {
    const auto seed = sweep_seed(spec.seed, vi, scheme);
    SimulationOptions opt;
    opt.workers = mc_workers;
    const auto r = simulate(cfg, spec.L, seed, scheme, opt);
    for (int u = 0; u < cfg.U; ++u)
      rows.push_back({x, scheme, engine, u + 1, r.per_user_op[u], r.stderr_[u], r.visibility_factor, seed});
    rows.push_back({x, scheme, engine, 0, r.average_op, r.average_stderr, r.visibility_factor, seed});
    return rows;
  }
  const auto k = derive_constants(cfg);
  AnalyticSettings st = spec.analytic;
  st.seed = derive_seed(spec.seed, vi, 3);
  AnalyticOutcome o;
  if (engine == Engine::Analytic)
    o = scheme == Scheme::CM ? cm_outage_detailed(cfg, k, st) : sic_best_outage_detailed(cfg, k, st);
  else
    o = scheme == Scheme::CM ? asymptotic_cm_outage_detailed(cfg, k, st)
                             : asymptotic_sic_best_outage_detailed(cfg, k, st);
  const std::uint64_t seed = (engine == Engine::Analytic && scheme == Scheme::SIC) ? st.seed : 0;
  rows.push_back({x, scheme, engine, scheme == Scheme::CM ? 0 : 1, o.op, 0.0, o.visibility_factor, seed});
  return rows;
}

struct RunOptions {
  unsigned workers = 0;  // 0: hardware concurrency
};

// All rows of a spec in canonical (value, scheme, engine, order) order.
inline std::vector<CsvRow> run_rows(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  spec.validate();
  struct Task {
    std::size_t vi;
    Scheme scheme;
    Engine engine;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < spec.sweep_values.size(); ++i)
    for (Scheme s : spec.schemes)
      for (Engine e : spec.engines) tasks.push_back({i, s, e});

  std::vector<std::vector<CsvRow>> results(tasks.size());
  unsigned nw = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
  nw = static_cast<unsigned>(std::min<std::size_t>(nw, tasks.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      try {
        results[i] = evaluate_cell(spec, tasks[i].vi, tasks[i].scheme, tasks[i].engine, nw <= 1 ? 0 : 1);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nw; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Canonical order keys on the sweep index, so repeated values keep their
  // listed order.
  auto scheme_rank = [](Scheme s) { return s == Scheme::CM ? 0 : 1; };
  auto order_rank = [](int o) { return o == 0 ? 1 << 30 : o; };
  std::vector<std::pair<std::size_t, CsvRow>> keyed;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    for (const auto& r : results[i]) keyed.emplace_back(tasks[i].vi, r);
  std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    const auto& x = a.second;
    const auto& y = b.second;
    if (a.first != b.first) return a.first < b.first;
    if (x.scheme != y.scheme) return scheme_rank(x.scheme) < scheme_rank(y.scheme);
    if (x.engine != y.engine) return static_cast<int>(x.engine) < static_cast<int>(y.engine);
    return order_rank(x.order) < order_rank(y.order);
  });
  std::vector<CsvRow> rows;
  rows.reserve(keyed.size());
  for (auto& kv : keyed) rows.push_back(kv.second);
  return rows;
}

inline std::string render_csv(const ExperimentSpec& spec, const std::vector<CsvRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += format_row(spec.sweep_param, r) + "\n";
  return out;
}

// Writes via a temporary file renamed into place; nothing is left behind
// on failure.
inline void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot open '" + tmp + "' for writing");
    f << content;
    f.close();
    if (!f) {
      std::filesystem::remove(tmp);
      throw ConfigError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot move output into '" + path + "': " + ec.message());
  }
}

// Runs the spec and writes its CSV. Returns the number of data rows.
inline std::size_t run(const ExperimentSpec& spec, const RunOptions& opt = {}) {
  const auto rows = run_rows(spec, opt);
  write_file_atomically(spec.output_path, render_csv(spec, rows));
  return rows.size();
}

// <stem>_<label><ext> for multi-series presets.
inline std::string series_output_path(const std::string& base, const std::string& label) {
  if (label.empty()) return base;
  std::filesystem::path p(base);
  const std::string name = p.stem().string() + "_" + label + p.extension().string();
  return (p.parent_path() / name).string();
}

}  // namespace leoop
