#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "leoop/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw leoop::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> realizations;
  std::string out;
};

int do_run(const RunArgs& a) {
  std::vector<leoop::ExperimentSpec> specs;
  if (!a.preset.empty()) {
    specs = leoop::find_preset(a.preset).series;
    if (!a.config.empty()) {
      const std::string text = read_file(a.config);
      for (auto& s : specs) leoop::apply_config(text, s, false);
    }
  } else {
    if (a.config.empty()) throw leoop::ConfigError("run needs --config or --preset");
    specs.push_back(leoop::parse_config(read_file(a.config)));
  }

  for (auto& s : specs) {
    if (a.seed) s.seed = *a.seed;
    if (a.realizations) {
      if (*a.realizations < 1) throw leoop::ConfigError("--realizations must be >= 1");
      s.L = *a.realizations;
    }
    if (!a.out.empty()) s.output_path = a.out;
    if (specs.size() > 1) s.output_path = leoop::series_output_path(s.output_path, s.label);
  }
  for (const auto& s : specs) {
    const auto rows = leoop::run(s);
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows, s.output_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage probability of an interference-limited LEO satellite IoT uplink"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a sweep and write a CSV");
  run->add_option("--config", ra.config, "key = value scenario file");
  run->add_option("--preset", ra.preset, "named preset (see list-presets)");
  run->add_option("--seed", ra.seed, "override the seed");
  run->add_option("--realizations", ra.realizations, "override the Monte Carlo realization count");
  run->add_option("--out", ra.out, "output CSV path");

  auto* list = app.add_subcommand("list-presets", "print the preset catalog");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "parse a config without running it");
  validate->add_option("--config", validate_path, "key = value scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return do_run(ra);
    if (*list) {
      for (const auto& p : leoop::list_presets()) {
        std::printf("%-18s %s\n", p.name.c_str(), p.description.c_str());
        for (const auto& s : p.series)
          if (!s.label.empty())
            std::printf("%-18s   series %s -> %s\n", "", s.label.c_str(),
                        leoop::series_output_path(s.output_path, s.label).c_str());
      }
      return kExitOk;
    }
    if (*validate) {
      const auto spec = leoop::parse_config(read_file(validate_path));
      std::printf("ok: %s sweep over %zu values\n", spec.sweep_param.c_str(), spec.sweep_values.size());
      return kExitOk;
    }
  } catch (const leoop::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kExitNumeric;
  } catch (const leoop::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const leoop::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
