#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mzi/error.hpp"
#include "mzi/experiment.hpp"
#include "mzi/io.hpp"

// Flat key-value configuration.
//
//   file    := { line }
//   line    := blank | comment | key '=' value
//   comment := '#' ...
//   key     := one of the names in `config_keys()`
//
// Whitespace around keys and values is ignored. A key given twice keeps the
// last value. Command-line flags use the same names as `--key value` and
// override the file.
namespace mzi::config {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Output locations and theory-only settings that live next to the
/// experiment parameters in a config file.
struct RunOptions {
  std::string output;
  std::string events;
  std::string report;
  std::string svg;
  double E = 0.333;
};

[[nodiscard]] inline const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys{
      "phi0_start", "phi0_stop", "points", "delta",  "alpha",  "photons", "schedule",
      "seed",       "init",      "stages", "stage_order", "output", "events", "report",
      "svg",        "E"};
  return keys;
}

[[nodiscard]] inline std::vector<Entry> parse_entries(std::istream& is) {
  std::vector<Entry> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string_view line = io::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw parse_error(lineno, "expected key = value");
    Entry e{std::string(io::trim(line.substr(0, eq))), std::string(io::trim(line.substr(eq + 1))),
            lineno};
    bool known = false;
    for (auto k : config_keys()) known = known || k == e.key;
    if (!known) throw parse_error(lineno, "unknown config key '" + e.key + "'");
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

[[nodiscard]] inline double need_double(const Entry& e) {
  const auto v = io::to_double(e.value);
  if (!v) throw input_error(e.key + ": expected a number, got '" + e.value + "'");
  return *v;
}

[[nodiscard]] inline std::uint64_t need_uint(const Entry& e) {
  const auto v = io::to_uint(e.value);
  if (!v) throw input_error(e.key + ": expected a nonnegative integer, got '" + e.value + "'");
  return *v;
}

}  // namespace detail

/// Applies one entry. Errors name the key and, for file entries, the line.
inline void apply(const Entry& e, ExperimentConfig& cfg, RunOptions& opts) {
  try {
    if (e.key == "phi0_start") {
      cfg.grid.start = detail::need_double(e);
    } else if (e.key == "phi0_stop") {
      cfg.grid.stop = detail::need_double(e);
    } else if (e.key == "points") {
      cfg.grid.points = detail::need_uint(e);
    } else if (e.key == "delta") {
      cfg.delta = detail::need_double(e);
    } else if (e.key == "alpha") {
      cfg.alpha = detail::need_double(e);
    } else if (e.key == "photons") {
      cfg.photons = detail::need_uint(e);
    } else if (e.key == "schedule") {
      cfg.schedule = parse_schedule(e.value);
    } else if (e.key == "seed") {
      cfg.seed = detail::need_uint(e);
    } else if (e.key == "init") {
      if (e.value == "default") {
        cfg.init = InitPolicy::Kind::kDefault;
      } else if (e.value == "random") {
        cfg.init = InitPolicy::Kind::kRandom;
      } else {
        throw input_error("init must be 'default' or 'random'");
      }
    } else if (e.key == "stages") {
      const auto parts = io::split(e.value, ',');
      if (parts.size() != 3) throw input_error("stages needs three comma-separated schedules");
      StagePlan plan = cfg.stages.value_or(StagePlan{});
      for (std::size_t r = 0; r < 3; ++r) plan.segments[r] = parse_schedule(io::trim(parts[r]));
      cfg.stages = plan;
    } else if (e.key == "stage_order") {
      const auto parts = io::split(e.value, ',');
      if (parts.size() != 3) throw input_error("stage_order needs three comma-separated stages");
      StagePlan plan = cfg.stages.value_or(StagePlan{});
      for (std::size_t p = 0; p < 3; ++p) {
        const auto v = io::to_uint(parts[p]);
        if (!v || *v < 1 || *v > 3) throw input_error("stage_order entries must be 1, 2 or 3");
        plan.order[p] = static_cast<int>(*v) - 1;
      }
      plan.validate();
      cfg.stages = plan;
    } else if (e.key == "output") {
      opts.output = e.value;
    } else if (e.key == "events") {
      opts.events = e.value;
    } else if (e.key == "report") {
      opts.report = e.value;
    } else if (e.key == "svg") {
      opts.svg = e.value;
    } else if (e.key == "E") {
      opts.E = detail::need_double(e);
      if (!(opts.E >= 0.0 && opts.E <= 1.0)) throw input_error("E must lie in [0, 1]");
    } else {
      throw input_error("unknown config key '" + e.key + "'");
    }
  } catch (const parse_error&) {
    throw;
  } catch (const input_error& err) {
    if (e.line > 0) throw parse_error(e.line, err.what());
    throw;
  }
}

}  // namespace mzi::config
