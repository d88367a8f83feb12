// Command-line driver: theory curves, simulated sweeps and staged runs,
// refitting of sweep CSVs and replay of event-record files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include "mzi/mzi.hpp"

namespace {

using mzi::config::Entry;
using mzi::config::RunOptions;

struct Settings {
  std::string config_file;
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> options;
};

void add_config_flags(CLI::App& app, Settings& s) {
  app.add_option("--config", s.config_file, "flat key = value config file")->check(CLI::ExistingFile);
  for (auto key : mzi::config::config_keys()) {
    const std::string k(key);
    s.options[k] = app.add_option("--" + k, s.flags[k], "overrides config key '" + k + "'");
  }
}

std::pair<mzi::ExperimentConfig, RunOptions> resolve(const Settings& s) {
  mzi::ExperimentConfig cfg;
  RunOptions opts;
  if (!s.config_file.empty()) {
    std::ifstream in(s.config_file);
    if (!in) throw mzi::input_error("cannot open config file " + s.config_file);
    for (const auto& e : mzi::config::parse_entries(in)) mzi::config::apply(e, cfg, opts);
  }
  for (auto key : mzi::config::config_keys()) {
    const std::string k(key);
    if (s.options.at(k)->count() > 0) mzi::config::apply(Entry{k, s.flags.at(k), 0}, cfg, opts);
  }
  return {cfg, opts};
}

/// Opens `path` for writing, or returns nullptr for stdout.
std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*f) throw mzi::input_error("cannot write " + path);
  return f;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  auto f = open_out(path);
  *f << text;
  if (!*f) throw mzi::input_error("failed writing " + path);
}

void maybe_svg(const RunOptions& opts, const std::vector<mzi::io::SvgSeries>& series,
               const std::string& title) {
  if (opts.svg.empty()) return;
  std::ostringstream os;
  mzi::io::write_svg(os, series, title);
  emit(opts.svg, os.str());
}

std::vector<mzi::io::SvgSeries> sweep_series(const mzi::SweepResult& r) {
  mzi::io::SvgSeries plus{"F0(x=+1)", "crimson", {}};
  mzi::io::SvgSeries minus{"F0(x=-1)", "steelblue", {}};
  mzi::io::SvgSeries ungrouped{"F0' ungrouped", "black", {}};
  for (const auto& p : r.rows) {
    plus.points.emplace_back(p.phi0, p.f0_plus);
    minus.points.emplace_back(p.phi0, p.f0_minus);
    ungrouped.points.emplace_back(p.phi0, p.f0_ungrouped);
  }
  return {plus, minus, ungrouped};
}

std::vector<mzi::io::SvgSeries> stage_series(const mzi::StagedResult& r) {
  static const char* colors[] = {"steelblue", "crimson", "darkgreen"};
  std::vector<mzi::io::SvgSeries> out;
  // Stages share one abscissa, laid end to end in execution order.
  double offset = 0.0;
  for (int role : r.plan.order) {
    const auto idx = static_cast<std::size_t>(role);
    mzi::io::SvgSeries s{"stage " + std::to_string(role + 1), colors[idx], {}};
    const auto col = mzi::stage_column(r.plan.segments[idx]);
    for (const auto& p : r.rows[idx]) {
      s.points.emplace_back(offset + p.phi0,
                            col == mzi::FrequencyColumn::kMinus ? p.f0_minus : p.f0_plus);
    }
    offset += mzi::kTwoPi;
    out.push_back(std::move(s));
  }
  return out;
}

std::string sweep_report(const mzi::SweepResult& r, double delta) {
  std::ostringstream os;
  mzi::io::write_sweep_report(os, r.rows, r.mode, delta);
  return os.str();
}

std::string stage_report(const mzi::StagedResult& r, double delta) {
  std::ostringstream os;
  const auto rep = mzi::analyze_stages(r.rows, r.plan, delta);
  mzi::io::write_stage_report(os, rep, r.plan, delta);
  return os.str();
}

// CSV goes to --output (stdout when unset). The report goes to --report, or
// to stdout when the CSV was written to a file.
void publish(const RunOptions& opts, const std::string& csv, const std::string& report) {
  emit(opts.output, csv);
  if (!opts.report.empty()) {
    emit(opts.report, report);
  } else if (!opts.output.empty()) {
    std::cout << report;
  }
}

int run_theory(const Settings& s) {
  auto [cfg, opts] = resolve(s);
  cfg.validate();
  const auto phases = cfg.phases();
  const mzi::theory::CorpuscularParams corp{opts.E, phases.delta()};
  std::ostringstream os;
  os << "#mzi-theory v1\n"
     << "phi0,qt_fixed_plus,qt_fixed_minus,qt_grouped_plus,qt_grouped_minus,qt_ungrouped,"
        "corp_grouped_plus,corp_grouped_minus\n";
  using mzi::Setting;
  using mzi::io::fmt_exact;
  for (std::size_t j = 0; j < cfg.grid.points; ++j) {
    const double phi0 = cfg.grid.at(j);
    os << fmt_exact(phi0) << ',' << fmt_exact(mzi::theory::qt_fixed(phi0, Setting::kPlus, phases))
       << ',' << fmt_exact(mzi::theory::qt_fixed(phi0, Setting::kMinus, phases)) << ','
       << fmt_exact(mzi::theory::qt_grouped(phi0, Setting::kPlus, phases)) << ','
       << fmt_exact(mzi::theory::qt_grouped(phi0, Setting::kMinus, phases)) << ','
       << fmt_exact(mzi::theory::qt_ungrouped(phi0, phases)) << ','
       << fmt_exact(mzi::theory::corpuscular_grouped(phi0, Setting::kPlus, corp)) << ','
       << fmt_exact(mzi::theory::corpuscular_grouped(phi0, Setting::kMinus, corp)) << '\n';
  }
  emit(opts.output, os.str());
  return 0;
}

int run_sweep_cmd(const Settings& s) {
  auto [cfg, opts] = resolve(s);
  auto events = open_out(opts.events);
  std::unique_ptr<mzi::io::RecordWriter> writer;
  if (events) writer = std::make_unique<mzi::io::RecordWriter>(*events, cfg.delta);
  const auto result = mzi::run_sweep(cfg, writer.get());
  if (events && !*events) throw mzi::input_error("failed writing " + opts.events);

  std::ostringstream csv;
  mzi::io::write_sweep_csv(csv, result);
  publish(opts, csv.str(), sweep_report(result, cfg.delta));
  maybe_svg(opts, sweep_series(result), "sweep " + result.mode);
  return 0;
}

int run_stages_cmd(const Settings& s) {
  auto [cfg, opts] = resolve(s);
  if (!cfg.stages) cfg.stages = mzi::StagePlan{};
  auto events = open_out(opts.events);
  std::unique_ptr<mzi::io::RecordWriter> writer;
  if (events) writer = std::make_unique<mzi::io::RecordWriter>(*events, cfg.delta);
  const auto result = mzi::run_stages(cfg, writer.get());
  if (events && !*events) throw mzi::input_error("failed writing " + opts.events);

  std::ostringstream csv;
  mzi::io::write_stages_csv(csv, result);
  publish(opts, csv.str(), stage_report(result, cfg.delta));
  maybe_svg(opts, stage_series(result), "three-stage run");
  return 0;
}

int run_fit(const Settings& s, const std::string& path) {
  auto [cfg, opts] = resolve(s);
  std::ifstream in(path);
  if (!in) throw mzi::input_error("cannot open " + path);
  const auto parsed = mzi::io::read_frequency_csv(in);
  if (!parsed.staged) {
    mzi::SweepResult sweep;
    sweep.mode = parsed.rows.empty() ? "unknown" : parsed.rows.front().mode;
    for (const auto& r : parsed.rows) sweep.rows.push_back(r.point);
    emit(opts.report, sweep_report(sweep, cfg.delta));
    return 0;
  }
  mzi::StagedResult staged;
  if (parsed.rows.size() < 3 || parsed.rows.size() % 3 != 0) {
    throw mzi::input_error("staged CSV needs 3 rows per phi0");
  }
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& row = parsed.rows[p];
    staged.plan.order[p] = row.stage - 1;
    staged.plan.segments[static_cast<std::size_t>(row.stage - 1)] = mzi::parse_schedule(row.mode);
  }
  staged.plan.validate();
  for (const auto& row : parsed.rows) {
    staged.rows[static_cast<std::size_t>(row.stage - 1)].push_back(row.point);
  }
  emit(opts.report, stage_report(staged, cfg.delta));
  return 0;
}

int run_replay(const Settings& s, const std::string& path) {
  auto [cfg, opts] = resolve(s);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mzi::input_error("cannot open " + path);
  const auto file = mzi::io::read_records(in, cfg.grid.start);
  // An explicit --delta wins over the value recorded in the file.
  const double delta =
      s.options.at("delta")->count() > 0 || !file.delta ? cfg.delta : *file.delta;
  const auto replay = mzi::io::rebuild(file);
  std::ostringstream csv;
  if (replay.staged) {
    mzi::io::write_stages_csv(csv, replay.stages);
    publish(opts, csv.str(), stage_report(replay.stages, delta));
  } else {
    mzi::io::write_sweep_csv(csv, replay.sweep);
    publish(opts, csv.str(), sweep_report(replay.sweep, delta));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-by-event Mach-Zehnder interferometer simulator"};
  app.require_subcommand(1);

  Settings theory_s, sweep_s, stages_s, fit_s, replay_s;
  std::string fit_path, replay_path;

  auto* theory = app.add_subcommand("theory", "emit closed-form D0 curves as CSV");
  add_config_flags(*theory, theory_s);
  auto* sweep = app.add_subcommand("sweep", "simulate a phi0 sweep under one x schedule");
  add_config_flags(*sweep, sweep_s);
  auto* stages = app.add_subcommand("stages", "simulate the three-stage protocol");
  add_config_flags(*stages, stages_s);
  auto* fit = app.add_subcommand("fit", "fit the frequency columns of a sweep or stage CSV");
  add_config_flags(*fit, fit_s);
  fit->add_option("csv", fit_path, "sweep or stage CSV")->required();
  auto* replay = app.add_subcommand("replay", "rebuild CSV and report from an event-record file");
  add_config_flags(*replay, replay_s);
  replay->add_option("records", replay_path, "event-record file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*theory) return run_theory(theory_s);
    if (*sweep) return run_sweep_cmd(sweep_s);
    if (*stages) return run_stages_cmd(stages_s);
    if (*fit) return run_fit(fit_s, fit_path);
    if (*replay) return run_replay(replay_s, replay_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
