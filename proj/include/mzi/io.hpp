#pragma once

#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mzi/analysis.hpp"
#include "mzi/error.hpp"
#include "mzi/experiment.hpp"
#include "mzi/schedule.hpp"

// File formats. Every writer here is deterministic: floating-point values are
// printed with enough digits to round-trip, lines end in LF.
namespace mzi::io {

inline constexpr std::string_view kSweepMagic = "#mzi-sweep v1";
inline constexpr std::string_view kStagesMagic = "#mzi-stages v1";
inline constexpr std::string_view kEventsMagic = "#mzi-events v1";
inline constexpr std::string_view kReportMagic = "#mzi-report v1";
inline constexpr std::string_view kSweepColumns =
    "phi0,x_mode,n0_plus,n1_plus,n0_minus,n1_minus,f0_plus,f0_minus,f0_ungrouped";

[[nodiscard]] inline std::string fmt_exact(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[nodiscard]] inline std::string fmt_short(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

[[nodiscard]] inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[nodiscard]] inline std::optional<double> to_double(std::string_view s) {
  const std::string tmp(trim(s));
  if (tmp.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size()) return std::nullopt;
  return v;
}

[[nodiscard]] inline std::optional<std::uint64_t> to_uint(std::string_view s) {
  const std::string tmp(trim(s));
  if (tmp.empty() || tmp.front() == '-' || tmp.front() == '+') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
  if (errno != 0 || end != tmp.c_str() + tmp.size()) return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

// ---------------------------------------------------------------------------
// Sweep and staged CSV

inline void write_sweep_row(std::ostream& os, const FrequencyPoint& p, const std::string& mode) {
  os << fmt_exact(p.phi0) << ',' << mode << ',' << p.counts.n0_plus << ',' << p.counts.n1_plus << ','
     << p.counts.n0_minus << ',' << p.counts.n1_minus << ',' << fmt_exact(p.f0_plus) << ','
     << fmt_exact(p.f0_minus) << ',' << fmt_exact(p.f0_ungrouped) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << kSweepMagic << '\n' << kSweepColumns << '\n';
  for (const auto& p : r.rows) write_sweep_row(os, p, r.mode);
}

/// Rows in execution order; `stage` is the role 1..3 (x = -1 fixed,
/// x = +1 fixed, x varying).
inline void write_stages_csv(std::ostream& os, const StagedResult& r) {
  os << kStagesMagic << '\n' << "stage," << kSweepColumns << '\n';
  const std::size_t n = r.rows[0].size();
  for (std::size_t j = 0; j < n; ++j) {
    for (int role : r.plan.order) {
      const auto idx = static_cast<std::size_t>(role);
      os << (role + 1) << ',';
      write_sweep_row(os, r.rows[idx][j], to_string(r.plan.segments[idx]));
    }
  }
}

struct ParsedRow {
  int stage = 0;
  std::string mode;
  FrequencyPoint point;
};

struct ParsedCsv {
  bool staged = false;
  std::vector<ParsedRow> rows;
};

[[nodiscard]] inline ParsedCsv read_frequency_csv(std::istream& is) {
  ParsedCsv out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (lineno == 1 && view.front() == '#') {
      if (view == kStagesMagic) {
        out.staged = true;
      } else if (view != kSweepMagic) {
        throw parse_error(lineno, "unsupported CSV version '" + std::string(view) + "'");
      }
      continue;
    }
    if (view.front() == '#') continue;
    if (!header_seen) {
      const std::string expected = (out.staged ? "stage," : "") + std::string(kSweepColumns);
      if (view != expected) throw parse_error(lineno, "unexpected column header");
      header_seen = true;
      continue;
    }
    auto fields = split(view, ',');
    ParsedRow row;
    if (out.staged) {
      if (fields.empty()) throw parse_error(lineno, "missing stage column");
      const auto st = to_uint(fields.front());
      if (!st || *st < 1 || *st > 3) throw parse_error(lineno, "stage must be 1, 2 or 3");
      row.stage = static_cast<int>(*st);
      fields.erase(fields.begin());
    }
    if (fields.size() != 9) throw parse_error(lineno, "expected 9 sweep columns");
    const auto phi0 = to_double(fields[0]);
    const auto n0p = to_uint(fields[2]);
    const auto n1p = to_uint(fields[3]);
    const auto n0m = to_uint(fields[4]);
    const auto n1m = to_uint(fields[5]);
    if (!phi0 || !n0p || !n1p || !n0m || !n1m) throw parse_error(lineno, "malformed number");
    row.mode = std::string(trim(fields[1]));
    // Frequencies are recomputed from the counts; the written columns are
    // derived data.
    row.point = make_point(*phi0, DetectionTally{*n0p, *n0m, *n1p, *n1m});
    out.rows.push_back(std::move(row));
  }
  if (!header_seen) throw parse_error(lineno, "missing column header");
  return out;
}

// ---------------------------------------------------------------------------
// Event records: "i,x,d0,d1,d" per line, with '#' directive lines.

class RecordWriter final : public EventSink {
 public:
  RecordWriter(std::ostream& os, double delta) : os_(os) {
    os_ << kEventsMagic << '\n' << "#delta " << fmt_exact(delta) << '\n';
  }

  void begin_segment(double phi0, int stage, const SettingSchedule& schedule) override {
    os_ << "#segment phi0=" << fmt_exact(phi0) << " stage=" << stage
        << " schedule=" << to_string(schedule) << '\n';
  }

  void event(const DetectionEvent& e) override {
    // Herald column d is constant: the simulated source never loses a photon.
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%" PRIu64 ",%d,%d,%d,1\n", e.index, to_int(e.x),
                                e.detector == 0 ? 1 : 0, e.detector == 1 ? 1 : 0);
    os_.write(buf, n);
  }

 private:
  std::ostream& os_;
};

struct RecordSegment {
  double phi0 = 0.0;
  int stage = 0;
  std::string schedule = "unknown";
  DetectionTally counts;
  std::uint64_t undetected = 0;
};

struct RecordFile {
  std::optional<double> delta;
  std::vector<RecordSegment> segments;
};

[[nodiscard]] inline RecordFile read_records(std::istream& is, double default_phi0 = 0.0) {
  RecordFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (lineno == 1) {
      if (view != kEventsMagic) throw parse_error(lineno, "missing '#mzi-events v1' header");
      continue;
    }
    if (view.empty()) continue;
    if (view.front() == '#') {
      if (view.starts_with("#delta ")) {
        const auto d = to_double(view.substr(7));
        if (!d) throw parse_error(lineno, "malformed #delta directive");
        out.delta = *d;
      } else if (view.starts_with("#segment ")) {
        RecordSegment seg;
        for (auto token : split(view.substr(9), ' ')) {
          token = trim(token);
          if (token.empty()) continue;
          const auto eq = token.find('=');
          if (eq == std::string_view::npos) throw parse_error(lineno, "malformed #segment field");
          const auto key = token.substr(0, eq);
          const auto value = token.substr(eq + 1);
          if (key == "phi0") {
            const auto v = to_double(value);
            if (!v) throw parse_error(lineno, "malformed phi0");
            seg.phi0 = *v;
          } else if (key == "stage") {
            const auto v = to_uint(value);
            if (!v || *v > 3) throw parse_error(lineno, "stage must be 0..3");
            seg.stage = static_cast<int>(*v);
          } else if (key == "schedule") {
            seg.schedule = std::string(value);
          } else {
            throw parse_error(lineno, "unknown #segment field '" + std::string(key) + "'");
          }
        }
        out.segments.push_back(std::move(seg));
      }
      continue;
    }
    const auto fields = split(view, ',');
    if (fields.size() != 5) throw parse_error(lineno, "expected 5 fields i,x,d0,d1,d");
    const auto i = to_uint(fields[0]);
    const std::string_view xs = trim(fields[1]);
    const auto d0 = to_uint(fields[2]);
    const auto d1 = to_uint(fields[3]);
    const auto d = to_uint(fields[4]);
    if (!i || !d0 || !d1 || !d) throw parse_error(lineno, "malformed integer field");
    Setting x;
    if (xs == "1" || xs == "+1") {
      x = Setting::kPlus;
    } else if (xs == "-1") {
      x = Setting::kMinus;
    } else {
      throw parse_error(lineno, "x must be +1 or -1");
    }
    if (*d0 > 1 || *d1 > 1 || *d > 1) throw parse_error(lineno, "detector fields must be 0 or 1");
    if (*d0 == 1 && *d1 == 1) throw parse_error(lineno, "coincidence violation: d0 = d1 = 1");
    if (out.segments.empty()) {
      RecordSegment seg;
      seg.phi0 = default_phi0;
      out.segments.push_back(seg);
    }
    auto& seg = out.segments.back();
    if (*d0 == 0 && *d1 == 0) {
      ++seg.undetected;
    } else {
      seg.counts.add(x, *d0 == 1 ? 0 : 1);
    }
  }
  if (lineno == 0) throw parse_error(1, "empty record file");
  return out;
}

struct Replay {
  bool staged = false;
  SweepResult sweep;
  StagedResult stages;
};

/// Rebuilds the per-point tallies a live run would have produced. Segments
/// with stage 0 form a sweep; stages 1..3 form a staged run whose execution
/// order is read from the first three segments.
[[nodiscard]] inline Replay rebuild(const RecordFile& file) {
  Replay out;
  if (file.segments.empty()) throw input_error("record file contains no events");
  out.staged = file.segments.front().stage != 0;
  if (!out.staged) {
    out.sweep.mode = file.segments.front().schedule;
    for (const auto& seg : file.segments) {
      if (seg.stage != 0) throw input_error("record file mixes sweep and stage segments");
      out.sweep.rows.push_back(make_point(seg.phi0, seg.counts));
    }
    return out;
  }
  if (file.segments.size() % 3 != 0) throw input_error("staged record file needs 3 segments per phi0");
  StagePlan plan;
  for (std::size_t p = 0; p < 3; ++p) {
    const auto& seg = file.segments[p];
    if (seg.stage < 1) throw input_error("record file mixes sweep and stage segments");
    plan.order[p] = seg.stage - 1;
    plan.segments[static_cast<std::size_t>(seg.stage - 1)] = parse_schedule(seg.schedule);
  }
  plan.validate();
  for (std::size_t i = 0; i < file.segments.size(); ++i) {
    const auto& seg = file.segments[i];
    if (seg.stage != plan.order[i % 3] + 1) throw input_error("inconsistent stage order in record file");
    out.stages.rows[static_cast<std::size_t>(seg.stage - 1)].push_back(make_point(seg.phi0, seg.counts));
  }
  out.stages.plan = plan;
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline void write_fit(std::ostream& os, const std::string& name, const FitResult& f) {
  os << '[' << name << "]\n"
     << "C = " << fmt_short(f.C) << '\n'
     << "A = " << fmt_short(f.A) << '\n'
     << "Delta = " << fmt_short(f.Delta) << '\n'
     << "psi = " << fmt_short(f.psi) << '\n'
     << "rms_residual = " << fmt_short(f.rms_residual) << '\n'
     << "C_se = " << fmt_short(f.C_se) << '\n'
     << "Delta_se = " << fmt_short(f.Delta_se) << '\n'
     << "psi_se = " << fmt_short(f.psi_se) << '\n';
  if (f.E_hat) os << "E_hat = " << fmt_short(*f.E_hat) << '\n';
}

/// Fits every non-empty frequency column. The x = +1 column also carries the
/// wrong-association rate implied by its phase shift.
inline void write_sweep_report(std::ostream& os, std::span<const FrequencyPoint> rows,
                               const std::string& mode, double delta) {
  DetectionTally total;
  for (const auto& r : rows) total += r.counts;
  os << kReportMagic << '\n'
     << "kind = sweep\n"
     << "schedule = " << mode << '\n'
     << "delta = " << fmt_exact(delta) << '\n'
     << "points = " << rows.size() << '\n'
     << "photons = " << total.total() << '\n';
  const std::pair<const char*, FrequencyColumn> columns[] = {
      {"f0_plus", FrequencyColumn::kPlus},
      {"f0_minus", FrequencyColumn::kMinus},
      {"f0_ungrouped", FrequencyColumn::kUngrouped}};
  for (const auto& [name, col] : columns) {
    const auto pts = fit_points(rows, col);
    if (pts.empty()) continue;
    os << '\n';
    try {
      FitResult fit = fit_sinusoid(pts);
      if (col == FrequencyColumn::kPlus) {
        try {
          const auto e = infer_E(fit.Delta, fit.psi, delta);
          fit.E_hat = e.E;
          write_fit(os, name, fit);
          os << "E_discrepancy = " << fmt_short(e.discrepancy) << '\n';
          continue;
        } catch (const input_error&) {
        }
      }
      write_fit(os, name, fit);
    } catch (const input_error& err) {
      os << '[' << name << "]\nerror = " << err.what() << '\n';
    }
  }
}

inline void write_stage_report(std::ostream& os, const StageReport& rep, const StagePlan& plan,
                               double delta) {
  os << kReportMagic << '\n'
     << "kind = stages\n"
     << "delta = " << fmt_exact(delta) << '\n'
     << "order = " << plan.order[0] + 1 << ',' << plan.order[1] + 1 << ',' << plan.order[2] + 1
     << '\n';
  const FitResult* fits[] = {&rep.fits.fixed_minus, &rep.fits.fixed_plus, &rep.fits.varying};
  for (int r = 0; r < 3; ++r) {
    os << '\n';
    write_fit(os, "stage" + std::to_string(r + 1) + ' ' + to_string(plan.segments[r]), *fits[r]);
  }
  os << "\n[comparison]\n"
     << "visibility_drop = " << fmt_short(rep.visibility_drop) << '\n'
     << "shift_difference = " << fmt_short(rep.shift_difference) << '\n'
     << "E_hat = " << fmt_short(rep.E_hat) << '\n'
     << "E_expected = " << (rep.E_expected ? fmt_short(*rep.E_expected) : "unknown") << '\n'
     << "visibility_tolerance = " << fmt_short(rep.visibility_tolerance) << '\n'
     << "phase_tolerance = " << fmt_short(rep.phase_tolerance) << '\n'
     << "verdict = " << to_string(rep.verdict) << '\n';
}

}  // namespace mzi::io
