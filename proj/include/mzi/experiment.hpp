#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mzi/analysis.hpp"
#include "mzi/error.hpp"
#include "mzi/network.hpp"
#include "mzi/rng.hpp"
#include "mzi/schedule.hpp"

namespace mzi {

/// Equally spaced phi0 values start + (stop - start) j / points, j < points.
struct PhaseGrid {
  double start = 0.0;
  double stop = kTwoPi;
  std::size_t points = 32;

  [[nodiscard]] double at(std::size_t j) const noexcept {
    return start + (stop - start) * static_cast<double>(j) / static_cast<double>(points);
  }
};

/// Three stage segments by role (x = -1 fixed, x = +1 fixed, x varying) and
/// the order in which they are executed.
struct StagePlan {
  std::array<SettingSchedule, 3> segments{SettingSchedule::fixed(Setting::kMinus),
                                          SettingSchedule::fixed(Setting::kPlus),
                                          SettingSchedule::systematic(1)};
  std::array<int, 3> order{0, 1, 2};

  void validate() const {
    std::array<bool, 3> seen{};
    for (int r : order) {
      if (r < 0 || r > 2 || seen[static_cast<std::size_t>(r)]) {
        throw input_error("stage order must be a permutation of 0,1,2");
      }
      seen[static_cast<std::size_t>(r)] = true;
    }
  }
};

struct ExperimentConfig {
  PhaseGrid grid;
  double delta = -std::numbers::pi / 2;
  double alpha = 0.99;
  std::uint64_t photons = 1'000'000;
  SettingSchedule schedule = SettingSchedule::fixed(Setting::kPlus);
  std::uint64_t seed = 1;
  InitPolicy::Kind init = InitPolicy::Kind::kDefault;
  std::optional<StagePlan> stages;

  void validate() const {
    if (grid.points < 4) throw input_error("grid needs at least 4 points");
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (photons < 1) throw input_error("photons per grid point must be >= 1");
    if (stages) stages->validate();
  }

  [[nodiscard]] PhaseSetting phases() const { return PhaseSetting::from_delta(delta); }
};

/// Receives every event in emission order. Segments are announced before
/// their first event.
class EventSink {
 public:
  virtual ~EventSink() = default;
  virtual void begin_segment(double phi0, int stage, const SettingSchedule& schedule) = 0;
  virtual void event(const DetectionEvent& e) = 0;
};

namespace detail {

[[nodiscard]] inline InitPolicy init_for(const ExperimentConfig& c, std::size_t point) {
  if (c.init == InitPolicy::Kind::kDefault) return InitPolicy::standard();
  return InitPolicy::random(derive_seed(c.seed, point, 0, StreamKind::kInit));
}

inline DetectionTally run_segment(MziNetwork& net, const SettingSchedule& schedule,
                                  std::uint64_t photons, RandomStream& rng, EventSink* sink) {
  DetectionTally t;
  ScheduleCursor cursor(schedule);
  for (std::uint64_t n = 0; n < photons; ++n) {
    const DetectionEvent e = net.run_photon(cursor.next(), rng);
    t.add(e);
    if (sink != nullptr) sink->event(e);
  }
  return t;
}

}  // namespace detail

struct SweepResult {
  std::vector<FrequencyPoint> rows;
  /// Schedule in its text form; "unknown" for replayed data without one.
  std::string mode;
};

/// One fresh network per grid point, N photons each under the configured
/// schedule. Point j draws from the streams derived from (seed, j, 0).
[[nodiscard]] inline SweepResult run_sweep(const ExperimentConfig& c, EventSink* sink = nullptr) {
  c.validate();
  SweepResult result;
  result.mode = to_string(c.schedule);
  result.rows.reserve(c.grid.points);
  for (std::size_t j = 0; j < c.grid.points; ++j) {
    const double phi0 = c.grid.at(j);
    MziNetwork net(phi0, c.phases(), c.alpha, detail::init_for(c, j));
    RandomStream rng(derive_seed(c.seed, j, 0));
    const SettingSchedule schedule =
        c.schedule.with_seed(derive_seed(c.seed, j, 0, StreamKind::kSchedule));
    if (sink != nullptr) sink->begin_segment(phi0, 0, c.schedule);
    result.rows.push_back(make_point(phi0, detail::run_segment(net, schedule, c.photons, rng, sink)));
  }
  return result;
}

/// Group whose frequency represents a stage: its own x for a fixed stage,
/// x = +1 otherwise.
[[nodiscard]] inline FrequencyColumn stage_column(const SettingSchedule& s) noexcept {
  if (!s.varies() && s.fixed_value == Setting::kMinus) return FrequencyColumn::kMinus;
  return FrequencyColumn::kPlus;
}

struct StagedResult {
  /// rows[role][j]
  std::array<std::vector<FrequencyPoint>, 3> rows;
  StagePlan plan;
};

/// At each grid point the three stages run back to back on the same network;
/// beam-splitter state carries over from one stage to the next. Stage with
/// role r at point j uses the streams derived from (seed, j, r + 1).
[[nodiscard]] inline StagedResult run_stages(const ExperimentConfig& c, EventSink* sink = nullptr) {
  c.validate();
  if (!c.stages) throw input_error("stage run requires a stage plan");
  StagedResult result;
  result.plan = *c.stages;
  for (auto& r : result.rows) r.reserve(c.grid.points);
  for (std::size_t j = 0; j < c.grid.points; ++j) {
    const double phi0 = c.grid.at(j);
    MziNetwork net(phi0, c.phases(), c.alpha, detail::init_for(c, j));
    for (int role : c.stages->order) {
      const auto r = static_cast<std::size_t>(role);
      const std::uint64_t stage_id = r + 1;
      RandomStream rng(derive_seed(c.seed, j, stage_id));
      const SettingSchedule& segment = c.stages->segments[r];
      const SettingSchedule schedule =
          segment.with_seed(derive_seed(c.seed, j, stage_id, StreamKind::kSchedule));
      if (sink != nullptr) sink->begin_segment(phi0, role + 1, segment);
      result.rows[r].push_back(
          make_point(phi0, detail::run_segment(net, schedule, c.photons, rng, sink)));
    }
  }
  return result;
}

/// Wrong-association rate the varying schedule is expected to produce, when
/// one is known.
[[nodiscard]] inline std::optional<double> expected_E(const SettingSchedule& s) {
  switch (s.mode) {
    case ScheduleMode::kFixed:
      return 0.0;
    case ScheduleMode::kSystematic:
      return theory::e_systematic_reference(static_cast<std::int64_t>(s.K));
    case ScheduleMode::kRandom:
      return theory::e_random_approx(static_cast<std::int64_t>(s.K));
  }
  return std::nullopt;
}

[[nodiscard]] inline FitResult fit_column(std::span<const FrequencyPoint> rows, FrequencyColumn col) {
  const auto pts = fit_points(rows, col);
  return fit_sinusoid(pts);
}

[[nodiscard]] inline StageReport analyze_stages(const std::array<std::vector<FrequencyPoint>, 3>& rows,
                                                const StagePlan& plan, double delta,
                                                const StageTolerances& tol = {}) {
  StageFits fits;
  fits.fixed_minus = fit_column(rows[0], stage_column(plan.segments[0]));
  fits.fixed_plus = fit_column(rows[1], stage_column(plan.segments[1]));
  fits.varying = fit_column(rows[2], stage_column(plan.segments[2]));
  return compare_stages(fits, delta, expected_E(plan.segments[2]), tol);
}

}  // namespace mzi
