#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

#include "mzi/error.hpp"
#include "mzi/rng.hpp"

namespace mzi {

/// The external setting. Always known; never a measurement outcome.
enum class Setting : int { kMinus = -1, kPlus = +1 };

[[nodiscard]] constexpr int to_int(Setting x) noexcept { return static_cast<int>(x); }
[[nodiscard]] constexpr Setting flip(Setting x) noexcept {
  return x == Setting::kPlus ? Setting::kMinus : Setting::kPlus;
}

enum class ScheduleMode { kFixed, kSystematic, kRandom };

/// How x evolves over the emitted photons. Photon indices start at 1 and
/// x may only change at multiples of K.
struct SettingSchedule {
  ScheduleMode mode = ScheduleMode::kFixed;
  Setting fixed_value = Setting::kPlus;
  std::uint64_t K = 1;
  std::uint64_t seed = 0;

  static SettingSchedule fixed(Setting x) { return {ScheduleMode::kFixed, x, 1, 0}; }

  static SettingSchedule systematic(std::uint64_t k) {
    if (k < 1) throw input_error("schedule block length K must be >= 1");
    return {ScheduleMode::kSystematic, Setting::kPlus, k, 0};
  }

  static SettingSchedule random(std::uint64_t k, std::uint64_t seed) {
    if (k < 1) throw input_error("schedule block length K must be >= 1");
    return {ScheduleMode::kRandom, Setting::kPlus, k, seed};
  }

  [[nodiscard]] SettingSchedule with_seed(std::uint64_t s) const {
    SettingSchedule copy = *this;
    copy.seed = s;
    return copy;
  }

  [[nodiscard]] bool varies() const noexcept { return mode != ScheduleMode::kFixed; }
};

namespace detail {

// Fair coin deciding whether x is replaced by -x at the start of `block`.
[[nodiscard]] constexpr bool random_flip(std::uint64_t seed, std::uint64_t block) noexcept {
  return (mix64(seed ^ mix64(block)) >> 63) != 0;
}

[[nodiscard]] constexpr std::uint64_t block_of(std::uint64_t i, std::uint64_t k) noexcept {
  return (i - 1) / k + 1;
}

}  // namespace detail

/// Value of x for photon i (1-based). Pure in (schedule, i).
[[nodiscard]] inline Setting x_at(const SettingSchedule& s, std::uint64_t i) {
  if (i < 1) throw input_error("photon index must be >= 1");
  switch (s.mode) {
    case ScheduleMode::kFixed:
      return s.fixed_value;
    case ScheduleMode::kSystematic:
      return detail::block_of(i, s.K) % 2 == 1 ? Setting::kPlus : Setting::kMinus;
    case ScheduleMode::kRandom: {
      Setting x = Setting::kPlus;
      const std::uint64_t last = detail::block_of(i, s.K);
      for (std::uint64_t b = 2; b <= last; ++b) {
        if (detail::random_flip(s.seed, b)) x = flip(x);
      }
      return x;
    }
  }
  return s.fixed_value;
}

/// Sequential walk over a schedule; yields the same values as x_at in O(1)
/// per photon.
class ScheduleCursor {
 public:
  explicit ScheduleCursor(const SettingSchedule& s) : schedule_(s) {}

  /// x for the next photon.
  Setting next() {
    ++index_;
    if (index_ == 1) {
      x_ = schedule_.mode == ScheduleMode::kFixed ? schedule_.fixed_value : Setting::kPlus;
      return x_;
    }
    if (schedule_.mode != ScheduleMode::kFixed && (index_ - 1) % schedule_.K == 0) {
      const std::uint64_t block = detail::block_of(index_, schedule_.K);
      if (schedule_.mode == ScheduleMode::kSystematic || detail::random_flip(schedule_.seed, block)) {
        x_ = flip(x_);
      }
    }
    return x_;
  }

  [[nodiscard]] std::uint64_t index() const noexcept { return index_; }

 private:
  SettingSchedule schedule_;
  std::uint64_t index_ = 0;
  Setting x_ = Setting::kPlus;
};

/// Text form used by config files and CSV: "fixed:+1", "fixed:-1",
/// "systematic:K", "random:K".
[[nodiscard]] inline std::string to_string(const SettingSchedule& s) {
  switch (s.mode) {
    case ScheduleMode::kFixed:
      return s.fixed_value == Setting::kPlus ? "fixed:+1" : "fixed:-1";
    case ScheduleMode::kSystematic:
      return "systematic:" + std::to_string(s.K);
    case ScheduleMode::kRandom:
      return "random:" + std::to_string(s.K);
  }
  return {};
}

[[nodiscard]] inline SettingSchedule parse_schedule(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw input_error("schedule must look like fixed:+1, systematic:K or random:K, got '" +
                      std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string arg(text.substr(colon + 1));
  if (kind == "fixed") {
    if (arg == "+1" || arg == "1") return SettingSchedule::fixed(Setting::kPlus);
    if (arg == "-1") return SettingSchedule::fixed(Setting::kMinus);
    throw input_error("fixed schedule value must be +1 or -1, got '" + arg + "'");
  }
  std::uint64_t k = 0;
  try {
    std::size_t used = 0;
    if (arg.empty() || arg.front() == '-') throw std::invalid_argument(arg);
    k = std::stoull(arg, &used);
    if (used != arg.size()) throw std::invalid_argument(arg);
  } catch (const std::exception&) {
    throw input_error("schedule block length must be a positive integer, got '" + arg + "'");
  }
  if (kind == "systematic") return SettingSchedule::systematic(k);
  if (kind == "random") return SettingSchedule::random(k, 0);
  throw input_error("unknown schedule mode '" + std::string(kind) + "'");
}

/// Upper-arm phases for the two settings.
struct PhaseSetting {
  double phi1_plus = 0.0;
  double phi1_minus = -std::numbers::pi / 2;

  /// Setting with phi1(+1) = 0 and phi1(-1) = delta.
  static PhaseSetting from_delta(double delta) { return {0.0, delta}; }

  /// phi1(-1) - phi1(+1), reduced to (-pi, pi].
  [[nodiscard]] double delta() const noexcept {
    double d = std::remainder(phi1_minus - phi1_plus, 2.0 * std::numbers::pi);
    if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
    return d;
  }
};

[[nodiscard]] inline double phase_for(const PhaseSetting& p, Setting x) noexcept {
  return x == Setting::kPlus ? p.phi1_plus : p.phi1_minus;
}

}  // namespace mzi
