#pragma once

#include <cmath>
#include <numbers>

namespace mzi {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2pi).
[[nodiscard]] inline double wrap_phase(double phi) noexcept {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Position of the photon's clock hand, (cos wt, sin wt).
struct Message {
  double e0 = 1.0;
  double e1 = 0.0;

  [[nodiscard]] double norm_sq() const noexcept { return e0 * e0 + e1 * e1; }

  friend bool operator==(const Message&, const Message&) = default;
};

/// Precomputed rotation by a fixed phase. The event loop applies the same arm
/// phase millions of times, so the trigonometry is hoisted out of it.
struct Rotation {
  double c = 1.0;
  double s = 0.0;

  Rotation() = default;
  explicit Rotation(double phi) noexcept {
    const double reduced = wrap_phase(phi);
    c = std::cos(reduced);
    s = std::sin(reduced);
  }
};

[[nodiscard]] inline Message rotate_message(const Message& msg, const Rotation& rot) noexcept {
  return {msg.e0 * rot.c - msg.e1 * rot.s, msg.e0 * rot.s + msg.e1 * rot.c};
}

/// Advances the clock hand by phi radians.
[[nodiscard]] inline Message rotate_message(const Message& msg, double phi) noexcept {
  return rotate_message(msg, Rotation(phi));
}

}  // namespace mzi
