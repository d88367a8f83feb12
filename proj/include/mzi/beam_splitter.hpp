#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "mzi/error.hpp"
#include "mzi/message.hpp"

namespace mzi {

/// Internal state of one beam-splitter processor: the last message seen on
/// each input channel and the learned arrival-frequency estimate u.
struct BeamSplitterState {
  Message y0;
  Message y1;
  double u0 = 0.5;
  double u1 = 0.5;
  double alpha = 0.99;
};

/// Candidate output messages before routing. |w|^2 is the probability of
/// leaving through channel 0.
struct SplitterAmplitudes {
  Message w;
  Message z;
};

struct SplitterOutput {
  int channel = 0;
  Message message;
};

inline constexpr double kIntegrityTolerance = 1e-9;

/// Transformation stage: combines both registers weighted by sqrt(u).
/// Written in terms of components, register 0 holds (Y00, Y10) and
/// register 1 holds (Y01, Y11).
[[nodiscard]] inline SplitterAmplitudes transform(const BeamSplitterState& s) noexcept {
  const double r0 = std::sqrt(s.u0);
  const double r1 = std::sqrt(s.u1);
  const double a00 = s.y0.e0 * r0;  // Y00 sqrt(u0)
  const double a10 = s.y0.e1 * r0;  // Y10 sqrt(u0)
  const double a01 = s.y1.e0 * r1;  // Y01 sqrt(u1)
  const double a11 = s.y1.e1 * r1;  // Y11 sqrt(u1)
  constexpr double k = 1.0 / std::numbers::sqrt2;
  return {{k * (a00 - a11), k * (a01 + a10)}, {k * (a01 - a10), k * (a00 + a11)}};
}

/// Input stage learning rule for an arrival on `channel`.
inline void learn(BeamSplitterState& s, int channel) noexcept {
  const double gain = 1.0 - s.alpha;
  s.u0 = s.alpha * s.u0 + (channel == 0 ? gain : 0.0);
  s.u1 = s.alpha * s.u1 + (channel == 1 ? gain : 0.0);
  // A channel that never receives traffic decays into subnormals, which are
  // orders of magnitude slower to compute with. Flush them to zero.
  constexpr double kSmallest = std::numeric_limits<double>::min();
  if (s.u0 < kSmallest) s.u0 = 0.0;
  if (s.u1 < kSmallest) s.u1 = 0.0;
}

/// Processes one messenger arriving on `in_channel` with uniform variate r.
///
/// The arriving message overwrites its register and updates u before the
/// transformation, so the routing always uses post-update state. Routing to
/// channel 0 requires |w|^2 > r strictly. The outgoing message is w or z
/// rescaled to unit length.
inline SplitterOutput bs_process(BeamSplitterState& s, int in_channel, const Message& msg, double r) {
  (in_channel == 0 ? s.y0 : s.y1) = msg;
  learn(s, in_channel);

  const auto [w, z] = transform(s);
  const double ww = w.norm_sq();
  const double zz = z.norm_sq();
  if (std::abs(ww + zz - 1.0) > kIntegrityTolerance) {
    throw model_integrity_error("beam splitter output probabilities sum to " +
                                std::to_string(ww + zz));
  }
  if (ww > r) {
    const double n = std::sqrt(ww);
    return {0, {w.e0 / n, w.e1 / n}};
  }
  const double n = std::sqrt(zz);
  return {1, {z.e0 / n, z.e1 / n}};
}

}  // namespace mzi
