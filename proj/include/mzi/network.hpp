#pragma once

#include <cmath>
#include <cstdint>

#include "mzi/beam_splitter.hpp"
#include "mzi/message.hpp"
#include "mzi/rng.hpp"
#include "mzi/schedule.hpp"

namespace mzi {

struct DetectionEvent {
  std::uint64_t index = 0;
  Setting x = Setting::kPlus;
  int detector = 0;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// How beam-splitter state is set before a run.
struct InitPolicy {
  enum class Kind { kDefault, kRandom };
  Kind kind = Kind::kDefault;
  std::uint64_t seed = 0;

  static InitPolicy standard() { return {}; }
  static InitPolicy random(std::uint64_t seed) { return {Kind::kRandom, seed}; }
};

/// Source, two beam splitters and the two arms. BS1 output 0 feeds the lower
/// arm (phase phi0) into BS2 input 0; BS1 output 1 feeds the upper arm
/// (phase phi1(x)) into BS2 input 1. Mirrors only redirect and are omitted.
class MziNetwork {
 public:
  MziNetwork(double phi0, PhaseSetting phases, double alpha, InitPolicy init = {})
      : phi0_(phi0), phases_(phases), alpha_(alpha), lower_(phi0),
        upper_plus_(phases.phi1_plus), upper_minus_(phases.phi1_minus) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    reset(init);
  }

  void reset(InitPolicy init = {}) {
    if (init.kind == InitPolicy::Kind::kDefault) {
      bs1_ = BeamSplitterState{{1.0, 0.0}, {1.0, 0.0}, 0.5, 0.5, alpha_};
      bs2_ = bs1_;
    } else {
      RandomStream rng(init.seed);
      const auto random_unit = [&rng] {
        const double angle = rng.uniform() * kTwoPi;
        return Message{std::cos(angle), std::sin(angle)};
      };
      bs1_ = BeamSplitterState{random_unit(), random_unit(), 0.5, 0.5, alpha_};
      bs2_ = BeamSplitterState{random_unit(), random_unit(), 0.5, 0.5, alpha_};
    }
    emitted_ = 0;
  }

  /// Sends one photon through the interferometer with the setting x fixed
  /// for the whole passage. Both splitters keep their state afterwards.
  template <class Rng>
  DetectionEvent run_photon(Setting x, Rng& rng) {
    // The source resets the clock of every messenger it creates.
    const Message emitted{1.0, 0.0};
    const SplitterOutput first = bs_process(bs1_, 0, emitted, rng.uniform());
    const Rotation& arm =
        first.channel == 0 ? lower_ : (x == Setting::kPlus ? upper_plus_ : upper_minus_);
    const Message travelled = rotate_message(first.message, arm);
    const SplitterOutput second = bs_process(bs2_, first.channel, travelled, rng.uniform());
    return {++emitted_, x, second.channel};
  }

  [[nodiscard]] const BeamSplitterState& first_splitter() const noexcept { return bs1_; }
  [[nodiscard]] const BeamSplitterState& second_splitter() const noexcept { return bs2_; }
  [[nodiscard]] double phi0() const noexcept { return phi0_; }
  [[nodiscard]] const PhaseSetting& phases() const noexcept { return phases_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::uint64_t emitted() const noexcept { return emitted_; }

 private:
  double phi0_;
  PhaseSetting phases_;
  double alpha_;
  Rotation lower_;
  Rotation upper_plus_;
  Rotation upper_minus_;
  BeamSplitterState bs1_;
  BeamSplitterState bs2_;
  std::uint64_t emitted_ = 0;
};

inline void reset_network(MziNetwork& net, InitPolicy init = {}) { net.reset(init); }

template <class Rng>
DetectionEvent run_photon(MziNetwork& net, Setting x, Rng& rng) {
  return net.run_photon(x, rng);
}

}  // namespace mzi
