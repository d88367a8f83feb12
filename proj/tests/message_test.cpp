#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mzi/message.hpp"
#include "mzi/rng.hpp"

namespace {

using mzi::Message;
using mzi::rotate_message;

TEST(RotateMessage, ZeroPhaseIsIdentity) {
  const Message m = rotate_message({1.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(m.e0, 1.0);
  EXPECT_DOUBLE_EQ(m.e1, 0.0);
}

TEST(RotateMessage, QuarterTurn) {
  const Message m = rotate_message({1.0, 0.0}, std::numbers::pi / 2);
  EXPECT_NEAR(m.e0, 0.0, 1e-15);
  EXPECT_NEAR(m.e1, 1.0, 1e-15);
}

TEST(RotateMessage, AnglesAdd) {
  const Message m = rotate_message({std::cos(0.3), std::sin(0.3)}, 0.4);
  EXPECT_NEAR(m.e0, std::cos(0.7), 1e-15);
  EXPECT_NEAR(m.e1, std::sin(0.7), 1e-15);
}

TEST(RotateMessage, LargePhasesAreReduced) {
  const Message a = rotate_message({1.0, 0.0}, 0.25);
  const Message b = rotate_message({1.0, 0.0}, 0.25 + 1000.0 * mzi::kTwoPi);
  EXPECT_NEAR(a.e0, b.e0, 1e-11);
  EXPECT_NEAR(a.e1, b.e1, 1e-11);
}

TEST(RotateMessage, PreservesUnitNorm) {
  mzi::RandomStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double t = rng.uniform() * mzi::kTwoPi;
    const double phi = (rng.uniform() - 0.5) * 200.0;
    const Message m = rotate_message({std::cos(t), std::sin(t)}, phi);
    ASSERT_NEAR(m.norm_sq(), 1.0, 1e-12);
  }
}

TEST(WrapPhase, MapsIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(mzi::wrap_phase(0.0), 0.0);
  EXPECT_NEAR(mzi::wrap_phase(-std::numbers::pi / 2), 1.5 * std::numbers::pi, 1e-15);
  EXPECT_LT(mzi::wrap_phase(mzi::kTwoPi), mzi::kTwoPi);
  EXPECT_GE(mzi::wrap_phase(-1e-300), 0.0);
}

TEST(RandomStream, UniformInUnitInterval) {
  mzi::RandomStream rng(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(RandomStream, GoldenValues) {
  // mt19937_64 default-seed output is fixed by the standard.
  mzi::RandomStream rng(5489);
  EXPECT_EQ(rng.bits(), 14514284786278117030ULL);
  // Seed derivation is part of the reproducibility contract.
  EXPECT_EQ(mzi::mix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(mzi::derive_seed(1, 0, 0), mzi::derive_seed(1, 1, 0));
  EXPECT_NE(mzi::derive_seed(1, 0, 0), mzi::derive_seed(1, 0, 1));
  EXPECT_NE(mzi::derive_seed(1, 0, 0), mzi::derive_seed(1, 0, 0, mzi::StreamKind::kSchedule));
}

}  // namespace
