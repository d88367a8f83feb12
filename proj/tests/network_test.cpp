#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mzi/network.hpp"
#include "mzi/rng.hpp"

namespace {

using mzi::MziNetwork;
using mzi::PhaseSetting;
using mzi::Setting;

double d0_fraction(double phi0, double phi1, std::uint64_t n, std::uint64_t seed) {
  MziNetwork net(phi0, PhaseSetting{phi1, phi1}, 0.99);
  mzi::RandomStream rng(seed);
  std::uint64_t d0 = 0;
  for (std::uint64_t i = 0; i < n; ++i) d0 += net.run_photon(Setting::kPlus, rng).detector == 0;
  return static_cast<double>(d0) / static_cast<double>(n);
}

TEST(Network, DefaultReset) {
  MziNetwork net(0.4, {}, 0.99);
  for (const auto* s : {&net.first_splitter(), &net.second_splitter()}) {
    EXPECT_EQ(s->u0, 0.5);
    EXPECT_EQ(s->u1, 0.5);
    EXPECT_EQ(s->y0, (mzi::Message{1.0, 0.0}));
    EXPECT_EQ(s->y1, (mzi::Message{1.0, 0.0}));
  }
}

TEST(Network, RandomResetIsSeededAndValid) {
  MziNetwork a(0.4, {}, 0.99, mzi::InitPolicy::random(42));
  MziNetwork b(0.4, {}, 0.99, mzi::InitPolicy::random(42));
  MziNetwork c(0.4, {}, 0.99, mzi::InitPolicy::random(43));
  EXPECT_EQ(a.first_splitter().y0, b.first_splitter().y0);
  EXPECT_EQ(a.second_splitter().y1, b.second_splitter().y1);
  EXPECT_NE(a.first_splitter().y0, c.first_splitter().y0);
  for (const auto* s : {&a.first_splitter(), &a.second_splitter()}) {
    EXPECT_NEAR(s->y0.norm_sq(), 1.0, 1e-12);
    EXPECT_NEAR(s->y1.norm_sq(), 1.0, 1e-12);
    EXPECT_EQ(s->u0, 0.5);
    EXPECT_EQ(s->u1, 0.5);
  }
}

TEST(Network, ResetRestoresInitialState) {
  MziNetwork net(1.0, {}, 0.9);
  mzi::RandomStream rng(1);
  for (int i = 0; i < 100; ++i) (void)net.run_photon(Setting::kMinus, rng);
  EXPECT_EQ(net.emitted(), 100u);
  mzi::reset_network(net);
  EXPECT_EQ(net.emitted(), 0u);
  EXPECT_EQ(net.second_splitter().u0, 0.5);
  EXPECT_EQ(net.second_splitter().y1, (mzi::Message{1.0, 0.0}));
}

TEST(Network, RejectsAlphaOutsideUnitInterval) {
  EXPECT_THROW(MziNetwork(0.0, {}, 1.0), mzi::input_error);
  EXPECT_THROW(MziNetwork(0.0, {}, 0.0), mzi::input_error);
}

TEST(Network, OneEventPerPhotonWithIncreasingIndex) {
  MziNetwork net(0.7, {}, 0.99);
  mzi::RandomStream rng(2);
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    const Setting x = i % 3 == 0 ? Setting::kMinus : Setting::kPlus;
    const auto e = mzi::run_photon(net, x, rng);
    ASSERT_EQ(e.index, i);
    ASSERT_EQ(e.x, x);
    ASSERT_TRUE(e.detector == 0 || e.detector == 1);
  }
}

TEST(Network, SplitterInvariantsHoldDuringRun) {
  MziNetwork net(2.1, {}, 0.9, mzi::InitPolicy::random(9));
  mzi::RandomStream rng(3);
  for (int i = 0; i < 20000; ++i) {
    (void)net.run_photon(i % 2 == 0 ? Setting::kPlus : Setting::kMinus, rng);
    for (const auto* s : {&net.first_splitter(), &net.second_splitter()}) {
      ASSERT_NEAR(s->u0 + s->u1, 1.0, 1e-12);
      ASSERT_NEAR(s->y0.norm_sq(), 1.0, 1e-12);
      ASSERT_NEAR(s->y1.norm_sq(), 1.0, 1e-12);
    }
  }
}

TEST(Network, IdenticalSeedsGiveIdenticalEvents) {
  const auto run = [](std::uint64_t seed) {
    MziNetwork net(1.3, {}, 0.99);
    mzi::RandomStream rng(seed);
    std::vector<mzi::DetectionEvent> out;
    for (int i = 0; i < 5000; ++i) out.push_back(net.run_photon(i % 2 ? Setting::kMinus : Setting::kPlus, rng));
    return out;
  };
  EXPECT_EQ(run(77), run(77));
  EXPECT_NE(run(77), run(78));
}

// Stationary D0 frequency follows sin^2((phi0 - phi1) / 2).
TEST(Network, ZeroPhaseDifferenceSendsEverythingToD1) {
  EXPECT_NEAR(d0_fraction(0.0, 0.0, 1'000'000, 21), 0.0, 0.005);
}

TEST(Network, HalfTurnSendsEverythingToD0) {
  EXPECT_NEAR(d0_fraction(std::numbers::pi, 0.0, 1'000'000, 22), 1.0, 0.005);
}

TEST(Network, QuarterTurnSplitsEvenly) {
  EXPECT_NEAR(d0_fraction(std::numbers::pi / 2, 0.0, 1'000'000, 23), 0.5, 0.005);
}

TEST(Network, StationaryInterferenceOverGrid) {
  double sq = 0.0;
  for (int j = 0; j < 32; ++j) {
    const double phi0 = mzi::kTwoPi * j / 32.0;
    const double s = std::sin(phi0 / 2.0);
    const double f = d0_fraction(phi0, 0.0, 100'000, 100 + j);
    sq += (f - s * s) * (f - s * s);
  }
  EXPECT_LE(std::sqrt(sq / 32.0), 0.01);
}

}  // namespace
