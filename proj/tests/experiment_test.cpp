#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mzi/experiment.hpp"
#include "mzi/theory.hpp"

namespace {

using mzi::ExperimentConfig;
using mzi::Setting;
using mzi::SettingSchedule;
constexpr double kPi = std::numbers::pi;

ExperimentConfig small(std::uint64_t photons = 20000) {
  ExperimentConfig c;
  c.photons = photons;
  c.grid.points = 8;
  c.seed = 5;
  return c;
}

TEST(PhaseGrid, DefaultIsHalfOpenTurn) {
  const mzi::PhaseGrid g;
  EXPECT_EQ(g.points, 32u);
  EXPECT_EQ(g.at(0), 0.0);
  EXPECT_NEAR(g.at(31), 2 * kPi * 31 / 32, 1e-15);
}

TEST(Config, Validation) {
  auto c = small();
  c.grid.points = 3;
  EXPECT_THROW(c.validate(), mzi::input_error);
  c = small();
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), mzi::input_error);
  c = small();
  c.photons = 0;
  EXPECT_THROW(c.validate(), mzi::input_error);
  c = small();
  c.stages = mzi::StagePlan{};
  c.stages->order = {0, 0, 2};
  EXPECT_THROW(c.validate(), mzi::input_error);
}

TEST(Sweep, CountsEveryPhoton) {
  auto c = small(5000);
  c.schedule = SettingSchedule::systematic(3);
  const auto r = mzi::run_sweep(c);
  ASSERT_EQ(r.rows.size(), 8u);
  EXPECT_EQ(r.mode, "systematic:3");
  for (std::size_t j = 0; j < r.rows.size(); ++j) {
    EXPECT_EQ(r.rows[j].counts.total(), 5000u);
    EXPECT_DOUBLE_EQ(r.rows[j].phi0, c.grid.at(j));
    // 5000 = 833 blocks of 3 + 1 photon; +1 blocks come first.
    EXPECT_EQ(r.rows[j].counts.plus(), 2501u);
  }
}

TEST(Sweep, Deterministic) {
  auto c = small();
  c.schedule = SettingSchedule::random(2, 0);
  const auto a = mzi::run_sweep(c);
  const auto b = mzi::run_sweep(c);
  for (std::size_t j = 0; j < a.rows.size(); ++j) EXPECT_EQ(a.rows[j].counts, b.rows[j].counts);
  c.seed = 6;
  const auto d = mzi::run_sweep(c);
  bool differs = false;
  for (std::size_t j = 0; j < a.rows.size(); ++j) differs = differs || !(a.rows[j].counts == d.rows[j].counts);
  EXPECT_TRUE(differs);
}

TEST(Sweep, FixedPlusFollowsFringe) {
  const auto r = mzi::run_sweep(small(100000));
  for (const auto& p : r.rows) {
    EXPECT_NEAR(p.f0_plus, mzi::theory::qt_fixed(p.phi0, Setting::kPlus), 0.01) << p.phi0;
    EXPECT_TRUE(std::isnan(p.f0_minus));
  }
}

TEST(Sweep, RandomInitConvergesToSameStationaryFringe) {
  auto c = small(100000);
  c.init = mzi::InitPolicy::Kind::kRandom;
  const auto r = mzi::run_sweep(c);
  for (const auto& p : r.rows) {
    EXPECT_NEAR(p.f0_plus, mzi::theory::qt_fixed(p.phi0, Setting::kPlus), 0.01) << p.phi0;
  }
}

class CountingSink final : public mzi::EventSink {
 public:
  void begin_segment(double, int stage, const SettingSchedule&) override { stages.push_back(stage); }
  void event(const mzi::DetectionEvent& e) override {
    ++events;
    last_index = e.index;
  }
  std::vector<int> stages;
  std::uint64_t events = 0;
  std::uint64_t last_index = 0;
};

TEST(Stages, ExecutesInConfiguredOrderWithoutReset) {
  auto c = small(1000);
  c.stages = mzi::StagePlan{};
  c.stages->order = {2, 0, 1};
  CountingSink sink;
  const auto r = mzi::run_stages(c, &sink);
  EXPECT_EQ(sink.events, 3u * 1000u * 8u);
  // Emission index keeps running across the three stages of a point.
  EXPECT_EQ(sink.last_index, 3000u);
  ASSERT_EQ(sink.stages.size(), 24u);
  EXPECT_EQ((std::vector<int>(sink.stages.begin(), sink.stages.begin() + 3)), (std::vector<int>{3, 1, 2}));
  for (int role = 0; role < 3; ++role) ASSERT_EQ(r.rows[role].size(), 8u);
  EXPECT_EQ(r.rows[0][0].counts.plus(), 0u);
  EXPECT_EQ(r.rows[1][0].counts.minus(), 0u);
  EXPECT_EQ(r.rows[2][0].counts.plus(), 500u);
}

TEST(Stages, StateCarriesOverBetweenStages) {
  // Reproduce the first point by hand on one network.
  auto c = small(300);
  c.stages = mzi::StagePlan{};
  const auto r = mzi::run_stages(c);

  mzi::MziNetwork net(c.grid.at(0), c.phases(), c.alpha);
  for (int role = 0; role < 3; ++role) {
    mzi::RandomStream rng(mzi::derive_seed(c.seed, 0, role + 1));
    mzi::ScheduleCursor cursor(c.stages->segments[role]);
    mzi::DetectionTally t;
    for (int n = 0; n < 300; ++n) t.add(net.run_photon(cursor.next(), rng));
    EXPECT_EQ(t, r.rows[role][0].counts) << "role " << role;
  }
}

TEST(Stages, RequiresPlan) {
  EXPECT_THROW((void)mzi::run_stages(small()), mzi::input_error);
}

TEST(Stages, ColumnForRole) {
  EXPECT_EQ(mzi::stage_column(SettingSchedule::fixed(Setting::kMinus)), mzi::FrequencyColumn::kMinus);
  EXPECT_EQ(mzi::stage_column(SettingSchedule::fixed(Setting::kPlus)), mzi::FrequencyColumn::kPlus);
  EXPECT_EQ(mzi::stage_column(SettingSchedule::systematic(1)), mzi::FrequencyColumn::kPlus);
}

TEST(ExpectedRate, BySchedule) {
  EXPECT_EQ(mzi::expected_E(SettingSchedule::fixed(Setting::kPlus)), 0.0);
  EXPECT_EQ(mzi::expected_E(SettingSchedule::systematic(1)), 0.333);
  EXPECT_FALSE(mzi::expected_E(SettingSchedule::systematic(3)).has_value());
  EXPECT_EQ(mzi::expected_E(SettingSchedule::random(1, 0)), 0.25);
}

}  // namespace
