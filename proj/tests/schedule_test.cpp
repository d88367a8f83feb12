#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mzi/schedule.hpp"

namespace {

using mzi::Setting;
using mzi::SettingSchedule;
using mzi::x_at;

TEST(Schedule, SystematicAlternatesEveryPhoton) {
  const auto s = SettingSchedule::systematic(1);
  EXPECT_EQ(x_at(s, 1), Setting::kPlus);
  EXPECT_EQ(x_at(s, 2), Setting::kMinus);
  EXPECT_EQ(x_at(s, 3), Setting::kPlus);
  EXPECT_EQ(x_at(s, 4), Setting::kMinus);
}

TEST(Schedule, SystematicBlockBoundary) {
  const auto s = SettingSchedule::systematic(10);
  EXPECT_EQ(x_at(s, 10), Setting::kPlus);
  EXPECT_EQ(x_at(s, 11), Setting::kMinus);
  EXPECT_EQ(x_at(s, 21), Setting::kPlus);
}

TEST(Schedule, FixedIsConstant) {
  const auto s = SettingSchedule::fixed(Setting::kPlus);
  for (std::uint64_t i : {1ULL, 2ULL, 999ULL, 123456789ULL}) EXPECT_EQ(x_at(s, i), Setting::kPlus);
  EXPECT_EQ(x_at(SettingSchedule::fixed(Setting::kMinus), 5), Setting::kMinus);
}

TEST(Schedule, IndexZeroIsRejected) {
  EXPECT_THROW((void)x_at(SettingSchedule::systematic(1), 0), mzi::input_error);
  EXPECT_THROW((void)SettingSchedule::systematic(0), mzi::input_error);
  EXPECT_THROW((void)SettingSchedule::random(0, 1), mzi::input_error);
}

TEST(Schedule, SystematicBalanceOverAnyWindow) {
  for (std::uint64_t k : {1ULL, 3ULL, 10ULL}) {
    const auto s = SettingSchedule::systematic(k);
    for (std::uint64_t start = 1; start < 5 * k; ++start) {
      std::uint64_t plus = 0;
      for (std::uint64_t i = start; i < start + 2 * k; ++i) plus += x_at(s, i) == Setting::kPlus;
      ASSERT_EQ(plus, k) << "K=" << k << " start=" << start;
    }
  }
}

TEST(Schedule, BlocksAreConstant) {
  for (const auto& s : {SettingSchedule::systematic(7), SettingSchedule::random(7, 99)}) {
    for (std::uint64_t b = 0; b < 200; ++b) {
      const Setting first = x_at(s, b * 7 + 1);
      for (std::uint64_t i = b * 7 + 2; i <= b * 7 + 7; ++i) ASSERT_EQ(x_at(s, i), first);
    }
  }
}

TEST(Schedule, RandomStartsAtPlusAndIsPure) {
  const auto s = SettingSchedule::random(3, 1234);
  EXPECT_EQ(x_at(s, 1), Setting::kPlus);
  // Order of evaluation does not matter.
  const Setting late = x_at(s, 3001);
  for (std::uint64_t i = 1; i < 100; ++i) (void)x_at(s, i);
  EXPECT_EQ(x_at(s, 3001), late);
  EXPECT_EQ(x_at(SettingSchedule::random(3, 1234), 3001), late);
}

TEST(Schedule, RandomFrequencyIsBalanced) {
  for (std::uint64_t k : {1ULL, 5ULL}) {
    const auto s = SettingSchedule::random(k, 5);
    mzi::ScheduleCursor cursor(s);
    constexpr std::uint64_t kN = 200000;
    std::uint64_t plus = 0;
    for (std::uint64_t i = 0; i < kN; ++i) plus += cursor.next() == Setting::kPlus;
    const double f = static_cast<double>(plus) / kN;
    EXPECT_NEAR(f, 0.5, 3.0 * std::sqrt(2.0 * static_cast<double>(k) / kN)) << "K=" << k;
  }
}

TEST(Schedule, RandomFlipsAboutHalfTheBoundaries) {
  mzi::ScheduleCursor cursor(SettingSchedule::random(1, 8));
  int flips = 0;
  constexpr int kN = 100000;
  Setting prev = cursor.next();
  for (int i = 1; i < kN; ++i) {
    const Setting x = cursor.next();
    flips += x != prev ? 1 : 0;
    prev = x;
  }
  EXPECT_NEAR(static_cast<double>(flips) / (kN - 1), 0.5, 0.01);
}

TEST(Schedule, CursorMatchesPureFunction) {
  for (const auto& s : {SettingSchedule::fixed(Setting::kMinus), SettingSchedule::systematic(4),
                        SettingSchedule::random(1, 3), SettingSchedule::random(6, 4)}) {
    mzi::ScheduleCursor cursor(s);
    for (std::uint64_t i = 1; i <= 2000; ++i) ASSERT_EQ(cursor.next(), x_at(s, i)) << i;
  }
}

TEST(Schedule, TextRoundTrip) {
  for (const char* text : {"fixed:+1", "fixed:-1", "systematic:1", "systematic:10", "random:5"}) {
    EXPECT_EQ(mzi::to_string(mzi::parse_schedule(text)), text);
  }
  for (const char* bad : {"fixed", "fixed:0", "systematic:0", "systematic:-2", "random:x", "sometimes:3"}) {
    EXPECT_THROW((void)mzi::parse_schedule(bad), mzi::input_error) << bad;
  }
}

TEST(PhaseSetting, Defaults) {
  const mzi::PhaseSetting p;
  EXPECT_EQ(mzi::phase_for(p, Setting::kPlus), 0.0);
  EXPECT_DOUBLE_EQ(mzi::phase_for(p, Setting::kMinus), -std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(p.delta(), -std::numbers::pi / 2);
}

TEST(PhaseSetting, GeneralDelta) {
  const auto p = mzi::PhaseSetting::from_delta(1.1);
  EXPECT_DOUBLE_EQ(mzi::phase_for(p, Setting::kMinus), 1.1);
  EXPECT_DOUBLE_EQ(p.delta(), 1.1);
  const mzi::PhaseSetting shifted{0.5, 0.5 + 3.0 * std::numbers::pi / 2};
  EXPECT_NEAR(shifted.delta(), -std::numbers::pi / 2, 1e-15);
}

}  // namespace
