#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "transitheat/climate.hpp"

namespace th = transitheat;
using testfx::TempDir;
using testfx::write_file;
using th::climate::Scenario;

TEST(Climate, SummerWindowHas1104Hours) {
  TempDir tmp("wx");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 9, 15}, 90.0));
  const auto a = th::climate::load_baseline(tmp.path() / "w.csv");
  EXPECT_EQ(a.hours.size(), 1104u);  // 46 days x 24
  EXPECT_EQ(a.baseline_year(), 2019);
}

TEST(Climate, SingleGapFilledAtMidpoint) {
  TempDir tmp("wx");
  std::string csvtext = "timestamp,temp_f,rh_pct,wind_mph\n";
  csvtext += "2019-08-01T00:00:00,95,50,5\n";
  csvtext += "2019-08-01T02:00:00,97,60,7\n";  // 01:00 missing
  write_file(tmp.path() / "w.csv", csvtext);
  const auto a = th::climate::load_baseline(tmp.path() / "w.csv");
  ASSERT_EQ(a.hours.size(), 3u);
  EXPECT_DOUBLE_EQ(a.hours[1].temp_f, 96.0);
  EXPECT_DOUBLE_EQ(a.hours[1].rh_pct, 55.0);
  EXPECT_DOUBLE_EQ(a.hours[1].wind_mph, 6.0);
  EXPECT_EQ(a.gap_report.size(), 1u);
}

TEST(Climate, FiveHourGapFails) {
  TempDir tmp("wx");
  write_file(tmp.path() / "w.csv",
             "timestamp,temp_f,rh_pct,wind_mph\n2019-08-01T00:00:00,95,50,5\n"
             "2019-08-01T06:00:00,97,50,5\n");
  EXPECT_THROW(th::climate::load_baseline(tmp.path() / "w.csv"), th::InputError);
}

TEST(Climate, NonMonotoneTimestampsFail) {
  TempDir tmp("wx");
  write_file(tmp.path() / "w.csv",
             "timestamp,temp_f,rh_pct,wind_mph\n2019-08-01T02:00:00,95,50,5\n"
             "2019-08-01T01:00:00,97,50,5\n");
  EXPECT_THROW(th::climate::load_baseline(tmp.path() / "w.csv"), th::InputError);
}

TEST(Deltas, LoadValidateAndCount) {
  TempDir tmp("dl");
  std::string csvtext = "scenario,year,delta_f\n";
  for (int y = 2019; y <= 2100; ++y)
    for (const char* s : {"SSP245", "SSP370", "SSP585"})
      csvtext += std::string(s) + "," + std::to_string(y) + "," +
                 th::csv::format_double((y - 2019) * 0.1) + "\n";
  write_file(tmp.path() / "d.csv", csvtext);
  const auto t = th::climate::load_deltas(tmp.path() / "d.csv");
  size_t keys = 0;
  for (int y : t.years())
    for (auto s : th::climate::kAllScenarios)
      if (t.has(s, y)) ++keys;
  EXPECT_EQ(keys, 246u);  // 82 years x 3 scenarios
}

TEST(Deltas, DuplicateKeyFails) {
  TempDir tmp("dl");
  write_file(tmp.path() / "d.csv",
             "scenario,year,delta_f\nSSP245,2050,2.0\nSSP245,2050,3.0\n");
  EXPECT_THROW(th::climate::load_deltas(tmp.path() / "d.csv"), th::InputError);
}

TEST(Deltas, UnknownScenarioRejected) {
  TempDir tmp("dl");
  write_file(tmp.path() / "d.csv", "scenario,year,delta_f\nRCP85,2050,2.0\n");
  EXPECT_THROW(th::climate::load_deltas(tmp.path() / "d.csv"), th::InputError);
}

TEST(Deltas, CelsiusConversionFlag) {
  TempDir tmp("dl");
  write_file(tmp.path() / "d.csv", "scenario,year,delta_f\nSSP585,2100,5.0\n");
  const auto t = th::climate::load_deltas(tmp.path() / "d.csv", true);
  EXPECT_DOUBLE_EQ(t.delta_f(Scenario::ssp585, 2100, 8, 2019), 9.0);
}

TEST(Project, ZeroDeltaIsBitIdentical) {
  TempDir tmp("pj");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 3}, 91.5, 55, 6));
  write_file(tmp.path() / "d.csv", "scenario,year,delta_f\nSSP245,2019,0.0\n");
  const auto base = th::climate::load_baseline(tmp.path() / "w.csv");
  const auto deltas = th::climate::load_deltas(tmp.path() / "d.csv");
  const auto proj = th::climate::project(base, deltas, Scenario::ssp245, 2019);
  ASSERT_EQ(proj.hours.size(), base.hours.size());
  for (size_t i = 0; i < base.hours.size(); ++i) {
    EXPECT_EQ(proj.hours[i].ts, base.hours[i].ts);
    EXPECT_EQ(std::memcmp(&proj.hours[i].temp_f, &base.hours[i].temp_f, sizeof(double)), 0);
    EXPECT_DOUBLE_EQ(proj.hours[i].rh_pct, base.hours[i].rh_pct);
    EXPECT_DOUBLE_EQ(proj.hours[i].wind_mph, base.hours[i].wind_mph);
  }
}

TEST(Project, ShiftsTemperatureOnly) {
  TempDir tmp("pj");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 2}, 95.0, 60, 8));
  write_file(tmp.path() / "d.csv", "scenario,year,delta_f\nSSP370,2050,3.6\n");
  const auto base = th::climate::load_baseline(tmp.path() / "w.csv");
  const auto deltas = th::climate::load_deltas(tmp.path() / "d.csv");
  const auto proj = th::climate::project(base, deltas, Scenario::ssp370, 2050);
  EXPECT_DOUBLE_EQ(proj.hours[0].temp_f, 98.6);
  EXPECT_DOUBLE_EQ(proj.hours[0].rh_pct, 60.0);
  EXPECT_DOUBLE_EQ(proj.hours[0].wind_mph, 8.0);
  // timestamps relabelled to the target year, month-day-hour preserved
  const auto d = th::timeutil::civil_from_days(proj.hours[0].ts / 86400);
  EXPECT_EQ(d.year, 2050);
  EXPECT_EQ(d.month, 8);
  EXPECT_EQ(d.day, 1);
}

TEST(Project, MonthlyDeltasApplyPerMonth) {
  TempDir tmp("pj");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 30}, {2019, 9, 2}, 90.0));
  write_file(tmp.path() / "d.csv",
             "scenario,year,month,delta_f\nSSP585,2060,8,4.0\nSSP585,2060,9,5.0\n");
  const auto base = th::climate::load_baseline(tmp.path() / "w.csv");
  const auto deltas = th::climate::load_deltas(tmp.path() / "d.csv");
  const auto proj = th::climate::project(base, deltas, Scenario::ssp585, 2060);
  for (const auto& h : proj.hours) {
    const auto d = th::timeutil::civil_from_days(h.ts / 86400);
    EXPECT_DOUBLE_EQ(h.temp_f, d.month == 8 ? 94.0 : 95.0);
  }
}

TEST(Project, MissingDeltaFails) {
  TempDir tmp("pj");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 2}, 95.0));
  write_file(tmp.path() / "d.csv", "scenario,year,delta_f\nSSP245,2030,1.0\n");
  const auto base = th::climate::load_baseline(tmp.path() / "w.csv");
  const auto deltas = th::climate::load_deltas(tmp.path() / "d.csv");
  EXPECT_THROW(th::climate::project(base, deltas, Scenario::ssp245, 2031), th::InputError);
  // baseline year works without a row (implied zero)
  EXPECT_NO_THROW(th::climate::project(base, deltas, Scenario::ssp245, 2019));
}

TEST(Project, ScenarioDominanceIsPreserved) {
  TempDir tmp("pj");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 2}, 88.0));
  write_file(tmp.path() / "d.csv",
             "scenario,year,delta_f\nSSP245,2080,2.0\nSSP370,2080,4.0\nSSP585,2080,7.0\n");
  const auto base = th::climate::load_baseline(tmp.path() / "w.csv");
  const auto deltas = th::climate::load_deltas(tmp.path() / "d.csv");
  const auto lo = th::climate::project(base, deltas, Scenario::ssp245, 2080);
  const auto mid = th::climate::project(base, deltas, Scenario::ssp370, 2080);
  const auto hi = th::climate::project(base, deltas, Scenario::ssp585, 2080);
  for (size_t i = 0; i < base.hours.size(); ++i) {
    EXPECT_LE(lo.hours[i].temp_f, mid.hours[i].temp_f);
    EXPECT_LE(mid.hours[i].temp_f, hi.hours[i].temp_f);
  }
}

TEST(WeatherAt, FloorsToHourBin) {
  TempDir tmp("wa");
  std::string csvtext = "timestamp,temp_f,rh_pct,wind_mph\n";
  for (int h = 0; h < 24; ++h)
    csvtext += "2019-08-01T" + std::string(h < 10 ? "0" : "") + std::to_string(h) +
               ":00:00," + std::to_string(70 + h) + ",50,5\n";
  write_file(tmp.path() / "w.csv", csvtext);
  const auto a = th::climate::load_baseline(tmp.path() / "w.csv");
  const int64_t t = th::timeutil::parse_iso_timestamp("2019-08-01T14:00:00") + 37 * 60 + 22;
  EXPECT_DOUBLE_EQ(a.at(t, {33.75, -84.39}).air_temp_f, 84.0);  // the 14:00 record
}

TEST(WeatherAt, OutOfSpanFails) {
  TempDir tmp("wa");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 1}, 90.0));
  const auto a = th::climate::load_baseline(tmp.path() / "w.csv");
  EXPECT_THROW(a.at(a.start_ts() - 1, {33.75, -84.39}), th::InputError);
  EXPECT_THROW(a.at(a.end_ts() + 1, {33.75, -84.39}), th::InputError);
  EXPECT_NO_THROW(a.at(a.end_ts(), {33.75, -84.39}));
}

TEST(WeatherAt, GridOffsetAddsToTemperature) {
  TempDir tmp("wa");
  write_file(tmp.path() / "w.csv",
             testfx::constant_weather_csv({2019, 8, 1}, {2019, 8, 1}, 90.0));
  write_file(tmp.path() / "g.csv", "cell_i,cell_j,offset_f\n0,0,2.0\n");
  auto a = th::climate::load_baseline(tmp.path() / "w.csv");
  a.grid = th::climate::GridOffsets::from_csv(tmp.path() / "g.csv", 33.70, -84.40, 0.1);
  const int64_t t = a.start_ts() + 3600;
  EXPECT_DOUBLE_EQ(a.at(t, {33.75, -84.39}).air_temp_f, 92.0);   // inside cell (0,0)
  EXPECT_DOUBLE_EQ(a.at(t, {34.50, -84.39}).air_temp_f, 90.0);   // outside any cell
}
