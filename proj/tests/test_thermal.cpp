#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"
#include "transitheat/thermal.hpp"

namespace th = transitheat;
using th::thermal::Branch;
using th::thermal::ComfortBand;

namespace {

// Independent chart oracle, transcribed separately from the published NWS
// procedure: the full regression with both humidity adjustments, rounded to
// whole degrees the way the printed chart is.
double chart_oracle_heat_index(double t, double rh) {
  const double t2 = t * t, r2 = rh * rh;
  double hi = -42.379 + 2.04901523 * t + 10.14333127 * rh - 0.22475541 * t * rh -
              6.83783e-3 * t2 - 5.481717e-2 * r2 + 1.22874e-3 * t2 * rh +
              8.5282e-4 * t * r2 - 1.99e-6 * t2 * r2;
  if (rh < 13.0 && t >= 80.0 && t <= 112.0)
    hi -= (13.0 - rh) * 0.25 * std::sqrt((17.0 - std::fabs(t - 95.0)) * (1.0 / 17.0));
  else if (rh > 85.0 && t >= 80.0 && t <= 87.0)
    hi += (rh - 85.0) * 0.1 * (87.0 - t) * 0.2;
  return std::round(hi);
}

double chart_oracle_wind_chill(double t, double v) {
  return std::round(35.74 + 0.6215 * t - 35.75 * std::pow(v, 0.16) +
                    0.4275 * t * std::pow(v, 0.16));
}

}  // namespace

TEST(HeatIndex, PublishedChartCells) {
  EXPECT_NEAR(th::thermal::heat_index_f(96, 65), 121.0, 1.0);
  EXPECT_NEAR(th::thermal::heat_index_f(90, 50), 94.6, 0.5);
}

TEST(HeatIndex, SimpleBranchBelowActivation) {
  // Steadman average below 80 -> regression not applied
  const double v = th::thermal::heat_index_f(70, 50);
  EXPECT_NEAR(v, 70.0, 1.0);
  EXPECT_FALSE(th::thermal::heat_index_active(70, 50));
  EXPECT_DOUBLE_EQ(v, th::thermal::heat_index_simple_f(70, 50));
}

TEST(HeatIndex, ChartConformance) {
  int cells = 0, within1 = 0;
  double worst = 0.0;
  for (int t = 80; t <= 110; t += 2)
    for (int rh = 40; rh <= 100; rh += 5) {
      ++cells;
      const double d = std::fabs(th::thermal::heat_index_f(t, rh) - chart_oracle_heat_index(t, rh));
      worst = std::max(worst, d);
      if (d <= 1.0) ++within1;
      EXPECT_LE(d, 2.0) << "cell " << t << "F/" << rh << "%";
    }
  EXPECT_GE(static_cast<double>(within1) / cells, 0.95) << "worst " << worst;
}

TEST(HeatIndex, MonotoneInTemperature) {
  for (int rh = 40; rh <= 100; rh += 5) {
    double prev = -1e9;
    for (double t = 80.0; t <= 110.0; t += 0.5) {
      const double v = th::thermal::heat_index_f(t, rh);
      EXPECT_GE(v, prev - 1e-9) << "t=" << t << " rh=" << rh;
      prev = v;
    }
  }
}

TEST(WindChill, PublishedChartCells) {
  EXPECT_NEAR(th::thermal::wind_chill_f(30, 20), 17.0, 1.0);
  EXPECT_NEAR(th::thermal::wind_chill_f(45, 10), 39.9, 0.5);
}

TEST(WindChill, OutsideApplicabilityReturnsAirTemp) {
  EXPECT_DOUBLE_EQ(th::thermal::wind_chill_f(50, 2), 50.0);
  EXPECT_DOUBLE_EQ(th::thermal::wind_chill_f(60, 30), 60.0);
}

TEST(WindChill, ChartConformance) {
  for (int t = -45; t <= 40; t += 5)
    for (int v = 5; v <= 60; v += 5)
      EXPECT_NEAR(th::thermal::wind_chill_f(t, v), chart_oracle_wind_chill(t, v), 1.0)
          << "cell " << t << "F/" << v << "mph";
}

TEST(WindChill, NeverWarmsAndMonotoneInWind) {
  for (int t = -45; t <= 50; t += 5) {
    double prev = 1e9;
    for (int v = 4; v <= 60; ++v) {
      const double w = th::thermal::wind_chill_f(t, v);
      EXPECT_LE(w, t + 1e-9);
      EXPECT_LE(w, prev + 1e-9);
      prev = w;
    }
  }
}

TEST(ApparentTemp, BranchSelection) {
  EXPECT_EQ(th::thermal::apparent_temperature({95, 60, 5}).branch, Branch::heat_index);
  EXPECT_EQ(th::thermal::apparent_temperature({40, 50, 15}).branch, Branch::wind_chill);
  const auto a = th::thermal::apparent_temperature({65, 50, 10});
  EXPECT_EQ(a.branch, Branch::air_temp);
  EXPECT_DOUBLE_EQ(a.value_f, 65.0);
}

TEST(ApparentTemp, BranchesExclusiveOverGrid) {
  for (double t = -20; t <= 110; t += 2.5)
    for (double rh = 0; rh <= 100; rh += 10)
      for (double v = 0; v <= 40; v += 8) {
        const bool hi = th::thermal::heat_index_active(t, rh);
        const bool wc = th::thermal::wind_chill_active(t, v);
        EXPECT_FALSE(hi && wc) << t << " " << rh << " " << v;
      }
}

TEST(ComfortClass, DefaultBands) {
  EXPECT_EQ(th::thermal::comfort_class({80.0, Branch::heat_index}), ComfortBand::caution);
  EXPECT_EQ(th::thermal::comfort_class({70.0, Branch::air_temp}), ComfortBand::safe);
  EXPECT_EQ(th::thermal::comfort_class({95.0, Branch::heat_index}),
            ComfortBand::extreme_caution);
  EXPECT_EQ(th::thermal::comfort_class({110.0, Branch::heat_index}), ComfortBand::danger);
  EXPECT_EQ(th::thermal::comfort_class({130.0, Branch::heat_index}),
            ComfortBand::extreme_danger);
  EXPECT_EQ(th::thermal::comfort_class({-20.0, Branch::wind_chill}), ComfortBand::cold_risk);
  // cold values on the air-temp branch are not cold risk
  EXPECT_EQ(th::thermal::comfort_class({-20.0, Branch::air_temp}), ComfortBand::safe);
}

TEST(ComfortClass, ConfigFile) {
  testfx::TempDir tmp("thermal");
  testfx::write_file(tmp.path() / "bands.cfg",
                     "caution_f = 75\nextreme_caution_f = 85\ndanger_f = 100\n"
                     "extreme_danger_f = 120\ncold_risk_below_f = -10\n");
  const auto cfg = th::thermal::BandConfig::from_file(tmp.path() / "bands.cfg");
  EXPECT_EQ(th::thermal::comfort_class({78.0, Branch::air_temp}, cfg), ComfortBand::caution);
  EXPECT_EQ(th::thermal::comfort_class({-12.0, Branch::wind_chill}, cfg),
            ComfortBand::cold_risk);
  testfx::write_file(tmp.path() / "bad.cfg", "caution_f = 90\nextreme_caution_f = 80\n");
  EXPECT_THROW(th::thermal::BandConfig::from_file(tmp.path() / "bad.cfg"), th::InputError);
}
