#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "transitheat/csv.hpp"

// Apparent temperature per the National Weather Service heat-index and
// wind-chill procedures. All units are degF, percent RH, and mph.
namespace transitheat::thermal {

struct WeatherSample {
  double air_temp_f = 0.0;
  double rel_humidity_pct = 0.0;  // 0..100
  double wind_mph = 0.0;          // >= 0
};

// Steadman simple formula, already averaged with the air temperature.
// Its value decides whether the full regression applies.
inline double heat_index_simple_f(double t_f, double rh_pct) {
  return 0.5 * (t_f + 61.0 + (t_f - 68.0) * 1.2 + rh_pct * 0.094);
}

inline bool heat_index_active(double t_f, double rh_pct) {
  return heat_index_simple_f(t_f, rh_pct) >= 80.0;
}

inline double heat_index_f(double t_f, double rh_pct) {
  const double simple = heat_index_simple_f(t_f, rh_pct);
  if (simple < 80.0) return simple;
  double hi = -42.379 + 2.04901523 * t_f + 10.14333127 * rh_pct -
              0.22475541 * t_f * rh_pct - 0.00683783 * t_f * t_f -
              0.05481717 * rh_pct * rh_pct + 0.00122874 * t_f * t_f * rh_pct +
              0.00085282 * t_f * rh_pct * rh_pct -
              0.00000199 * t_f * t_f * rh_pct * rh_pct;
  if (rh_pct < 13.0 && t_f >= 80.0 && t_f <= 112.0) {
    hi -= ((13.0 - rh_pct) / 4.0) * std::sqrt((17.0 - std::fabs(t_f - 95.0)) / 17.0);
  } else if (rh_pct > 85.0 && t_f >= 80.0 && t_f <= 87.0) {
    hi += ((rh_pct - 85.0) / 10.0) * ((87.0 - t_f) / 5.0);
  }
  return hi;
}

inline bool wind_chill_active(double t_f, double wind_mph) {
  return t_f <= 50.0 && wind_mph > 3.0;
}

inline double wind_chill_f(double t_f, double wind_mph) {
  if (!wind_chill_active(t_f, wind_mph)) return t_f;
  const double v16 = std::pow(wind_mph, 0.16);
  return 35.74 + 0.6215 * t_f - 35.75 * v16 + 0.4275 * t_f * v16;
}

enum class Branch { heat_index, wind_chill, air_temp };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::heat_index: return "heat_index";
    case Branch::wind_chill: return "wind_chill";
    default: return "air_temp";
  }
}

struct ApparentTemp {
  double value_f = 0.0;
  Branch branch = Branch::air_temp;
};

// The two activation rules cannot overlap: wind chill needs T <= 50 degF,
// where the Steadman average stays well below 80 degF.
inline ApparentTemp apparent_temperature(const WeatherSample& s) {
  if (heat_index_active(s.air_temp_f, s.rel_humidity_pct))
    return {heat_index_f(s.air_temp_f, s.rel_humidity_pct), Branch::heat_index};
  if (wind_chill_active(s.air_temp_f, s.wind_mph))
    return {wind_chill_f(s.air_temp_f, s.wind_mph), Branch::wind_chill};
  return {s.air_temp_f, Branch::air_temp};
}

enum class ComfortBand { safe, caution, extreme_caution, danger, extreme_danger, cold_risk };

inline const char* comfort_name(ComfortBand b) {
  switch (b) {
    case ComfortBand::safe: return "safe";
    case ComfortBand::caution: return "caution";
    case ComfortBand::extreme_caution: return "extreme_caution";
    case ComfortBand::danger: return "danger";
    case ComfortBand::extreme_danger: return "extreme_danger";
    default: return "cold_risk";
  }
}

// Band edges are configuration, defaults from the NWS heat-index categories.
struct BandConfig {
  double caution_f = 80.0;
  double extreme_caution_f = 90.0;
  double danger_f = 103.0;
  double extreme_danger_f = 125.0;
  double cold_risk_below_f = -18.0;

  static BandConfig from_file(const std::filesystem::path& path) {
    BandConfig c;
    auto kv = csv::parse_kv_file(path);
    auto take = [&](const char* key, double& out) {
      auto it = kv.find(key);
      if (it != kv.end()) out = std::stod(it->second);
    };
    take("caution_f", c.caution_f);
    take("extreme_caution_f", c.extreme_caution_f);
    take("danger_f", c.danger_f);
    take("extreme_danger_f", c.extreme_danger_f);
    take("cold_risk_below_f", c.cold_risk_below_f);
    if (!(c.caution_f <= c.extreme_caution_f && c.extreme_caution_f <= c.danger_f &&
          c.danger_f <= c.extreme_danger_f))
      throw InputError(path.string() + ": comfort band edges must be non-decreasing");
    return c;
  }
};

inline ComfortBand comfort_class(const ApparentTemp& a, const BandConfig& cfg = {}) {
  if (a.branch == Branch::wind_chill && a.value_f < cfg.cold_risk_below_f)
    return ComfortBand::cold_risk;
  if (a.value_f >= cfg.extreme_danger_f) return ComfortBand::extreme_danger;
  if (a.value_f >= cfg.danger_f) return ComfortBand::danger;
  if (a.value_f >= cfg.extreme_caution_f) return ComfortBand::extreme_caution;
  if (a.value_f >= cfg.caution_f) return ComfortBand::caution;
  return ComfortBand::safe;
}

}  // namespace transitheat::thermal
