#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "transitheat/csv.hpp"
#include "transitheat/geo.hpp"
#include "transitheat/thermal.hpp"
#include "transitheat/timeutil.hpp"

namespace transitheat::climate {

enum class Scenario { ssp245, ssp370, ssp585 };
inline constexpr std::array<Scenario, 3> kAllScenarios = {Scenario::ssp245, Scenario::ssp370,
                                                          Scenario::ssp585};

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ssp245: return "SSP245";
    case Scenario::ssp370: return "SSP370";
    default: return "SSP585";
  }
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "SSP245" || s == "ssp245") return Scenario::ssp245;
  if (s == "SSP370" || s == "ssp370") return Scenario::ssp370;
  if (s == "SSP585" || s == "ssp585") return Scenario::ssp585;
  throw InputError("unknown scenario '" + s + "' (expected SSP245, SSP370, or SSP585)");
}

struct HourRecord {
  int64_t ts = 0;  // epoch seconds, on the hour
  double temp_f = 0.0;
  double rh_pct = 0.0;
  double wind_mph = 0.0;
};

// Uniform lat/lon cells carrying additive temperature offsets (urban heat).
struct GridOffsets {
  double lat0 = 0.0, lon0 = 0.0, cell_deg = 0.01;
  std::unordered_map<uint64_t, double> cells;

  static uint64_t key(int32_t i, int32_t j) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(i)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(j));
  }

  double offset_at(const geo::LatLon& p) const {
    const int32_t i = static_cast<int32_t>(std::floor((p.lat - lat0) / cell_deg));
    const int32_t j = static_cast<int32_t>(std::floor((p.lon - lon0) / cell_deg));
    auto it = cells.find(key(i, j));
    return it == cells.end() ? 0.0 : it->second;
  }

  // lat0/lon0/cell_deg header keys then cell_i,cell_j,offset_f rows.
  static GridOffsets from_csv(const std::filesystem::path& path, double lat0, double lon0,
                              double cell_deg) {
    GridOffsets g;
    g.lat0 = lat0;
    g.lon0 = lon0;
    g.cell_deg = cell_deg;
    csv::Reader r(path);
    const int ci = r.require_col("cell_i");
    const int cj = r.require_col("cell_j");
    const int co = r.require_col("offset_f");
    std::vector<std::string> row;
    while (r.next(row))
      g.cells[key(static_cast<int32_t>(r.get_long(row, ci, "cell_i")),
                  static_cast<int32_t>(r.get_long(row, cj, "cell_j")))] =
          r.get_double(row, co, "offset_f");
    return g;
  }
};

struct WeatherArchive {
  std::vector<HourRecord> hours;  // contiguous, ascending, exactly 3600 s apart
  std::optional<GridOffsets> grid;
  std::vector<std::string> gap_report;

  int64_t start_ts() const { return hours.empty() ? 0 : hours.front().ts; }
  int64_t end_ts() const { return hours.empty() ? 0 : hours.back().ts + 3599; }
  int baseline_year() const {
    return hours.empty() ? 0 : timeutil::civil_from_days(hours.front().ts / 86400).year;
  }

  bool covers(int64_t t) const { return !hours.empty() && t >= start_ts() && t <= end_ts(); }

  // Floor-to-hour bin; adds the location's grid offset to temperature if configured.
  thermal::WeatherSample at(int64_t t, const geo::LatLon& pos) const {
    if (!covers(t))
      throw InputError("weather lookup at " + timeutil::format_iso_timestamp(t) +
                       " is outside the archive span " +
                       (hours.empty() ? "(empty archive)"
                                      : timeutil::format_iso_timestamp(start_ts()) + ".." +
                                            timeutil::format_iso_timestamp(end_ts())));
    const auto& h = hours[static_cast<size_t>((t - hours.front().ts) / 3600)];
    double temp = h.temp_f;
    if (grid) temp += grid->offset_at(pos);
    return {temp, h.rh_pct, h.wind_mph};
  }
};

// Hourly CSV: timestamp,temp_f,rh_pct,wind_mph. Gaps of at most 3 hours are
// filled by linear interpolation and noted in the gap report; larger gaps and
// non-monotone timestamps are errors.
inline WeatherArchive load_baseline(const std::filesystem::path& path) {
  WeatherArchive a;
  csv::Reader r(path);
  const int c_ts = r.require_col("timestamp");
  const int c_t = r.require_col("temp_f");
  const int c_rh = r.require_col("rh_pct");
  const int c_w = r.require_col("wind_mph");
  std::vector<std::string> row;
  while (r.next(row)) {
    HourRecord h;
    try {
      h.ts = timeutil::parse_iso_timestamp(r.get(row, c_ts, "timestamp"));
    } catch (const InputError& e) {
      r.fail("timestamp", e.what());
    }
    if (h.ts % 3600 != 0) r.fail("timestamp", "not on the hour");
    h.temp_f = r.get_double(row, c_t, "temp_f");
    h.rh_pct = r.get_double(row, c_rh, "rh_pct");
    h.wind_mph = r.get_double(row, c_w, "wind_mph");
    if (h.rh_pct < 0 || h.rh_pct > 100) r.fail("rh_pct", "relative humidity out of [0,100]");
    if (h.wind_mph < 0) r.fail("wind_mph", "negative wind speed");

    if (!a.hours.empty()) {
      const int64_t prev = a.hours.back().ts;
      if (h.ts <= prev) r.fail("timestamp", "timestamps must be strictly increasing");
      const int64_t missing = (h.ts - prev) / 3600 - 1;
      if (missing > 3)
        r.fail("timestamp", "gap of " + std::to_string(missing) + " hours before " +
                                timeutil::format_iso_timestamp(h.ts) +
                                " exceeds the 3 hour fill limit");
      if (missing > 0) {
        const HourRecord& lo = a.hours.back();
        for (int64_t m = 1; m <= missing; ++m) {
          const double f = static_cast<double>(m) / static_cast<double>(missing + 1);
          HourRecord fill;
          fill.ts = prev + m * 3600;
          fill.temp_f = lo.temp_f + (h.temp_f - lo.temp_f) * f;
          fill.rh_pct = lo.rh_pct + (h.rh_pct - lo.rh_pct) * f;
          fill.wind_mph = lo.wind_mph + (h.wind_mph - lo.wind_mph) * f;
          a.gap_report.push_back("filled " + timeutil::format_iso_timestamp(fill.ts));
          a.hours.push_back(fill);
        }
      }
    }
    a.hours.push_back(h);
  }
  if (a.hours.empty()) throw InputError(path.string() + ": no weather records");
  return a;
}

// (scenario, year[, month]) -> mean temperature delta in degF. month == 0 is
// the annual row; monthly rows take precedence when present.
struct ClimateDeltaTable {
  std::map<std::tuple<Scenario, int, int>, double> rows;

  bool has(Scenario s, int year) const {
    if (rows.count({s, year, 0})) return true;
    for (int m = 1; m <= 12; ++m)
      if (rows.count({s, year, m})) return true;
    return false;
  }

  // Per-month delta; falls back to the annual row, then errors.
  double delta_f(Scenario s, int year, int month, int baseline_year) const {
    auto it = rows.find({s, year, month});
    if (it != rows.end()) return it->second;
    it = rows.find({s, year, 0});
    if (it != rows.end()) return it->second;
    if (year == baseline_year) return 0.0;  // implied baseline zero row
    throw InputError(std::string("no climate delta for ") + scenario_name(s) + " " +
                     std::to_string(year));
  }

  std::vector<int> years() const {
    std::vector<int> out;
    for (const auto& [k, v] : rows) {
      const int y = std::get<1>(k);
      if (out.empty() || out.back() != y) out.push_back(y);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

// CSV scenario,year[,month],delta_f. With celsius = true the deltas are
// converted (x1.8; delta conversion has no offset).
inline ClimateDeltaTable load_deltas(const std::filesystem::path& path, bool celsius = false) {
  ClimateDeltaTable t;
  csv::Reader r(path);
  const int c_s = r.require_col("scenario");
  const int c_y = r.require_col("year");
  const int c_m = r.col("month");
  const int c_d = r.require_col("delta_f");
  std::vector<std::string> row;
  while (r.next(row)) {
    Scenario s;
    try {
      s = parse_scenario(r.get(row, c_s, "scenario"));
    } catch (const InputError& e) {
      r.fail("scenario", e.what());
    }
    const int year = static_cast<int>(r.get_long(row, c_y, "year"));
    int month = 0;
    if (c_m >= 0 && c_m < static_cast<int>(row.size()) && !row[static_cast<size_t>(c_m)].empty()) {
      month = static_cast<int>(r.get_long(row, c_m, "month"));
      if (month < 1 || month > 12) r.fail("month", "month out of 1..12");
    }
    double d = r.get_double(row, c_d, "delta_f");
    if (celsius) d *= 1.8;
    if (!t.rows.emplace(std::make_tuple(s, year, month), d).second)
      r.fail("scenario", std::string("duplicate delta row for ") + scenario_name(s) + " " +
                             std::to_string(year) +
                             (month ? " month " + std::to_string(month) : ""));
  }
  return t;
}

// Shift every hour's temperature by the (scenario, year[, month]) delta and
// relabel timestamps into the target year, preserving month-day-hour. Humidity
// and wind stay at baseline values. Feb 29 rows are dropped when the target
// year is not a leap year.
inline WeatherArchive project(const WeatherArchive& baseline, const ClimateDeltaTable& deltas,
                              Scenario scenario, int year) {
  if (baseline.hours.empty()) throw InputError("cannot project an empty archive");
  const int base_year = baseline.baseline_year();
  if (year != base_year && !deltas.has(scenario, year))
    throw InputError(std::string("no climate delta for ") + scenario_name(scenario) + " " +
                     std::to_string(year));

  WeatherArchive out;
  out.grid = baseline.grid;
  out.hours.reserve(baseline.hours.size());
  for (const auto& h : baseline.hours) {
    const int64_t days = h.ts / 86400;
    timeutil::Date d = timeutil::civil_from_days(days);
    const int32_t tod = static_cast<int32_t>(h.ts - days * 86400);
    d.year = year + (d.year - base_year);
    if (!timeutil::valid_date(d)) continue;
    HourRecord r = h;
    r.ts = timeutil::epoch_seconds(d, tod);
    r.temp_f = h.temp_f + deltas.delta_f(scenario, year, d.month, base_year);
    out.hours.push_back(r);
  }
  return out;
}

}  // namespace transitheat::climate
