#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "transitheat/csv.hpp"
#include "transitheat/thermal.hpp"
#include "transitheat/trajectory.hpp"

namespace transitheat::exposure {

enum class Workload { light, moderate, heavy };

inline const char* workload_name(Workload w) {
  switch (w) {
    case Workload::light: return "light";
    case Workload::moderate: return "moderate";
    default: return "heavy";
  }
}

// Compendium convention: light < 3.0 MET, moderate 3.0..6.0, heavy > 6.0.
inline Workload workload_of(double met) {
  if (met < 3.0) return Workload::light;
  if (met <= 6.0) return Workload::moderate;
  return Workload::heavy;
}

// Activity intensity per segment kind plus exposure exemption (air-conditioned
// riding). Defaults transcribed from the 2024 Adult Compendium.
struct MetTable {
  std::array<double, kSegmentKindCount> met{};
  std::array<bool, kSegmentKindCount> exempt{};

  double met_of(SegmentKind k) const { return met[static_cast<size_t>(k)]; }
  bool is_exempt(SegmentKind k) const { return exempt[static_cast<size_t>(k)]; }

  static MetTable defaults() {
    MetTable t;
    auto set = [&](SegmentKind k, double m, bool ex) {
      t.met[static_cast<size_t>(k)] = m;
      t.exempt[static_cast<size_t>(k)] = ex;
    };
    set(SegmentKind::access_walk, 3.5, false);
    set(SegmentKind::access_bike, 6.8, false);
    set(SegmentKind::access_micromobility, 2.5, false);
    set(SegmentKind::wait, 1.3, false);
    set(SegmentKind::ride, 1.3, true);
    set(SegmentKind::transfer_walk, 3.5, false);
    set(SegmentKind::egress_walk, 3.5, false);
    return t;
  }

  // activity,met,exempt rows; unknown activities rejected, missing ones keep defaults.
  static MetTable from_csv(const std::filesystem::path& path) {
    MetTable t = defaults();
    csv::Reader r(path);
    const int c_act = r.require_col("activity");
    const int c_met = r.require_col("met");
    const int c_ex = r.require_col("exempt");
    std::vector<std::string> row;
    while (r.next(row)) {
      const std::string& name = r.get(row, c_act, "activity");
      int found = -1;
      for (size_t k = 0; k < kSegmentKindCount; ++k)
        if (name == segment_kind_name(static_cast<SegmentKind>(k))) found = static_cast<int>(k);
      if (found < 0) r.fail("activity", "unknown activity '" + name + "'");
      const double m = r.get_double(row, c_met, "met");
      if (m <= 0) r.fail("met", "MET must be positive");
      t.met[static_cast<size_t>(found)] = m;
      const long ex = r.get_long(row, c_ex, "exempt");
      if (ex != 0 && ex != 1) r.fail("exempt", "expected 0 or 1");
      t.exempt[static_cast<size_t>(found)] = ex == 1;
    }
    return t;
  }
};

// CDC-style permissible work minutes per hour by heat-index band and workload.
// Below the lowest band work is unrestricted (60).
struct WorkRestRow {
  double edge_f = 0.0;  // band lower edge
  std::array<int, 3> minutes{};  // light, moderate, heavy
};

struct WorkRestSchedule {
  std::vector<WorkRestRow> rows;  // ascending by edge_f

  double first_edge_f() const { return rows.empty() ? 1e30 : rows.front().edge_f; }

  int permissible_minutes(double heat_index_f, Workload w) const {
    int v = 60;
    for (const auto& r : rows) {
      if (heat_index_f < r.edge_f) break;
      v = r.minutes[static_cast<size_t>(w)];
    }
    return v;
  }

  void validate_or_throw(const std::string& origin) const {
    if (rows.empty()) throw InputError(origin + ": schedule has no rows");
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& m = rows[i].minutes;
      for (int v : m)
        if (v < 0 || v > 60) throw InputError(origin + ": minutes must be in [0,60]");
      if (!(m[0] >= m[1] && m[1] >= m[2]))
        throw InputError(origin + ": minutes must not increase from light to heavy");
      if (i > 0) {
        if (rows[i].edge_f <= rows[i - 1].edge_f)
          throw InputError(origin + ": band edges must be strictly increasing");
        for (size_t c = 0; c < 3; ++c)
          if (rows[i].minutes[c] > rows[i - 1].minutes[c])
            throw InputError(origin + ": minutes must not increase with heat index");
      }
    }
  }

  // edge_f,light,moderate,heavy rows.
  static WorkRestSchedule from_csv(const std::filesystem::path& path) {
    WorkRestSchedule s;
    csv::Reader r(path);
    const int c_edge = r.require_col("edge_f");
    const int c_l = r.require_col("light");
    const int c_m = r.require_col("moderate");
    const int c_h = r.require_col("heavy");
    std::vector<std::string> row;
    while (r.next(row)) {
      WorkRestRow w;
      w.edge_f = r.get_double(row, c_edge, "edge_f");
      w.minutes = {static_cast<int>(r.get_long(row, c_l, "light")),
                   static_cast<int>(r.get_long(row, c_m, "moderate")),
                   static_cast<int>(r.get_long(row, c_h, "heavy"))};
      s.rows.push_back(w);
    }
    std::sort(s.rows.begin(), s.rows.end(),
              [](const WorkRestRow& a, const WorkRestRow& b) { return a.edge_f < b.edge_f; });
    s.validate_or_throw(path.string());
    return s;
  }
};

struct ExposureResult {
  std::string trip_id;
  double rest_deficit_min = 0.0;
  bool at_risk = false;
  bool latched = false;                 // hit a zero-permissible-work cell while working
  std::vector<uint8_t> segment_flags;   // per itinerary segment index
  std::vector<double> trace;            // per-second running deficit, kept on request
};

// Required rest minutes per work minute at W permissible work minutes/hour.
// W = 0 means work is prohibited outright; the ratio is capped at 60 (a full
// rest hour owed per minute), which dominates (60-W)/W for every W >= 1 and
// keeps the deficit monotone in temperature across the W->0 band edge.
inline double rest_ratio(int permissible_minutes) {
  if (permissible_minutes <= 0) return 60.0;
  return (60.0 - permissible_minutes) / permissible_minutes;
}

// Positivity guard of one nanominute: per-second double accumulation leaves
// residue around 1e-16..1e-13 where the exact sum is zero, and flags must not
// trip on it. Any real deficit step is at least 1/180 minute.
inline constexpr double kDeficitEps = 1e-9;

// Per-second accounting over an activity profile:
//   exempt activity        -> neutral second
//   light work, heat index below the lowest band -> rest credit 1/60 min, floor 0
//   otherwise a work second -> deficit += rest_ratio(W)/60; W == 0 also latches
// A segment is flagged when the running deficit is positive after any of its
// seconds or the latch fires inside it. weather_at(t, pos) must cover the span.
template <typename WeatherAt>
ExposureResult accumulate(const trajectory::ActivityProfile& profile,
                          const WeatherAt& weather_at, const MetTable& met,
                          const WorkRestSchedule& schedule, bool keep_trace = false,
                          double starting_deficit_min = 0.0) {
  ExposureResult res;
  res.trip_id = profile.trip_id;
  double deficit = starting_deficit_min;
  const double first_edge = schedule.first_edge_f();

  std::array<Workload, kSegmentKindCount> wl{};
  for (size_t k = 0; k < kSegmentKindCount; ++k)
    wl[k] = workload_of(met.met[k] > 0 ? met.met[k] : 1.0);

  uint32_t max_segment = 0;
  for (const auto& s : profile.samples) max_segment = std::max(max_segment, s.segment);
  res.segment_flags.assign(profile.empty() ? 0 : max_segment + 1, 0);
  if (keep_trace) res.trace.reserve(profile.size());

  double memo_temp = -1e30, memo_rh = -1e30, memo_hi = 0.0;
  for (const auto& s : profile.samples) {
    const size_t k = static_cast<size_t>(s.kind);
    bool flag_now = false;
    if (!met.exempt[k]) {
      const thermal::WeatherSample w = weather_at(s.t, s.pos);
      if (w.air_temp_f != memo_temp || w.rel_humidity_pct != memo_rh) {
        memo_temp = w.air_temp_f;
        memo_rh = w.rel_humidity_pct;
        memo_hi = thermal::heat_index_f(memo_temp, memo_rh);
      }
      const double hi = memo_hi;
      if (wl[k] == Workload::light && hi < first_edge) {
        deficit -= 1.0 / 60.0;
        if (deficit <= kDeficitEps) deficit = 0.0;  // floor, absorbing rounding residue
      } else {
        const int w_min = schedule.permissible_minutes(hi, wl[k]);
        deficit += rest_ratio(w_min) / 60.0;
        if (w_min <= 0) {
          res.latched = true;
          flag_now = true;
        }
      }
    }
    if (deficit > kDeficitEps || flag_now) res.segment_flags[s.segment] = 1;
    if (keep_trace) res.trace.push_back(deficit);
  }

  res.rest_deficit_min = deficit;
  res.at_risk = deficit > kDeficitEps || res.latched;
  return res;
}

// Per-kind vulnerability flags over the five reportable kinds: a kind is
// vulnerable when any segment of that kind was flagged. Rides and egress are
// not reported (riding is exempt; egress is not a distinct reporting class).
inline constexpr std::array<SegmentKind, 5> kVulnerabilityKinds = {
    SegmentKind::access_walk, SegmentKind::access_bike,
    SegmentKind::access_micromobility, SegmentKind::wait, SegmentKind::transfer_walk};

struct SegmentVulnerability {
  std::array<bool, 5> has_kind{};
  std::array<bool, 5> flagged{};
};

inline SegmentVulnerability segment_vulnerability(const ExposureResult& res,
                                                  const route::Itinerary& it) {
  SegmentVulnerability v;
  for (size_t i = 0; i < it.segments.size(); ++i) {
    for (size_t k = 0; k < kVulnerabilityKinds.size(); ++k) {
      if (it.segments[i].kind != kVulnerabilityKinds[k]) continue;
      if (it.segments[i].duration() > 0) v.has_kind[k] = true;
      if (i < res.segment_flags.size() && res.segment_flags[i]) v.flagged[k] = true;
    }
  }
  return v;
}

}  // namespace transitheat::exposure
