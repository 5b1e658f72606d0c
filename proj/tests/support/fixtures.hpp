#pragma once

// Shared fixtures for the unit and acceptance suites: temp dirs, tiny GTFS
// writers, synthetic weather, and an independent brute-force routing oracle.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "transitheat/climate.hpp"
#include "transitheat/exposure.hpp"
#include "transitheat/gtfs.hpp"
#include "transitheat/network.hpp"
#include "transitheat/router.hpp"

namespace testfx {

namespace fs = std::filesystem;
namespace th = transitheat;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = fs::temp_directory_path() /
            ("transitheat_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::trunc);
  out << content;
}

// Base point for synthetic geometry; offsets in metres convert through the
// same haversine the library uses, so walk durations land exactly.
inline constexpr double kBaseLat = 33.7500;
inline constexpr double kBaseLon = -84.3900;

inline th::geo::LatLon at_north(double north_m, double east_m = 0.0) {
  return th::geo::offset_m({kBaseLat, kBaseLon}, east_m, north_m);
}

struct FeedSpec {
  struct StopRow {
    std::string id;
    th::geo::LatLon pos;
  };
  struct TripRow {
    std::string id;
    std::string route;
    std::string service = "wk";
    // (stop id, arrival, departure) in order
    std::vector<std::tuple<std::string, std::string, std::string>> stops;
  };
  std::vector<StopRow> stops;
  std::vector<TripRow> trips;
  std::string calendar =
      "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,"
      "end_date\nwk,1,1,1,1,1,0,0,20190801,20190915\n";
  std::string transfers;       // optional full file text
  std::string calendar_dates;  // optional full file text
};

inline void write_feed(const FeedSpec& spec, const fs::path& dir) {
  std::string stops = "stop_id,stop_name,stop_lat,stop_lon\n";
  for (const auto& s : spec.stops)
    stops += s.id + ",stop " + s.id + "," + th::csv::format_double(s.pos.lat) + "," +
             th::csv::format_double(s.pos.lon) + "\n";
  write_file(dir / "stops.txt", stops);

  std::set<std::string> route_ids;
  std::string trips = "route_id,service_id,trip_id\n";
  std::string stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
  for (const auto& t : spec.trips) {
    route_ids.insert(t.route);
    trips += t.route + "," + t.service + "," + t.id + "\n";
    int seq = 1;
    for (const auto& [stop, arr, dep] : t.stops)
      stop_times += t.id + "," + arr + "," + dep + "," + stop + "," + std::to_string(seq++) + "\n";
  }
  write_file(dir / "trips.txt", trips);
  write_file(dir / "stop_times.txt", stop_times);

  std::string routes = "route_id,route_short_name,route_type\n";
  for (const auto& r : route_ids) routes += r + "," + r + ",3\n";
  write_file(dir / "routes.txt", routes);
  write_file(dir / "calendar.txt", spec.calendar);
  if (!spec.transfers.empty()) write_file(dir / "transfers.txt", spec.transfers);
  if (!spec.calendar_dates.empty()) write_file(dir / "calendar_dates.txt", spec.calendar_dates);
}

// The hand-traced feed: stop A at the base point, stop B 1000 m north, one
// route A->B departing 08:00:00 arriving 08:10:00 (plus a later trip).
inline FeedSpec hand_traced_feed() {
  FeedSpec f;
  f.stops = {{"A", at_north(0)}, {"B", at_north(1000)}};
  f.trips = {{"t1", "r1", "wk", {{"A", "08:00:00", "08:00:00"}, {"B", "08:10:00", "08:10:00"}}},
             {"t2", "r1", "wk", {{"A", "09:00:00", "09:00:00"}, {"B", "09:10:00", "09:10:00"}}}};
  return f;
}

// Hourly weather CSV covering [first, last] civil dates, constant values.
inline std::string constant_weather_csv(const th::timeutil::Date& first,
                                        const th::timeutil::Date& last, double temp_f,
                                        double rh = 50.0, double wind = 5.0) {
  std::string out = "timestamp,temp_f,rh_pct,wind_mph\n";
  const int64_t d0 = th::timeutil::days_from_civil(first);
  const int64_t d1 = th::timeutil::days_from_civil(last);
  for (int64_t d = d0; d <= d1; ++d)
    for (int h = 0; h < 24; ++h)
      out += th::timeutil::format_iso_timestamp(d * 86400 + h * 3600) + "," +
             th::csv::format_double(temp_f) + "," + th::csv::format_double(rh) + "," +
             th::csv::format_double(wind) + "\n";
  return out;
}

// The spec's fixture work/rest schedule: <91 unrestricted; 91-104 -> 60/45/30;
// 104-116 -> 45/30/15; >=116 -> 0/0/0.
inline th::exposure::WorkRestSchedule fixture_schedule() {
  th::exposure::WorkRestSchedule s;
  s.rows = {{91.0, {60, 45, 30}}, {104.0, {45, 30, 15}}, {116.0, {0, 0, 0}}};
  return s;
}

// ---------------------------------------------------------------------------
// Brute-force earliest-arrival oracle. Works straight off the FeedBundle rows
// (no patterns, no FIFO assumptions): label-correcting passes over every trip
// and boarding position, one pass per allowed boarding, mirroring the stated
// transfer semantics (slack on same-stop reboards, single non-chaining
// footpaths, direct-walk candidate).
// ---------------------------------------------------------------------------

struct OracleResult {
  bool reachable = false;
  int32_t arrival = 0;
};

inline OracleResult oracle_earliest_arrival(const th::gtfs::FeedBundle& bundle,
                                            const th::route::TripQuery& q,
                                            const th::route::RouterConfig& cfg,
                                            double max_footpath_m,
                                            int32_t default_slack_s,
                                            const std::set<std::string>& active) {
  constexpr int32_t INF = std::numeric_limits<int32_t>::max() / 4;
  const size_t ns = bundle.stops.size();
  auto pos_of = [&](size_t i) {
    return th::geo::LatLon{bundle.stops[i].lat, bundle.stops[i].lon};
  };
  auto ceil_walk = [](double d, double v) { return static_cast<int32_t>(std::ceil(d / v)); };

  // Per-trip stop rows.
  struct TripRows {
    std::string id;
    std::vector<size_t> stops;
    std::vector<int32_t> arr, dep;
  };
  std::vector<TripRows> trips;
  size_t i = 0;
  while (i < bundle.stop_times.size()) {
    TripRows tr;
    tr.id = bundle.stop_times[i].trip_id;
    size_t j = i;
    while (j < bundle.stop_times.size() && bundle.stop_times[j].trip_id == tr.id) {
      tr.stops.push_back(bundle.stop_index.at(bundle.stop_times[j].stop_id));
      tr.arr.push_back(bundle.stop_times[j].arrival_s);
      tr.dep.push_back(bundle.stop_times[j].departure_s);
      ++j;
    }
    if (active.count(tr.id)) trips.push_back(std::move(tr));
    i = j;
  }

  // Footpaths and per-stop slack, mirroring build_network's rules.
  std::vector<std::vector<std::pair<size_t, int32_t>>> foot(ns);
  std::vector<int32_t> slack(ns, default_slack_s);
  for (size_t a = 0; a < ns; ++a)
    for (size_t b = 0; b < ns; ++b) {
      if (a == b) continue;
      const double d = th::geo::haversine_m(pos_of(a), pos_of(b));
      if (d <= max_footpath_m) foot[a].push_back({b, ceil_walk(d, cfg.walk_speed_mps)});
    }
  for (const auto& t : bundle.transfers) {
    const size_t from = bundle.stop_index.at(t.from_stop);
    const size_t to = bundle.stop_index.at(t.to_stop);
    if (from == to) {
      slack[from] = t.min_transfer_s;
      continue;
    }
    int32_t dur = t.min_transfer_s;
    for (const auto& rev : bundle.transfers)
      if (rev.from_stop == t.to_stop && rev.to_stop == t.from_stop)
        dur = std::max(dur, rev.min_transfer_s);
    auto upsert = [&](size_t a, size_t b) {
      for (auto& e : foot[a])
        if (e.first == b) {
          e.second = dur;
          return;
        }
      foot[a].push_back({b, dur});
    };
    upsert(from, to);
    upsert(to, from);
  }

  // Access / egress.
  const double access_speed = cfg.speed_for(q.access_mode);
  std::vector<int32_t> ready(ns, INF);
  if (!q.board_stop_hint.empty()) {
    auto it = bundle.stop_index.find(q.board_stop_hint);
    if (it != bundle.stop_index.end())
      ready[it->second] =
          q.depart_s + ceil_walk(th::geo::haversine_m(q.origin, pos_of(it->second)), access_speed);
  } else {
    for (size_t s = 0; s < ns; ++s) {
      const double d = th::geo::haversine_m(q.origin, pos_of(s));
      if (d <= q.max_access_m) ready[s] = q.depart_s + ceil_walk(d, access_speed);
    }
  }
  std::vector<int32_t> egress(ns, -1);
  for (size_t s = 0; s < ns; ++s) {
    const double d = th::geo::haversine_m(q.destination, pos_of(s));
    if (d <= q.max_access_m) egress[s] = ceil_walk(d, cfg.walk_speed_mps);
  }

  int32_t best = INF;
  {  // direct walk candidate
    const double d = th::geo::haversine_m(q.origin, q.destination);
    if (d <= cfg.direct_walk_cutoff_m) best = q.depart_s + ceil_walk(d, access_speed);
  }

  const int max_boardings = q.max_transfers + 1;
  for (int k = 0; k < max_boardings; ++k) {
    std::vector<int32_t> ride(ns, INF);
    for (const auto& t : trips)
      for (size_t bi = 0; bi + 1 < t.stops.size(); ++bi) {
        if (ready[t.stops[bi]] >= INF || t.dep[bi] < ready[t.stops[bi]]) continue;
        for (size_t ai = bi + 1; ai < t.stops.size(); ++ai)
          ride[t.stops[ai]] = std::min(ride[t.stops[ai]], t.arr[ai]);
      }
    std::vector<int32_t> next = ready;
    for (size_t s = 0; s < ns; ++s) {
      if (ride[s] >= INF) continue;
      if (egress[s] >= 0) best = std::min(best, ride[s] + egress[s]);
      next[s] = std::min(next[s], ride[s] + slack[s]);
      for (const auto& [to, dur] : foot[s]) next[to] = std::min(next[to], ride[s] + dur);
    }
    ready = std::move(next);
  }

  if (best >= INF) return {false, 0};
  return {true, best};
}

// Deterministic random toy feed on up to max_stops stops / max_trips trips.
inline FeedSpec random_feed(std::mt19937_64& rng, int max_stops = 6, int max_trips = 12) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
  };
  FeedSpec f;
  const int n_stops = pick(3, max_stops);
  for (int s = 0; s < n_stops; ++s) {
    // spread over a ~3 km square, some stops close enough for footpaths
    const double north = (rng() % 3000u);
    const double east = (rng() % 3000u);
    f.stops.push_back({std::string(1, static_cast<char>('A' + s)), at_north(north, east)});
  }
  const int n_trips = pick(2, max_trips);
  for (int t = 0; t < n_trips; ++t) {
    FeedSpec::TripRow tr;
    tr.id = "t" + std::to_string(t);
    tr.route = "r" + std::to_string(pick(0, 2));
    const int len = pick(2, n_stops);
    std::vector<int> order(static_cast<size_t>(n_stops));
    std::iota(order.begin(), order.end(), 0);
    for (int s = n_stops - 1; s > 0; --s)
      std::swap(order[static_cast<size_t>(s)], order[rng() % static_cast<uint64_t>(s + 1)]);
    int clock = 6 * 3600 + pick(0, 10) * 900;
    for (int s = 0; s < len; ++s) {
      const int arr = clock;
      const int dwell = pick(0, 1) * 30;
      tr.stops.push_back({std::string(1, static_cast<char>('A' + order[static_cast<size_t>(s)])),
                          th::timeutil::format_hms(arr),
                          th::timeutil::format_hms(arr + dwell)});
      clock = arr + dwell + pick(2, 12) * 60;
    }
    f.trips.push_back(std::move(tr));
  }
  return f;
}

}  // namespace testfx
