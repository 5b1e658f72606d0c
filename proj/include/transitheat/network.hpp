#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "transitheat/geo.hpp"
#include "transitheat/gtfs.hpp"

namespace transitheat::net {

struct Footpath {
  uint32_t to_stop = 0;
  int32_t duration_s = 0;
};

// One pattern = one ordered stop list whose trips form a FIFO chain (no
// overtaking), so the earliest catchable trip is always arrival-optimal.
struct Pattern {
  std::vector<uint32_t> stops;                 // stop indices in visit order
  std::vector<uint32_t> trips;                 // trip indices, sorted by departure at first stop
  std::vector<int32_t> arrivals;               // [trip_row * stops.size() + pos]
  std::vector<int32_t> departures;

  int32_t arr(size_t trip_row, size_t pos) const { return arrivals[trip_row * stops.size() + pos]; }
  int32_t dep(size_t trip_row, size_t pos) const { return departures[trip_row * stops.size() + pos]; }
};

// Immutable after build_network; safe for concurrent readers.
struct TransitNetwork {
  std::vector<std::string> stop_ids;
  std::vector<std::string> stop_names;
  std::vector<geo::LatLon> stop_pos;
  std::vector<std::string> trip_ids;
  std::vector<std::string> trip_route;
  std::vector<std::string> trip_service;
  std::vector<gtfs::Service> services;
  std::vector<gtfs::CalendarException> exceptions;

  std::vector<Pattern> patterns;
  std::vector<std::pair<uint32_t, uint32_t>> trip_location;         // trip -> (pattern, row)
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> stop_patterns;  // stop -> (pattern, pos)
  std::vector<std::vector<Footpath>> footpaths;                     // symmetric
  std::vector<int32_t> transfer_slack_s;                            // per stop

  std::unordered_map<std::string, uint32_t> stop_index;
  std::unordered_map<std::string, uint32_t> trip_index;

  double walk_speed_mps = 1.2;

  size_t stop_count() const { return stop_ids.size(); }
  size_t trip_count() const { return trip_ids.size(); }

  // Stops within radius_m of p, by index. Uses the lat-sorted order for a band prefilter.
  std::vector<uint32_t> stops_within(const geo::LatLon& p, double radius_m) const {
    std::vector<uint32_t> out;
    const double dlat = radius_m / geo::kMetersPerDegLat;
    auto lo = std::lower_bound(by_lat_.begin(), by_lat_.end(), p.lat - dlat,
                               [&](uint32_t i, double v) { return stop_pos[i].lat < v; });
    for (auto it = lo; it != by_lat_.end() && stop_pos[*it].lat <= p.lat + dlat; ++it)
      if (geo::haversine_m(p, stop_pos[*it]) <= radius_m) out.push_back(*it);
    std::sort(out.begin(), out.end());
    return out;
  }

  // Bitmask over trip indices for one service date.
  std::vector<uint8_t> active_trip_mask(const timeutil::Date& date,
                                        std::vector<std::string>* warnings = nullptr) const {
    gtfs::FeedBundle shim;
    shim.services = services;
    shim.exceptions = exceptions;
    for (size_t i = 0; i < trip_ids.size(); ++i)
      shim.trips.push_back({trip_ids[i], trip_route[i], trip_service[i]});
    shim.reindex();
    const auto ids = gtfs::active_trips(shim, date, warnings);
    std::vector<uint8_t> mask(trip_ids.size(), 0);
    for (size_t i = 0; i < trip_ids.size(); ++i) mask[i] = ids.count(trip_ids[i]) ? 1 : 0;
    return mask;
  }

  std::vector<uint32_t> by_lat_;  // stop indices sorted by latitude
};

// Footpaths between every stop pair within max_footpath_m, duration rounded up;
// transfers.txt same-stop rows set per-stop slack, cross-stop rows add/override
// symmetric edges. Patterns dedup trips by ordered stop list, split on overtaking.
inline TransitNetwork build_network(const gtfs::FeedBundle& b, double max_footpath_m = 200.0,
                                    double walk_speed_mps = 1.2,
                                    int32_t default_slack_s = 60) {
  if (b.stops.empty()) throw InputError("cannot build a network from a feed with zero stops");
  if (walk_speed_mps <= 0) throw InputError("walk speed must be positive");

  TransitNetwork n;
  n.walk_speed_mps = walk_speed_mps;
  n.services = b.services;
  n.exceptions = b.exceptions;
  for (const auto& s : b.stops) {
    n.stop_ids.push_back(s.id);
    n.stop_names.push_back(s.name);
    n.stop_pos.push_back({s.lat, s.lon});
  }
  for (const auto& t : b.trips) {
    n.trip_ids.push_back(t.id);
    n.trip_route.push_back(t.route_id);
    n.trip_service.push_back(t.service_id);
  }
  n.stop_index = b.stop_index;
  n.trip_index = b.trip_index;

  // Collect per-trip stop/time rows (stop_times are already grouped and ordered).
  struct TripRows {
    uint32_t trip = 0;
    std::vector<uint32_t> stops;
    std::vector<int32_t> arr, dep;
  };
  std::vector<TripRows> rows;
  size_t i = 0;
  while (i < b.stop_times.size()) {
    size_t j = i;
    TripRows tr;
    tr.trip = b.trip_index.at(b.stop_times[i].trip_id);
    while (j < b.stop_times.size() && b.stop_times[j].trip_id == b.stop_times[i].trip_id) {
      tr.stops.push_back(b.stop_index.at(b.stop_times[j].stop_id));
      tr.arr.push_back(b.stop_times[j].arrival_s);
      tr.dep.push_back(b.stop_times[j].departure_s);
      ++j;
    }
    rows.push_back(std::move(tr));
    i = j;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TripRows& a, const TripRows& c) {
    if (a.dep.front() != c.dep.front()) return a.dep.front() < c.dep.front();
    return a.trip < c.trip;
  });

  // First-fit into FIFO buckets keyed by the ordered stop list.
  std::map<std::vector<uint32_t>, std::vector<uint32_t>> buckets;  // stop list -> pattern indices
  auto fits_after = [&](const Pattern& p, const TripRows& tr) {
    if (p.trips.empty()) return true;
    const size_t last = p.trips.size() - 1;
    for (size_t k = 0; k < tr.stops.size(); ++k)
      if (tr.arr[k] < p.arr(last, k) || tr.dep[k] < p.dep(last, k)) return false;
    return true;
  };
  n.trip_location.resize(b.trips.size(), {0, 0});
  for (const auto& tr : rows) {
    auto& pat_list = buckets[tr.stops];
    int32_t target = -1;
    for (uint32_t pi : pat_list)
      if (fits_after(n.patterns[pi], tr)) {
        target = static_cast<int32_t>(pi);
        break;
      }
    if (target < 0) {
      target = static_cast<int32_t>(n.patterns.size());
      Pattern p;
      p.stops = tr.stops;
      n.patterns.push_back(std::move(p));
      pat_list.push_back(static_cast<uint32_t>(target));
    }
    Pattern& p = n.patterns[static_cast<size_t>(target)];
    n.trip_location[tr.trip] = {static_cast<uint32_t>(target),
                                static_cast<uint32_t>(p.trips.size())};
    p.trips.push_back(tr.trip);
    p.arrivals.insert(p.arrivals.end(), tr.arr.begin(), tr.arr.end());
    p.departures.insert(p.departures.end(), tr.dep.begin(), tr.dep.end());
  }

  n.stop_patterns.resize(n.stop_count());
  for (uint32_t pi = 0; pi < n.patterns.size(); ++pi)
    for (uint32_t pos = 0; pos < n.patterns[pi].stops.size(); ++pos)
      n.stop_patterns[n.patterns[pi].stops[pos]].push_back({pi, pos});

  // Lat-sorted index, then radius footpaths.
  n.by_lat_.resize(n.stop_count());
  std::iota(n.by_lat_.begin(), n.by_lat_.end(), 0u);
  std::sort(n.by_lat_.begin(), n.by_lat_.end(),
            [&](uint32_t a, uint32_t c) { return n.stop_pos[a].lat < n.stop_pos[c].lat; });

  n.footpaths.resize(n.stop_count());
  for (uint32_t s = 0; s < n.stop_count(); ++s) {
    for (uint32_t t : n.stops_within(n.stop_pos[s], max_footpath_m)) {
      if (t == s) continue;
      const double d = geo::haversine_m(n.stop_pos[s], n.stop_pos[t]);
      n.footpaths[s].push_back(
          {t, static_cast<int32_t>(std::ceil(d / walk_speed_mps))});
    }
  }

  n.transfer_slack_s.assign(n.stop_count(), default_slack_s);
  for (const auto& t : b.transfers) {
    const uint32_t from = b.stop_index.at(t.from_stop);
    const uint32_t to = b.stop_index.at(t.to_stop);
    if (from == to) {
      n.transfer_slack_s[from] = t.min_transfer_s;
      continue;
    }
    int32_t dur = t.min_transfer_s;
    for (const auto& rev : b.transfers)  // symmetric edge: max of stated directions
      if (rev.from_stop == t.to_stop && rev.to_stop == t.from_stop)
        dur = std::max(dur, rev.min_transfer_s);
    auto upsert = [&](uint32_t a, uint32_t c) {
      for (auto& f : n.footpaths[a])
        if (f.to_stop == c) {
          f.duration_s = dur;
          return;
        }
      n.footpaths[a].push_back({c, dur});
    };
    upsert(from, to);
    upsert(to, from);
  }
  for (auto& fps : n.footpaths)
    std::sort(fps.begin(), fps.end(),
              [](const Footpath& a, const Footpath& c) { return a.to_stop < c.to_stop; });

  return n;
}

}  // namespace transitheat::net
