#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transitheat/network.hpp"

namespace transitheat {

enum class AccessMode { walk, bike, micromobility };

inline const char* access_mode_name(AccessMode m) {
  switch (m) {
    case AccessMode::bike: return "bike";
    case AccessMode::micromobility: return "micromobility";
    default: return "walk";
  }
}

inline AccessMode parse_access_mode(const std::string& s) {
  if (s == "walk" || s.empty()) return AccessMode::walk;
  if (s == "bike") return AccessMode::bike;
  if (s == "micromobility") return AccessMode::micromobility;
  throw InputError("unknown access mode '" + s + "'");
}

enum class SegmentKind {
  access_walk,
  access_bike,
  access_micromobility,
  wait,
  ride,
  transfer_walk,
  egress_walk,
};
inline constexpr size_t kSegmentKindCount = 7;

inline const char* segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::access_walk: return "access_walk";
    case SegmentKind::access_bike: return "access_bike";
    case SegmentKind::access_micromobility: return "access_micromobility";
    case SegmentKind::wait: return "wait";
    case SegmentKind::ride: return "ride";
    case SegmentKind::transfer_walk: return "transfer_walk";
    default: return "egress_walk";
  }
}

inline SegmentKind access_kind(AccessMode m) {
  switch (m) {
    case AccessMode::bike: return SegmentKind::access_bike;
    case AccessMode::micromobility: return SegmentKind::access_micromobility;
    default: return SegmentKind::access_walk;
  }
}

namespace route {

using geo::LatLon;

struct TripQuery {
  LatLon origin;
  LatLon destination;
  int32_t depart_s = 0;
  timeutil::Date service_date;
  AccessMode access_mode = AccessMode::walk;
  int max_transfers = 3;
  double max_access_m = 1000.0;
  std::string board_stop_hint;  // restricts the first boarding stop when set
};

struct RouterConfig {
  double walk_speed_mps = 1.2;
  double bike_speed_mps = 4.0;
  double micromobility_speed_mps = 4.5;
  double direct_walk_cutoff_m = 2000.0;

  double speed_for(AccessMode m) const {
    switch (m) {
      case AccessMode::bike: return bike_speed_mps;
      case AccessMode::micromobility: return micromobility_speed_mps;
      default: return walk_speed_mps;
    }
  }
};

// Time-positioned polyline vertex inside a segment.
struct SegmentPoint {
  int32_t t = 0;
  LatLon pos;
};

struct TripSegment {
  SegmentKind kind = SegmentKind::access_walk;
  int32_t start_s = 0;
  int32_t end_s = 0;
  LatLon from;
  LatLon to;
  std::string trip_id;     // rides only
  std::string stop_id;     // wait stop, ride boarding stop, transfer origin
  std::string to_stop_id;  // ride alighting stop, transfer target
  std::vector<SegmentPoint> waypoints;  // first at start_s, last at end_s

  int32_t duration() const { return end_s - start_s; }
};

struct Itinerary {
  std::vector<TripSegment> segments;
  int32_t depart_s = 0;
  int32_t arrive_s = 0;
  int transfers = 0;
  int boardings = 0;
  int32_t total_walk_s = 0;  // all self-propelled legs, any mode

  int32_t duration() const { return arrive_s - depart_s; }

  nlohmann::json to_json() const {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : segments) {
      nlohmann::json j{{"kind", segment_kind_name(s.kind)},
                       {"start", timeutil::format_hms(s.start_s)},
                       {"end", timeutil::format_hms(s.end_s)},
                       {"start_s", s.start_s},
                       {"end_s", s.end_s},
                       {"from", {s.from.lat, s.from.lon}},
                       {"to", {s.to.lat, s.to.lon}}};
      if (!s.trip_id.empty()) j["trip_id"] = s.trip_id;
      if (!s.stop_id.empty()) j["stop_id"] = s.stop_id;
      if (!s.to_stop_id.empty()) j["to_stop_id"] = s.to_stop_id;
      segs.push_back(std::move(j));
    }
    return nlohmann::json{{"depart", timeutil::format_hms(depart_s)},
                          {"arrive", timeutil::format_hms(arrive_s)},
                          {"duration_s", duration()},
                          {"transfers", transfers},
                          {"total_walk_s", total_walk_s},
                          {"segments", std::move(segs)}};
  }
};

enum class NoPathReason { none, no_origin_stop, no_destination_stop, no_arrival };

inline const char* no_path_reason_name(NoPathReason r) {
  switch (r) {
    case NoPathReason::no_origin_stop: return "no_origin_stop";
    case NoPathReason::no_destination_stop: return "no_destination_stop";
    case NoPathReason::no_arrival: return "no_arrival";
    default: return "none";
  }
}

struct PlanResult {
  std::optional<Itinerary> itinerary;
  NoPathReason reason = NoPathReason::none;
  bool ok() const { return itinerary.has_value(); }
};

inline int32_t walk_seconds(double distance_m, double speed_mps) {
  return static_cast<int32_t>(std::ceil(distance_m / speed_mps));
}

// Single self-propelled leg origin->destination, competing with transit.
inline PlanResult direct_walk(const TripQuery& q, const RouterConfig& cfg = {}) {
  const double d = geo::haversine_m(q.origin, q.destination);
  if (d > cfg.direct_walk_cutoff_m) return {std::nullopt, NoPathReason::no_arrival};
  const double speed = cfg.speed_for(q.access_mode);
  const int32_t dur = walk_seconds(d, speed);
  Itinerary it;
  it.depart_s = q.depart_s;
  it.arrive_s = q.depart_s + dur;
  it.transfers = 0;
  it.boardings = 0;
  it.total_walk_s = dur;
  TripSegment seg;
  seg.kind = access_kind(q.access_mode);
  seg.start_s = q.depart_s;
  seg.end_s = it.arrive_s;
  seg.from = q.origin;
  seg.to = q.destination;
  seg.waypoints = {{seg.start_s, q.origin}, {seg.end_s, q.destination}};
  it.segments.push_back(std::move(seg));
  return {std::move(it), NoPathReason::none};
}

namespace detail {

inline constexpr int32_t kInf = std::numeric_limits<int32_t>::max() / 4;

enum class ReadyVia { none, access, same_stop, footpath };

struct ReadyParent {
  ReadyVia via = ReadyVia::none;
  uint32_t from_stop = 0;  // footpath source
};

struct RideParent {
  uint32_t pattern = 0;
  uint32_t trip_row = 0;
  uint32_t board_pos = 0;
  uint32_t alight_pos = 0;
};

struct Search {
  // labels[k]: ready[k] = earliest time ready to board after k rides;
  // ride[k] = earliest arrival whose last movement is the k-th ride.
  std::vector<std::vector<int32_t>> ready, ride;
  std::vector<std::vector<ReadyParent>> ready_parent;
  std::vector<std::vector<RideParent>> ride_parent;
};

}  // namespace detail

// Round-based earliest-arrival search over the timetable. Rounds are boardings,
// bounded by max_transfers + 1. Footpaths do not chain; the per-stop slack
// applies only when reboarding at the alighting stop. Ties at the destination
// break by fewer transfers, then less total self-propelled time, then stop and
// round index, which makes the result deterministic.
inline PlanResult plan_trip(const net::TransitNetwork& n, const TripQuery& q,
                            const RouterConfig& cfg = {},
                            const std::vector<uint8_t>* active_mask = nullptr) {
  using detail::kInf;
  if (q.depart_s < 0) throw InputError("depart_s must be >= 0");
  if (q.max_transfers < 0) throw InputError("max_transfers must be >= 0");

  const PlanResult walk_candidate = direct_walk(q, cfg);

  // Access / egress stop sets.
  struct Leg {
    uint32_t stop;
    int32_t duration;
  };
  std::vector<Leg> access, egress;
  if (!q.board_stop_hint.empty()) {
    auto it = n.stop_index.find(q.board_stop_hint);
    if (it == n.stop_index.end())
      throw InputError("board stop hint '" + q.board_stop_hint + "' not in feed");
    const double d = geo::haversine_m(q.origin, n.stop_pos[it->second]);
    access.push_back({it->second, walk_seconds(d, cfg.speed_for(q.access_mode))});
  } else {
    for (uint32_t s : n.stops_within(q.origin, q.max_access_m))
      access.push_back(
          {s, walk_seconds(geo::haversine_m(q.origin, n.stop_pos[s]), cfg.speed_for(q.access_mode))});
  }
  for (uint32_t s : n.stops_within(q.destination, q.max_access_m))
    egress.push_back({s, walk_seconds(geo::haversine_m(q.destination, n.stop_pos[s]),
                                      cfg.walk_speed_mps)});

  if (access.empty())
    return walk_candidate.ok() ? walk_candidate
                               : PlanResult{std::nullopt, NoPathReason::no_origin_stop};
  if (egress.empty())
    return walk_candidate.ok() ? walk_candidate
                               : PlanResult{std::nullopt, NoPathReason::no_destination_stop};

  const size_t ns = n.stop_count();
  const int rounds = q.max_transfers + 1;
  detail::Search sr;
  sr.ready.assign(static_cast<size_t>(rounds) + 1, std::vector<int32_t>(ns, kInf));
  sr.ride.assign(static_cast<size_t>(rounds) + 1, std::vector<int32_t>(ns, kInf));
  sr.ready_parent.assign(static_cast<size_t>(rounds) + 1,
                         std::vector<detail::ReadyParent>(ns));
  sr.ride_parent.assign(static_cast<size_t>(rounds) + 1,
                        std::vector<detail::RideParent>(ns));

  std::vector<uint8_t> marked(ns, 0);
  for (const Leg& a : access) {
    const int32_t t = q.depart_s + a.duration;
    if (t < sr.ready[0][a.stop]) {
      sr.ready[0][a.stop] = t;
      sr.ready_parent[0][a.stop] = {detail::ReadyVia::access, 0};
      marked[a.stop] = 1;
    }
  }

  std::vector<int32_t> queue_pos(n.patterns.size(), -1);
  for (int k = 1; k <= rounds; ++k) {
    const auto& ready_prev = sr.ready[static_cast<size_t>(k - 1)];
    auto& ride_k = sr.ride[static_cast<size_t>(k)];
    auto& rparent = sr.ride_parent[static_cast<size_t>(k)];

    // Queue: earliest marked position per pattern.
    std::fill(queue_pos.begin(), queue_pos.end(), -1);
    std::vector<uint32_t> queued;
    for (uint32_t s = 0; s < ns; ++s) {
      if (!marked[s]) continue;
      for (const auto& [pi, pos] : n.stop_patterns[s]) {
        if (queue_pos[pi] < 0) {
          queue_pos[pi] = static_cast<int32_t>(pos);
          queued.push_back(pi);
        } else {
          queue_pos[pi] = std::min(queue_pos[pi], static_cast<int32_t>(pos));
        }
      }
    }
    std::sort(queued.begin(), queued.end());
    std::fill(marked.begin(), marked.end(), 0);

    for (uint32_t pi : queued) {
      const net::Pattern& p = n.patterns[pi];
      const size_t len = p.stops.size();
      int32_t row = -1;
      uint32_t board_pos = 0;
      for (size_t pos = static_cast<size_t>(queue_pos[pi]); pos < len; ++pos) {
        const uint32_t s = p.stops[pos];
        if (row >= 0) {
          const int32_t t_arr = p.arr(static_cast<size_t>(row), pos);
          if (t_arr < ride_k[s]) {
            ride_k[s] = t_arr;
            rparent[s] = {pi, static_cast<uint32_t>(row), board_pos,
                          static_cast<uint32_t>(pos)};
          }
        }
        // Board the earliest active trip departing here at or after ready time.
        if (ready_prev[s] >= kInf) continue;
        const int32_t ready = ready_prev[s];
        int lo = 0, hi = static_cast<int>(p.trips.size());
        while (lo < hi) {  // first row with dep >= ready (rows are FIFO-sorted)
          const int mid = (lo + hi) / 2;
          if (p.dep(static_cast<size_t>(mid), pos) >= ready) hi = mid;
          else lo = mid + 1;
        }
        while (lo < static_cast<int>(p.trips.size()) && active_mask &&
               !(*active_mask)[p.trips[static_cast<size_t>(lo)]])
          ++lo;
        if (lo < static_cast<int>(p.trips.size()) && (row < 0 || lo < row)) {
          row = lo;
          board_pos = static_cast<uint32_t>(pos);
        }
      }
    }

    // Ready times after k rides: carry forward, then same-stop slack and footpaths.
    auto& ready_k = sr.ready[static_cast<size_t>(k)];
    auto& kparent = sr.ready_parent[static_cast<size_t>(k)];
    ready_k = ready_prev;
    kparent = sr.ready_parent[static_cast<size_t>(k - 1)];
    if (k == rounds) break;  // no further boarding possible
    for (uint32_t s = 0; s < ns; ++s) {
      if (ride_k[s] >= kInf) continue;
      const int32_t same = ride_k[s] + n.transfer_slack_s[s];
      if (same < ready_k[s]) {
        ready_k[s] = same;
        kparent[s] = {detail::ReadyVia::same_stop, 0};
        marked[s] = 1;
      }
      for (const auto& fp : n.footpaths[s]) {
        const int32_t t = ride_k[s] + fp.duration_s;
        if (t < ready_k[fp.to_stop]) {
          ready_k[fp.to_stop] = t;
          kparent[fp.to_stop] = {detail::ReadyVia::footpath, s};
          marked[fp.to_stop] = 1;
        }
      }
    }
  }

  // Candidate selection at the destination.
  struct Candidate {
    int32_t arrival = detail::kInf;
    int k = 0;
    uint32_t stop = 0;
    int32_t egress_dur = 0;
  };
  std::vector<Candidate> best_pool;
  int32_t best_arrival = walk_candidate.ok() ? walk_candidate.itinerary->arrive_s : kInf;
  for (int k = 1; k <= rounds; ++k)
    for (const Leg& e : egress) {
      const int32_t r = sr.ride[static_cast<size_t>(k)][e.stop];
      if (r >= kInf) continue;
      best_arrival = std::min(best_arrival, r + e.duration);
    }
  if (best_arrival >= kInf) return {std::nullopt, NoPathReason::no_arrival};
  for (int k = 1; k <= rounds; ++k)
    for (const Leg& e : egress) {
      const int32_t r = sr.ride[static_cast<size_t>(k)][e.stop];
      if (r < kInf && r + e.duration == best_arrival)
        best_pool.push_back({best_arrival, k, e.stop, e.duration});
    }

  // Reconstruct a candidate into segments. A round-k label may have boarded
  // from a carried-forward access label, so the actual chain can be shorter
  // than k rides; walk back until the ready provenance says "access".
  auto reconstruct = [&](const Candidate& c) {
    Itinerary it;
    it.depart_s = q.depart_s;
    it.arrive_s = c.arrival;

    std::vector<detail::RideParent> chain;  // rides from last to first
    uint32_t stop = c.stop;
    int k = c.k;
    while (k >= 1) {
      const auto& rp = sr.ride_parent[static_cast<size_t>(k)][stop];
      chain.push_back(rp);
      const uint32_t board = n.patterns[rp.pattern].stops[rp.board_pos];
      const auto& rdy = sr.ready_parent[static_cast<size_t>(k - 1)][board];
      if (rdy.via == detail::ReadyVia::access) break;
      stop = rdy.via == detail::ReadyVia::footpath ? rdy.from_stop : board;
      --k;
    }
    std::reverse(chain.begin(), chain.end());
    it.boardings = static_cast<int>(chain.size());
    it.transfers = static_cast<int>(chain.size()) - 1;

    const uint32_t first_board = n.patterns[chain[0].pattern].stops[chain[0].board_pos];
    int32_t cursor = q.depart_s;

    auto push_walk = [&](SegmentKind kind, const LatLon& from, const LatLon& to, int32_t dur,
                         const std::string& stop_id, const std::string& to_stop_id) {
      TripSegment seg;
      seg.kind = kind;
      seg.start_s = cursor;
      seg.end_s = cursor + dur;
      seg.from = from;
      seg.to = to;
      seg.stop_id = stop_id;
      seg.to_stop_id = to_stop_id;
      seg.waypoints = {{seg.start_s, from}, {seg.end_s, to}};
      it.total_walk_s += dur;
      cursor = seg.end_s;
      it.segments.push_back(std::move(seg));
    };
    auto push_wait = [&](uint32_t at_stop, int32_t until) {
      if (until <= cursor) return;
      TripSegment seg;
      seg.kind = SegmentKind::wait;
      seg.start_s = cursor;
      seg.end_s = until;
      seg.from = seg.to = n.stop_pos[at_stop];
      seg.stop_id = n.stop_ids[at_stop];
      seg.waypoints = {{seg.start_s, seg.from}, {seg.end_s, seg.to}};
      cursor = until;
      it.segments.push_back(std::move(seg));
    };

    // Access leg (zero-length when the origin sits on the stop).
    {
      const double d = geo::haversine_m(q.origin, n.stop_pos[first_board]);
      const int32_t dur = walk_seconds(d, cfg.speed_for(q.access_mode));
      push_walk(access_kind(q.access_mode), q.origin, n.stop_pos[first_board], dur, "",
                n.stop_ids[first_board]);
    }

    uint32_t prev_alight = first_board;
    for (size_t idx = 0; idx < chain.size(); ++idx) {
      const auto& rp = chain[idx];
      const net::Pattern& p = n.patterns[rp.pattern];
      const uint32_t board = p.stops[rp.board_pos];
      if (idx > 0) {
        // Transfer from prev_alight to board: same stop or one footpath.
        if (board != prev_alight) {
          int32_t dur = 0;
          for (const auto& fp : n.footpaths[prev_alight])
            if (fp.to_stop == board) dur = fp.duration_s;
          push_walk(SegmentKind::transfer_walk, n.stop_pos[prev_alight], n.stop_pos[board],
                    dur, n.stop_ids[prev_alight], n.stop_ids[board]);
        }
      }
      const int32_t dep = p.dep(rp.trip_row, rp.board_pos);
      push_wait(board, dep);

      TripSegment seg;
      seg.kind = SegmentKind::ride;
      seg.start_s = dep;
      seg.end_s = p.arr(rp.trip_row, rp.alight_pos);
      seg.from = n.stop_pos[board];
      seg.to = n.stop_pos[p.stops[rp.alight_pos]];
      seg.trip_id = n.trip_ids[p.trips[rp.trip_row]];
      seg.stop_id = n.stop_ids[board];
      seg.to_stop_id = n.stop_ids[p.stops[rp.alight_pos]];
      seg.waypoints.push_back({dep, seg.from});
      for (uint32_t pos = rp.board_pos + 1; pos <= rp.alight_pos; ++pos) {
        const LatLon at = n.stop_pos[p.stops[pos]];
        const int32_t a = p.arr(rp.trip_row, pos);
        seg.waypoints.push_back({a, at});
        if (pos < rp.alight_pos) {
          const int32_t dp = p.dep(rp.trip_row, pos);
          if (dp > a) seg.waypoints.push_back({dp, at});  // dwell
        }
      }
      cursor = seg.end_s;
      prev_alight = p.stops[rp.alight_pos];
      it.segments.push_back(std::move(seg));
    }

    // Egress.
    {
      const double d = geo::haversine_m(n.stop_pos[prev_alight], q.destination);
      const int32_t dur = walk_seconds(d, cfg.walk_speed_mps);
      push_walk(SegmentKind::egress_walk, n.stop_pos[prev_alight], q.destination, dur,
                n.stop_ids[prev_alight], "");
    }
    return it;
  };

  // Pick the winner: arrival, then transfers, then walk time, then stable order.
  std::optional<Itinerary> best;
  auto better = [](const Itinerary& a, const Itinerary& b) {
    if (a.arrive_s != b.arrive_s) return a.arrive_s < b.arrive_s;
    if (a.transfers != b.transfers) return a.transfers < b.transfers;
    return a.total_walk_s < b.total_walk_s;
  };
  std::sort(best_pool.begin(), best_pool.end(), [](const Candidate& a, const Candidate& b) {
    if (a.k != b.k) return a.k < b.k;
    return a.stop < b.stop;
  });
  for (const auto& c : best_pool) {
    Itinerary it = reconstruct(c);
    if (!best || better(it, *best)) best = std::move(it);
  }
  if (walk_candidate.ok() &&
      (!best || better(*walk_candidate.itinerary, *best)))
    best = walk_candidate.itinerary;

  if (!best) return {std::nullopt, NoPathReason::no_arrival};
  return {std::move(best), NoPathReason::none};
}

}  // namespace route
}  // namespace transitheat
