#pragma once

#include <string>
#include <vector>

#include "transitheat/router.hpp"

namespace transitheat::trajectory {

using geo::LatLon;

struct Sample {
  int32_t t = 0;  // seconds of service day
  LatLon pos;
  SegmentKind kind = SegmentKind::access_walk;
  uint32_t segment = 0;  // index into the source itinerary
};

struct ActivityProfile {
  std::string trip_id;
  std::vector<Sample> samples;  // one per whole second in [depart, arrive)

  bool empty() const { return samples.empty(); }
  size_t size() const { return samples.size(); }
};

namespace detail {

inline LatLon position_at(const route::TripSegment& seg, int32_t t) {
  const auto& wp = seg.waypoints;
  if (wp.empty()) return seg.from;
  if (t <= wp.front().t) return wp.front().pos;
  for (size_t i = 1; i < wp.size(); ++i) {
    if (t < wp[i].t) {
      const double f = static_cast<double>(t - wp[i - 1].t) /
                       static_cast<double>(wp[i].t - wp[i - 1].t);
      return geo::lerp(wp[i - 1].pos, wp[i].pos, f);
    }
    if (t == wp[i].t) return wp[i].pos;
  }
  return wp.back().pos;
}

}  // namespace detail

// One sample per whole second in [depart, arrive). A second belongs to the
// segment containing its start instant (half-open segment intervals), and its
// position interpolates linearly along that segment's waypoint polyline.
inline ActivityProfile expand(const route::Itinerary& it, std::string trip_id = "") {
  ActivityProfile p;
  p.trip_id = std::move(trip_id);
  const int32_t total = it.duration();
  if (total <= 0) return p;
  p.samples.reserve(static_cast<size_t>(total));

  size_t seg = 0;
  for (int32_t t = it.depart_s; t < it.arrive_s; ++t) {
    while (seg + 1 < it.segments.size() && t >= it.segments[seg].end_s) ++seg;
    const auto& s = it.segments[seg];
    p.samples.push_back({t, detail::position_at(s, t), s.kind, static_cast<uint32_t>(seg)});
  }
  return p;
}

}  // namespace transitheat::trajectory
