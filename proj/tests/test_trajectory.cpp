#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "transitheat/trajectory.hpp"

namespace th = transitheat;
using testfx::TempDir;
using th::SegmentKind;

namespace {

th::route::Itinerary fixture_itinerary() {
  TempDir tmp("traj");
  testfx::write_feed(testfx::hand_traced_feed(), tmp.path());
  const auto bundle = th::gtfs::load_feed(tmp.path());
  const auto net = th::net::build_network(bundle);
  const auto mask = net.active_trip_mask({2019, 8, 7});
  th::route::TripQuery q;
  q.origin = testfx::at_north(-239.9);
  q.destination = testfx::at_north(1000 + 119.9);
  q.depart_s = th::timeutil::parse_hms("07:55:00");
  q.service_date = {2019, 8, 7};
  auto res = th::route::plan_trip(net, q, {}, &mask);
  EXPECT_TRUE(res.ok());
  return *res.itinerary;
}

}  // namespace

TEST(Trajectory, FixtureSampleLayout) {
  const auto it = fixture_itinerary();
  const auto p = th::trajectory::expand(it, "fixture");
  ASSERT_EQ(p.size(), 1000u);  // 200 walk + 100 wait + 600 ride + 100 walk
  EXPECT_EQ(p.samples.front().t, it.depart_s);
  EXPECT_EQ(p.samples.back().t, it.arrive_s - 1);
  for (size_t i = 200; i < 300; ++i) {
    EXPECT_EQ(p.samples[i].kind, SegmentKind::wait);
    EXPECT_NEAR(p.samples[i].pos.lat, testfx::at_north(0).lat, 1e-12);  // parked at stop A
  }
  EXPECT_EQ(p.samples[0].kind, SegmentKind::access_walk);
  EXPECT_EQ(p.samples[350].kind, SegmentKind::ride);
  EXPECT_EQ(p.samples[950].kind, SegmentKind::egress_walk);
}

TEST(Trajectory, ZeroLengthItineraryIsEmpty) {
  th::route::Itinerary it;
  it.depart_s = it.arrive_s = 100;
  EXPECT_TRUE(th::trajectory::expand(it).empty());
}

TEST(Trajectory, UniformSpeedInterpolation) {
  // 10 s walk along a 12 m leg: consecutive positions 1.2 m apart.
  th::route::Itinerary it;
  it.depart_s = 0;
  it.arrive_s = 10;
  th::route::TripSegment seg;
  seg.kind = SegmentKind::access_walk;
  seg.start_s = 0;
  seg.end_s = 10;
  seg.from = testfx::at_north(0);
  seg.to = testfx::at_north(12.0);
  seg.waypoints = {{0, seg.from}, {10, seg.to}};
  it.segments.push_back(seg);

  const auto p = th::trajectory::expand(it);
  ASSERT_EQ(p.size(), 10u);
  for (size_t i = 1; i < p.size(); ++i)
    EXPECT_NEAR(th::geo::haversine_m(p.samples[i - 1].pos, p.samples[i].pos), 1.2, 1e-6);
}

TEST(Trajectory, StrictOneHertzAndPartition) {
  const auto it = fixture_itinerary();
  const auto p = th::trajectory::expand(it);
  ASSERT_EQ(p.size(), static_cast<size_t>(it.duration()));
  std::vector<size_t> per_kind(th::kSegmentKindCount, 0);
  for (size_t i = 0; i < p.size(); ++i) {
    if (i > 0) EXPECT_EQ(p.samples[i].t, p.samples[i - 1].t + 1);
    EXPECT_EQ(p.samples[i].kind, it.segments[p.samples[i].segment].kind);
    per_kind[static_cast<size_t>(p.samples[i].kind)]++;
  }
  size_t total = 0;
  for (size_t c : per_kind) total += c;
  EXPECT_EQ(total, p.size());
}

TEST(Trajectory, PositionalContinuityWithinSegments) {
  const auto it = fixture_itinerary();
  const auto p = th::trajectory::expand(it);
  for (size_t i = 1; i < p.size(); ++i) {
    if (p.samples[i].segment != p.samples[i - 1].segment) continue;
    const auto& seg = it.segments[p.samples[i].segment];
    // max leg speed within this segment
    double vmax = 0.0;
    for (size_t w = 1; w < seg.waypoints.size(); ++w) {
      const double dt = seg.waypoints[w].t - seg.waypoints[w - 1].t;
      if (dt <= 0) continue;
      vmax = std::max(vmax, th::geo::haversine_m(seg.waypoints[w - 1].pos,
                                                 seg.waypoints[w].pos) /
                                dt);
    }
    EXPECT_LE(th::geo::haversine_m(p.samples[i - 1].pos, p.samples[i].pos), vmax + 1e-6);
  }
}

TEST(Trajectory, RideInterpolatesThroughIntermediateStops) {
  // A->B->C ride; at B's arrival instant the position is exactly stop B.
  TempDir tmp("traj2");
  testfx::FeedSpec f;
  f.stops = {{"A", testfx::at_north(0)},
             {"B", testfx::at_north(1000)},
             {"C", testfx::at_north(2000)}};
  f.trips = {{"t1",
              "r1",
              "wk",
              {{"A", "08:00:00", "08:00:00"},
               {"B", "08:05:00", "08:06:00"},  // one minute dwell
               {"C", "08:10:00", "08:10:00"}}}};
  testfx::write_feed(f, tmp.path());
  const auto bundle = th::gtfs::load_feed(tmp.path());
  const auto net = th::net::build_network(bundle);
  const auto mask = net.active_trip_mask({2019, 8, 7});
  th::route::TripQuery q;
  q.origin = testfx::at_north(0);
  q.destination = testfx::at_north(2000);
  q.depart_s = th::timeutil::parse_hms("07:59:00");
  q.service_date = {2019, 8, 7};
  th::route::RouterConfig cfg;
  cfg.direct_walk_cutoff_m = 10.0;  // force the ride
  auto res = th::route::plan_trip(net, q, cfg, &mask);
  ASSERT_TRUE(res.ok());
  const auto p = th::trajectory::expand(*res.itinerary);
  const auto stop_b = testfx::at_north(1000);
  for (const auto& s : p.samples) {
    if (s.t == th::timeutil::parse_hms("08:05:00") || s.t == th::timeutil::parse_hms("08:05:30"))
      EXPECT_NEAR(th::geo::haversine_m(s.pos, stop_b), 0.0, 1e-6) << "dwell at B, t=" << s.t;
  }
}
