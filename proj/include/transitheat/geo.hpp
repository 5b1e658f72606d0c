#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace transitheat::geo {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kMetersPerDegLat = kEarthRadiusM * 3.14159265358979323846 / 180.0;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline double deg2rad(double d) { return d * 3.14159265358979323846 / 180.0; }

inline double haversine_m(const LatLon& a, const LatLon& b) {
  const double p1 = deg2rad(a.lat), p2 = deg2rad(b.lat);
  const double dp = deg2rad(b.lat - a.lat), dl = deg2rad(b.lon - a.lon);
  const double s = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(s));
}

inline LatLon lerp(const LatLon& a, const LatLon& b, double f) {
  return {a.lat + (b.lat - a.lat) * f, a.lon + (b.lon - a.lon) * f};
}

// Offset a point by (east_m, north_m). Good to centimetres at city scale.
inline LatLon offset_m(const LatLon& p, double east_m, double north_m) {
  const double lat = p.lat + north_m / kMetersPerDegLat;
  const double lon = p.lon + east_m / (kMetersPerDegLat * std::cos(deg2rad(p.lat)));
  return {lat, lon};
}

struct BBox {
  double min_lat = -90.0, min_lon = -180.0, max_lat = 90.0, max_lon = 180.0;
  bool contains(const LatLon& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

namespace detail {
inline bool on_segment(const LatLon& p, const LatLon& a, const LatLon& b) {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (std::fabs(cross) > 1e-12) return false;
  const double dot = (p.lon - a.lon) * (b.lon - a.lon) + (p.lat - a.lat) * (b.lat - a.lat);
  const double len2 = (b.lon - a.lon) * (b.lon - a.lon) + (b.lat - a.lat) * (b.lat - a.lat);
  return dot >= -1e-12 && dot <= len2 + 1e-12;
}
}  // namespace detail

// Ray casting; points exactly on an edge or vertex count as inside.
inline bool point_in_polygon(const LatLon& p, const std::vector<LatLon>& ring) {
  const size_t n = ring.size();
  if (n < 3) return false;
  for (size_t i = 0, j = n - 1; i < n; j = i++)
    if (detail::on_segment(p, ring[j], ring[i])) return true;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const LatLon& a = ring[i];
    const LatLon& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace transitheat::geo
