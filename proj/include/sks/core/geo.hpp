#pragma once

#include <algorithm>
#include <cmath>

namespace sks {

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  bool operator==(const GeoPoint&) const = default;
};

inline constexpr double kEarthRadiusMeters = 6371008.8;

/// Great-circle distance in meters (haversine).
inline double great_circle_meters(const GeoPoint& a, const GeoPoint& b) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(s)));
}

}  // namespace sks
