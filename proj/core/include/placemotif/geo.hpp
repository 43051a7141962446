#pragma once

namespace placemotif {

struct LatLng {
  double lat = 0.0;  // degrees
  double lng = 0.0;  // degrees

  friend bool operator==(const LatLng&, const LatLng&) = default;
};

/// Mean Earth radius in statute miles.
inline constexpr double kEarthRadiusMiles = 3958.7613;

bool valid_coordinates(LatLng p) noexcept;

/// Great-circle distance in miles. Throws Error(InvalidArgument) when either
/// point is outside [-90, 90] x [-180, 180].
double haversine_miles(LatLng a, LatLng b);

}  // namespace placemotif
