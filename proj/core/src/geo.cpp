#include "placemotif/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "placemotif/error.hpp"

namespace placemotif {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

bool valid_coordinates(LatLng p) noexcept {
  return std::isfinite(p.lat) && std::isfinite(p.lng) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lng >= -180.0 && p.lng <= 180.0;
}

double haversine_miles(LatLng a, LatLng b) {
  if (!valid_coordinates(a) || !valid_coordinates(b)) {
    std::ostringstream os;
    os << "coordinates out of range: (" << a.lat << ", " << a.lng << ") -> ("
       << b.lat << ", " << b.lng << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = std::sin((lat1 - lat2) / 2.0);
  const double dlng = std::sin((a.lng - b.lng) * kDegToRad / 2.0);
  const double h = dlat * dlat + std::cos(lat1) * std::cos(lat2) * dlng * dlng;
  // Rounding can push h a hair past 1 for antipodal points.
  return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

}  // namespace placemotif
