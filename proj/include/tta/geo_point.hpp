#pragma once

namespace tta {

/// WGS84 geodetic position in degrees.
struct GeoPoint {
  double lat_deg{0.0};
  double lon_deg{0.0};

  bool operator==(const GeoPoint&) const = default;
};

/// Throws DomainError naming the offending coordinate when lat/lon are
/// outside [-90, 90] x [-180, 180] or not finite.
void validate(const GeoPoint& p);

}  // namespace tta
