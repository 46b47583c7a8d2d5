#pragma once

#include <cmath>

#include "tta/geo_point.hpp"
#include "tta/records.hpp"

namespace tta::geodesy {

struct UtmZone {
  int number{0};  // 1..60
  bool north{true};

  bool operator==(const UtmZone&) const = default;
};

struct UtmCoord {
  double easting{0.0};   // m, false easting 500 km
  double northing{0.0};  // m, false northing 10000 km in the south
  UtmZone zone;
};

/// Host pose on the UTM grid. Heading is clockwise from true North; the grid
/// convergence at the host position is cached so the frame rotation can work
/// in grid bearings.
class HostPose {
 public:
  HostPose(const UtmCoord& position, double heading_deg);

  /// Projects the host into its own zone.
  static HostPose from_geo(const GeoPoint& position, double heading_deg);

  const UtmCoord& position() const noexcept { return position_; }
  double heading_deg() const noexcept { return heading_deg_; }
  /// Bearing of grid north measured clockwise from true north.
  double convergence_deg() const noexcept { return convergence_deg_; }
  double grid_heading_deg() const noexcept { return heading_deg_ - convergence_deg_; }

 private:
  UtmCoord position_;
  double heading_deg_;
  double convergence_deg_;

  HostPose(const UtmCoord& position, double heading_deg, double convergence_deg)
      : position_(position), heading_deg_(heading_deg), convergence_deg_(convergence_deg) {}
};

struct Displacement {
  double east{0.0};
  double north{0.0};
};

/// Point in the host frame: x forward, y to the left. Range is cached.
class VehicleFramePoint {
 public:
  VehicleFramePoint(double px, double py) : px_(px), py_(py), range_(std::hypot(px, py)) {}

  double px() const noexcept { return px_; }
  double py() const noexcept { return py_; }
  double range() const noexcept { return range_; }

 private:
  double px_;
  double py_;
  double range_;
};

/// Latitude band covered by UTM.
inline constexpr double kMinUtmLat = -80.0;
inline constexpr double kMaxUtmLat = 84.0;

/// Standard 6-degree zone (no Norway/Svalbard exceptions).
UtmZone utm_zone_for(const GeoPoint& p);

/// WGS84 -> UTM using the 6th-order Krueger series (nanometre accuracy within
/// a zone).
UtmCoord deg2utm(const GeoPoint& p);

/// Projects into an explicit zone; used to bring a remote vehicle that sits
/// across a zone boundary into the host's grid.
UtmCoord deg2utm(const GeoPoint& p, const UtmZone& zone);

GeoPoint utm2deg(const UtmCoord& c);

/// Grid convergence in degrees at p for the given zone.
double grid_convergence_deg(const GeoPoint& p, const UtmZone& zone);

/// Remote minus host. Throws DomainError if the zones differ.
Displacement relative_displacement(const UtmCoord& hv, const UtmCoord& rv);

/// Rotates a grid displacement into the host frame. A target on the host's
/// heading ray lands on py = 0.
VehicleFramePoint global_to_vehicle(const Displacement& d, const HostPose& pose);

/// Inverse of global_to_vehicle.
Displacement vehicle_to_global(double px, double py, const HostPose& pose);

/// Wraps an angle to (-180, 180].
double wrap_deg(double deg);

/// Composes the full V2V transform: both positions to UTM (remote re-projected
/// into the host zone), relative displacement, rotation into the host frame,
/// plus relative heading and speed for gating.
/// Throws StalenessError if |bsm.t - host.t| > max_skew_s.
SensorDetection bsm_to_detection(const HostSample& host, const BsmRecord& bsm, double max_skew_s);

}  // namespace tta::geodesy
