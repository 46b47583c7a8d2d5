#pragma once

#include <cstdint>
#include <string_view>

#include "tta/geo_point.hpp"

namespace tta {

/// Sensor ids follow the T_ij naming of the association matrix: V2V is
/// sensor 1 and occupies the lower matrix indices, camera is sensor 2.
enum class Sensor : std::uint8_t { V2V = 1, Camera = 2 };

std::string_view to_string(Sensor s);

using TargetId = std::int64_t;

/// One time-stamped target observation in the host-vehicle frame, normalized
/// from either sensor. Length and width are carried for reporting only.
struct SensorDetection {
  Sensor sensor{Sensor::Camera};
  TargetId target_id{0};
  double t{0.0};
  double px{0.0};  // m, longitudinal, forward positive
  double py{0.0};  // m, lateral, left positive
  double rel_heading_deg{0.0};  // target heading minus host heading, clockwise positive
  double rel_speed_mps{0.0};    // target ground speed minus host ground speed
  double length_m{0.0};
  double width_m{0.0};

  bool operator==(const SensorDetection&) const = default;
};

/// Simplified Basic Safety Message: the fields of a remote vehicle broadcast
/// that the association pipeline consumes.
struct BsmRecord {
  double t{0.0};
  TargetId vehicle_id{0};
  GeoPoint position;
  double heading_deg{0.0};  // clockwise from true North
  double speed_mps{0.0};
  double length_m{0.0};
  double width_m{0.0};

  bool operator==(const BsmRecord&) const = default;
};

/// Host vehicle's own global pose and speed.
struct HostSample {
  double t{0.0};
  GeoPoint position;
  double heading_deg{0.0};
  double speed_mps{0.0};

  bool operator==(const HostSample&) const = default;
};

}  // namespace tta
