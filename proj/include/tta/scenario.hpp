#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tta/geo_point.hpp"
#include "tta/metrics.hpp"
#include "tta/sensor_log.hpp"

namespace tta::scenario {

enum class Role { Host, Remote, Parked };

struct PoseSample {
  double t{0.0};
  GeoPoint position;
  double heading_deg{0.0};  // clockwise from true North
  double speed_mps{0.0};
};

/// Uniformly sampled pose sequence of one vehicle.
struct VehicleTrajectory {
  TargetId id{0};
  Role role{Role::Remote};
  double length_m{4.8};
  double width_m{1.9};
  std::vector<PoseSample> samples;

  /// Exact sample when t falls on the sampling grid, otherwise linear
  /// interpolation (heading along the shorter arc). Clamped to the ends.
  PoseSample at(double t) const;
};

enum class Kind { CarFollowing, Ima };

Kind parse_kind(const std::string& name);
std::string to_string(Kind k);

struct ScenarioConfig {
  std::uint64_t seed{1};
  double duration_s{0.0};  // 0 selects the scenario's own length
  double camera_rate_hz{40.0};
  double camera_fov_deg{100.0};
  double camera_max_range_m{100.0};
  double camera_sigma_m{0.3};
  double camera_heading_sigma_deg{2.0};
  double camera_speed_sigma_mps{0.3};
  double occlusion_bias_frac{0.10};   // longitudinal bias as a fraction of range
  double occlusion_sigma_scale{3.0};
  double full_occlusion_below{0.15};  // visible fraction
  double partial_occlusion_below{0.85};
  double v2v_rate_hz{10.0};
  double gps_sigma_m{1.0};
  double gps_heading_sigma_deg{1.0};
  double gps_speed_sigma_mps{0.1};
  bool id_churn{true};
  double churn_gap_s{0.5};
  double sync_rate_hz{10.0};  // tick grid for the exported truth

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Host is always element 0.
struct Scenario {
  Kind kind{Kind::CarFollowing};
  std::vector<VehicleTrajectory> vehicles;
  double duration_s{0.0};
};

/// Scenario I: host follows two remote vehicles around a closed course with
/// straights and gentle curves; parked vehicles on the shoulder; a phase
/// where the remote vehicles run side by side.
Scenario gen_car_following(const ScenarioConfig& cfg);

/// Scenario II: host approaches an intersection from the south and stops;
/// the remote vehicles cross in front of it in opposite directions and the
/// nearer one hides the farther one for a while.
Scenario gen_ima(const ScenarioConfig& cfg);

Scenario generate(Kind kind, const ScenarioConfig& cfg);

/// Rectangle in the host frame: x forward, y left, heading counter-clockwise
/// from +x.
struct Footprint {
  double cx{0.0};
  double cy{0.0};
  double heading_rad{0.0};
  double length{4.8};
  double width{1.9};
};

/// Fraction of the target's angular extent, seen from the origin, that is
/// not covered by footprints nearer than the target.
double visible_fraction(const Footprint& target, std::span<const Footprint> others);

/// What the camera reported about one vehicle in one frame.
struct CameraSighting {
  TargetId vehicle{0};
  TargetId camera_id{0};
  double visible_fraction{1.0};
  bool partial{false};
};

struct CameraFrame {
  double t{0.0};
  std::vector<CameraSighting> sightings;
};

struct Emulation {
  SensorLog log;
  std::vector<CameraFrame> frames;
};

Emulation emulate_sensors(const Scenario& sc, const ScenarioConfig& cfg);

/// Per sync tick, each remote vehicle's camera id in the latest camera frame
/// at or before the tick; none when that frame did not see it.
GroundTruthMap export_ground_truth(const Scenario& sc, const Emulation& em, double sync_rate_hz);

struct Simulation {
  Scenario scenario;
  Emulation emulation;
  GroundTruthMap truth;
};

Simulation simulate(Kind kind, const ScenarioConfig& cfg);

}  // namespace tta::scenario
