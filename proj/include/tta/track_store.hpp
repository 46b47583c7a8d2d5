#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "tta/kalman.hpp"
#include "tta/records.hpp"

namespace tta {

struct TrackKey {
  Sensor sensor{Sensor::Camera};
  TargetId id{0};

  auto operator<=>(const TrackKey&) const = default;
};

/// Latest sensor-reported kinematics used for gating (not filtered).
struct GateKinematics {
  double rel_heading_deg{0.0};
  double rel_speed_mps{0.0};
};

struct Track {
  TrackKey key;
  TrackState posterior;  // after the last measurement update
  GateKinematics kinematics;
  std::size_t updates{0};
};

struct FilterConfig {
  double q{0.5};              // acceleration variance per axis
  double r_camera{0.25};      // m^2, per axis
  double r_v2v{2.25};         // m^2, per axis
  double init_vel_var{100.0};  // m^2/s^2
  double staleness_horizon_s{1.0};
};

/// One Kalman filter per (sensor, target id). Single writer.
class TrackStore {
 public:
  explicit TrackStore(const FilterConfig& cfg = {});

  /// Predict-then-update for a known track, initialize an unknown one.
  /// Detections older than their track's last update are dropped and counted;
  /// std::nullopt is returned for them. Tracks unseen for longer than the
  /// staleness horizon (relative to d.t) are retired first.
  std::optional<TrackKey> process_detection(const SensorDetection& d);

  /// Removes tracks whose last update is more than the horizon before now.
  std::vector<TrackKey> retire_stale(double now);

  const Track* find(const TrackKey& key) const;
  const std::map<TrackKey, Track>& tracks() const noexcept { return tracks_; }
  std::size_t size() const noexcept { return tracks_.size(); }

  const KfModel& model(Sensor s) const noexcept { return s == Sensor::V2V ? v2v_ : camera_; }
  const FilterConfig& config() const noexcept { return cfg_; }

  std::size_t dropped_out_of_order() const noexcept { return dropped_out_of_order_; }
  std::size_t retired() const noexcept { return retired_; }

 private:
  FilterConfig cfg_;
  KfModel camera_;
  KfModel v2v_;
  std::map<TrackKey, Track> tracks_;
  std::size_t dropped_out_of_order_{0};
  std::size_t retired_{0};
};

/// Prediction-only estimate at the trigger time; the track is not modified.
/// The returned state carries exactly t_trigger as its timestamp.
/// Throws OrderingError if t_trigger precedes the last update.
TrackState sync_estimate(const Track& track, const KfModel& model, double t_trigger);

/// Free-running trigger: ceil((t_last - t_first) * rate) ticks starting at
/// t_first, spaced 1/rate apart. Tick k is computed as t_first + k / rate so
/// every consumer sees bit-identical timestamps.
std::vector<double> sync_schedule(double t_first, double t_last, double rate_hz);

}  // namespace tta
