#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <random>
#include <numbers>

#include "tta/geodesy.hpp"

namespace tta::testing {

std::vector<TrackHistory> worked_example_histories() {
  constexpr double kSpan = 18.0;
  auto entry = [](double x, double y) {
    HistoryEntry e;
    e.state.x << x, y, 0.0, 0.0;
    e.state.P = 0.5 * Mat4::Identity();
    e.state.t = 1.0;
    return e;
  };
  std::vector<TrackHistory> out;
  out.emplace_back(TrackKey{Sensor::V2V, 1}, 1);
  out.back().push(entry(0.0, 0.0));
  out.emplace_back(TrackKey{Sensor::V2V, 2}, 1);
  out.back().push(entry(kSpan, 0.0));
  for (std::size_t i = 0; i < kWorkedExamplePairs.size(); ++i) {
    const double r1 = kWorkedExamplePairs[i][0];
    const double r2 = kWorkedExamplePairs[i][1];
    const double x = (r1 * r1 - r2 * r2 + kSpan * kSpan) / (2.0 * kSpan);
    const double y = std::sqrt(r1 * r1 - x * x);
    out.emplace_back(TrackKey{Sensor::Camera, static_cast<TargetId>(i + 1)}, 1);
    out.back().push(entry(x, y));
  }
  return out;
}

namespace {

constexpr double kSpeed = 10.0;
constexpr double kAhead = 20.0;
constexpr double kHalfGap = 1.0;
constexpr double kGlitchStarts[] = {5.0, 12.0, 19.0, 26.0};
constexpr double kGlitchLength = 0.5;
constexpr double kGlitchMirror = 0.5;
constexpr double kGlitchSigma = 0.5;
constexpr double kDuration = 30.0;
constexpr double kFixtureQ = 30.0;

// The pair starts wider apart and closes to 2 m over the first seconds, so
// the very first tick (single-sample tracks) is not itself ambiguous.
constexpr double kStartHalfGap = 3.0;
constexpr double kMergeTime = 3.0;

std::pair<double, double> half_gap(double t) {
  if (t >= kMergeTime) return {kHalfGap, 0.0};
  const double u = std::numbers::pi * t / kMergeTime;
  const double w = 0.5 * (1.0 + std::cos(u));
  const double dw = -0.5 * std::sin(u) * std::numbers::pi / kMergeTime;
  return {kHalfGap + (kStartHalfGap - kHalfGap) * w, (kStartHalfGap - kHalfGap) * dw};
}

scenario::VehicleTrajectory make(TargetId id, scenario::Role role, double side, double ahead, double rate) {
  const GeoPoint origin{40.0, -83.0};
  const auto o = geodesy::deg2utm(origin);
  scenario::VehicleTrajectory tr;
  tr.id = id;
  tr.role = role;
  const auto count = static_cast<std::size_t>(kDuration * rate) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / rate;
    const auto [g, dg] = half_gap(t);
    // Heading north, so left of the host is west.
    const double ve = -side * dg;
    geodesy::UtmCoord c = o;
    c.easting -= side * g;
    c.northing += ahead + kSpeed * t;
    scenario::PoseSample s;
    s.t = t;
    s.position = geodesy::utm2deg(c);
    s.heading_deg = std::atan2(ve, kSpeed) * 180.0 / std::numbers::pi +
                    geodesy::grid_convergence_deg(s.position, o.zone);
    if (s.heading_deg < 0.0) s.heading_deg += 360.0;
    s.speed_mps = std::hypot(ve, kSpeed);
    tr.samples.push_back(s);
  }
  return tr;
}

bool in_glitch(double t) {
  return std::any_of(std::begin(kGlitchStarts), std::end(kGlitchStarts),
                     [t](double t0) { return t >= t0 && t < t0 + kGlitchLength; });
}

}  // namespace

scenario::Simulation crossing_simulation(std::uint64_t seed) {
  scenario::ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.full_occlusion_below = 0.0;
  cfg.partial_occlusion_below = 0.0;

  scenario::Simulation sim;
  sim.scenario.kind = scenario::Kind::CarFollowing;
  sim.scenario.duration_s = kDuration;
  sim.scenario.vehicles.push_back(make(1, scenario::Role::Host, 0.0, 0.0, cfg.camera_rate_hz));
  sim.scenario.vehicles.push_back(make(101, scenario::Role::Remote, 1.0, kAhead, cfg.camera_rate_hz));
  sim.scenario.vehicles.push_back(make(102, scenario::Role::Remote, -1.0, kAhead, cfg.camera_rate_hz));
  sim.emulation = scenario::emulate_sensors(sim.scenario, cfg);

  // Short bursts where the camera cannot separate the two targets: both are
  // reported close to their common midpoint, each slightly on the other's
  // side.
  std::mt19937_64 rng(seed * 7919 + 17);
  std::normal_distribution<double> noise(0.0, kGlitchSigma);
  for (SensorDetection& d : sim.emulation.log.camera) {
    if (in_glitch(d.t)) {
      d.px = kAhead + noise(rng);
      d.py = -kGlitchMirror * d.py + noise(rng);
    }
  }
  sim.truth = scenario::export_ground_truth(sim.scenario, sim.emulation, cfg.sync_rate_hz);
  return sim;
}

RunConfig crossing_config(std::size_t n) {
  RunConfig cfg;
  cfg.association.buffer_size = n;
  cfg.filter.q = kFixtureQ;
  cfg.input_dir = "unused";
  return cfg;
}

}  // namespace tta::testing
