#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "tta/errors.hpp"
#include "tta/geodesy.hpp"
#include "tta/scenario.hpp"

using namespace tta;
using namespace tta::scenario;

namespace {

bool inside(const Footprint& f, double x, double y) {
  const double dx = x - f.cx, dy = y - f.cy;
  const double c = std::cos(f.heading_rad), s = std::sin(f.heading_rad);
  const double u = dx * c + dy * s, v = -dx * s + dy * c;
  return std::abs(u) <= 0.5 * f.length && std::abs(v) <= 0.5 * f.width;
}

// Marches rays from the origin in 1 cm steps. A ray that meets the target is
// hidden when it first meets a footprint whose centre is nearer.
double ray_oracle(const Footprint& target, const std::vector<Footprint>& others) {
  const double range = std::hypot(target.cx, target.cy);
  double lo = 10.0, hi = -10.0;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const double c = std::cos(target.heading_rad), s = std::sin(target.heading_rad);
      const double x = target.cx + sx * 0.5 * target.length * c - sy * 0.5 * target.width * s;
      const double y = target.cy + sx * 0.5 * target.length * s + sy * 0.5 * target.width * c;
      lo = std::min(lo, std::atan2(y, x));
      hi = std::max(hi, std::atan2(y, x));
    }
  }
  const int rays = 800;
  int seen = 0;
  for (int i = 0; i < rays; ++i) {
    const double b = lo + (hi - lo) * (i + 0.5) / rays;
    const double cb = std::cos(b), sb = std::sin(b);
    bool hidden = false;
    for (double r = 0.0; r < range + target.length; r += 0.01) {
      const double x = r * cb, y = r * sb;
      if (inside(target, x, y)) break;
      for (const auto& o : others) {
        if (std::hypot(o.cx, o.cy) < range && inside(o, x, y)) {
          hidden = true;
          break;
        }
      }
      if (hidden) break;
    }
    if (!hidden) ++seen;
  }
  return static_cast<double>(seen) / rays;
}

ScenarioConfig quiet() {
  ScenarioConfig c;
  c.camera_sigma_m = 0.0;
  c.camera_heading_sigma_deg = 0.0;
  c.camera_speed_sigma_mps = 0.0;
  c.gps_sigma_m = 0.0;
  c.gps_heading_sigma_deg = 0.0;
  c.gps_speed_sigma_mps = 0.0;
  c.full_occlusion_below = 0.0;
  c.partial_occlusion_below = 0.0;
  return c;
}

std::map<TargetId, std::set<TargetId>> camera_ids_by_vehicle(const Emulation& em) {
  std::map<TargetId, std::set<TargetId>> out;
  for (const auto& f : em.frames) {
    for (const auto& s : f.sightings) out[s.vehicle].insert(s.camera_id);
  }
  return out;
}

}  // namespace

TEST(Occlusion, MatchesRayMarchingOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> far(15.0, 30.0), lat(-4.0, 4.0), near(4.0, 13.0),
      yaw(-0.6, 0.6);
  int partial = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Footprint target{far(rng), lat(rng), yaw(rng), 4.8, 1.9};
    std::vector<Footprint> others;
    for (int k = 0; k < 3; ++k) others.push_back({near(rng), lat(rng), yaw(rng), 4.5, 1.8});
    // One decoy behind the target must not count.
    others.push_back({target.cx + 8.0, target.cy, 0.0, 4.8, 1.9});
    const double v = visible_fraction(target, others);
    EXPECT_NEAR(v, ray_oracle(target, others), 0.01) << "trial " << trial;
    if (v > 0.02 && v < 0.98) ++partial;
  }
  EXPECT_GE(partial, 5);
}

TEST(Occlusion, Extremes) {
  const Footprint target{20.0, 0.0, 0.0, 4.8, 1.9};
  EXPECT_EQ(visible_fraction(target, {}), 1.0);
  const std::vector<Footprint> wall{{5.0, 0.0, 0.0, 1.0, 10.0}};
  EXPECT_EQ(visible_fraction(target, wall), 0.0);
}

TEST(Scenario, SameSeedSameOutputDifferentSeedDifferentNoise) {
  ScenarioConfig c;
  c.duration_s = 8.0;
  c.seed = 5;
  const Simulation a = simulate(Kind::CarFollowing, c);
  const Simulation b = simulate(Kind::CarFollowing, c);
  EXPECT_EQ(a.emulation.log, b.emulation.log);
  EXPECT_EQ(a.truth, b.truth);
  c.seed = 6;
  EXPECT_NE(simulate(Kind::CarFollowing, c).emulation.log, a.emulation.log);
}

TEST(Scenario, NoiselessCameraAgreesWithTheV2vTransform) {
  ScenarioConfig c = quiet();
  c.duration_s = 20.0;
  const Scenario sc = generate(Kind::CarFollowing, c);
  const Emulation em = emulate_sensors(sc, c);
  const VehicleTrajectory& host = sc.vehicles[0];

  std::size_t checked = 0;
  std::size_t det_index = 0;
  for (const CameraFrame& f : em.frames) {
    for (const CameraSighting& s : f.sightings) {
      while (det_index < em.log.camera.size() &&
             !(em.log.camera[det_index].t == f.t && em.log.camera[det_index].target_id == s.camera_id)) {
        ++det_index;
      }
      ASSERT_LT(det_index, em.log.camera.size());
      const SensorDetection& d = em.log.camera[det_index];
      const auto* rv = [&]() -> const VehicleTrajectory* {
        for (const auto& v : sc.vehicles) {
          if (v.id == s.vehicle) return &v;
        }
        return nullptr;
      }();
      ASSERT_NE(rv, nullptr);
      const PoseSample hp = host.at(f.t), rp = rv->at(f.t);
      const SensorDetection ref = geodesy::bsm_to_detection(
          {f.t, hp.position, hp.heading_deg, hp.speed_mps},
          {f.t, rv->id, rp.position, rp.heading_deg, rp.speed_mps, rv->length_m, rv->width_m}, 0.0);
      ASSERT_NEAR(d.px, ref.px, 1e-6);
      ASSERT_NEAR(d.py, ref.py, 1e-6);
      ASSERT_NEAR(d.rel_heading_deg, ref.rel_heading_deg, 1e-6);
      ASSERT_NEAR(d.rel_speed_mps, ref.rel_speed_mps, 1e-6);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Scenario, BsmRateAndParkedVehiclesAreSilent) {
  ScenarioConfig c;
  c.duration_s = 10.0;
  const Simulation sim = simulate(Kind::CarFollowing, c);
  std::map<TargetId, std::size_t> count;
  for (const auto& b : sim.emulation.log.v2v) ++count[b.vehicle_id];
  std::size_t remotes = 0;
  for (const auto& v : sim.scenario.vehicles) {
    if (v.role == Role::Parked) {
      EXPECT_EQ(count.count(v.id), 0u) << "parked vehicle " << v.id << " broadcast";
    }
    if (v.role == Role::Remote) {
      ++remotes;
      EXPECT_NEAR(static_cast<double>(count[v.id]), 100.0, 1.0) << "vehicle " << v.id;
    }
  }
  EXPECT_EQ(remotes, 2u);
  EXPECT_TRUE(std::is_sorted(sim.emulation.log.v2v.begin(), sim.emulation.log.v2v.end(),
                             [](const auto& a, const auto& b) { return a.t < b.t; }));
}

TEST(Scenario, CameraOnlyReportsInsideTheFieldOfView) {
  for (Kind k : {Kind::CarFollowing, Kind::Ima}) {
    ScenarioConfig c = quiet();
    const Simulation sim = simulate(k, c);
    ASSERT_FALSE(sim.emulation.log.camera.empty());
    for (const auto& d : sim.emulation.log.camera) {
      const double bearing = std::atan2(d.py, d.px) * 180.0 / std::numbers::pi;
      ASSERT_LE(std::abs(bearing), 0.5 * c.camera_fov_deg + 1e-6) << to_string(k) << " t=" << d.t;
      ASSERT_LE(std::hypot(d.px, d.py), c.camera_max_range_m + 1e-6);
    }
  }
}

TEST(Scenario, ImaOccludedVehicleReappearsUnderANewCameraId) {
  ScenarioConfig c;
  c.seed = 1;
  const Simulation sim = simulate(Kind::Ima, c);
  const auto ids = camera_ids_by_vehicle(sim.emulation);
  const TargetId rv1 = sim.scenario.vehicles[1].id;
  const TargetId rv2 = sim.scenario.vehicles[2].id;
  ASSERT_TRUE(ids.count(rv1) && ids.count(rv2));
  EXPECT_EQ(ids.at(rv1).size(), 1u);
  EXPECT_GE(ids.at(rv2).size(), 2u);
  for (TargetId id : ids.at(rv1)) EXPECT_EQ(ids.at(rv2).count(id), 0u);
}

TEST(Scenario, TruthFollowsTheCameraFrames) {
  ScenarioConfig c;
  c.seed = 2;
  const Simulation sim = simulate(Kind::Ima, c);
  ASSERT_FALSE(sim.truth.empty());
  for (const auto& [key, pairing] : sim.truth.ticks()) {
    EXPECT_EQ(pairing.size(), 2u);
  }
}

TEST(Scenario, ConfigValidationAndKindNames) {
  ScenarioConfig c;
  c.camera_rate_hz = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.partial_occlusion_below = 0.1;
  c.full_occlusion_below = 0.2;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(parse_kind("ima"), Kind::Ima);
  EXPECT_EQ(parse_kind(to_string(Kind::CarFollowing)), Kind::CarFollowing);
  EXPECT_THROW(parse_kind("roundabout"), ConfigError);
}

TEST(Trajectory, InterpolatesAndClamps) {
  VehicleTrajectory tr;
  tr.samples.push_back({0.0, {40.0, -83.0}, 350.0, 10.0});
  tr.samples.push_back({1.0, {40.001, -83.0}, 10.0, 12.0});
  const PoseSample mid = tr.at(0.5);
  EXPECT_NEAR(mid.position.lat_deg, 40.0005, 1e-12);
  EXPECT_NEAR(mid.heading_deg, 0.0, 1e-9);
  EXPECT_NEAR(mid.speed_mps, 11.0, 1e-12);
  EXPECT_EQ(tr.at(-1.0).speed_mps, 10.0);
  EXPECT_EQ(tr.at(5.0).speed_mps, 12.0);
}
