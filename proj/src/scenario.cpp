#include "tta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "tta/errors.hpp"
#include "tta/geodesy.hpp"
#include "tta/track_store.hpp"

namespace tta::scenario {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr GeoPoint kOrigin{40.0, -83.0};

constexpr TargetId kHostId = 1000;
constexpr TargetId kRv1Id = 1001;
constexpr TargetId kRv2Id = 1002;
constexpr TargetId kFirstParkedId = 2001;

struct Grid {
  double e{0.0};
  double n{0.0};
};

/// Straight or constant-curvature piece. Heading is the grid bearing in
/// radians, clockwise from grid north; positive curvature turns right.
struct Segment {
  Grid start;
  double heading0{0.0};
  double length{0.0};
  double curvature{0.0};

  double heading(double s) const { return heading0 + curvature * s; }

  Grid point(double s) const {
    if (curvature == 0.0) {
      return {start.e + s * std::sin(heading0), start.n + s * std::cos(heading0)};
    }
    const double th = heading(s);
    return {start.e + (std::cos(heading0) - std::cos(th)) / curvature,
            start.n + (std::sin(th) - std::sin(heading0)) / curvature};
  }
};

class Path {
 public:
  Path(Grid start, double heading0, bool closed) : cursor_(start), heading_(heading0), closed_(closed) {}

  Path& straight(double length) { return add(length, 0.0); }
  Path& arc(double radius, double angle_rad) { return add(radius * angle_rad, 1.0 / radius); }

  double length() const { return total_; }

  Grid point(double s) const {
    const auto [seg, u] = locate(s);
    return seg->point(u);
  }
  double heading(double s) const {
    const auto [seg, u] = locate(s);
    return seg->heading(u);
  }
  /// Point shifted `lateral` metres to the left of the direction of travel.
  Grid offset(double s, double lateral) const {
    const auto [seg, u] = locate(s);
    const Grid p = seg->point(u);
    const double th = seg->heading(u);
    return {p.e - lateral * std::cos(th), p.n + lateral * std::sin(th)};
  }

 private:
  Path& add(double length, double curvature) {
    Segment seg{cursor_, heading_, length, curvature};
    cursor_ = seg.point(length);
    heading_ = seg.heading(length);
    segments_.push_back(seg);
    starts_.push_back(total_);
    total_ += length;
    return *this;
  }

  std::pair<const Segment*, double> locate(double s) const {
    if (closed_) {
      s = std::fmod(s, total_);
      if (s < 0.0) s += total_;
    } else {
      s = std::clamp(s, 0.0, total_);
    }
    auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - starts_.begin() - 1, 0));
    return {&segments_[i], s - starts_[i]};
  }

  Grid cursor_;
  double heading_;
  bool closed_;
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double total_{0.0};
};

/// Piecewise-linear speed over time; distance integrates it exactly.
class SpeedProfile {
 public:
  explicit SpeedProfile(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {}

  double distance(double t) const {
    double s = 0.0;
    if (t <= knots_.front().first) return knots_.front().second * (t - knots_.front().first);
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      const auto [t0, v0] = knots_[i - 1];
      const auto [t1, v1] = knots_[i];
      if (t <= t1) {
        const double vt = v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        return s + 0.5 * (v0 + vt) * (t - t0);
      }
      s += 0.5 * (v0 + v1) * (t1 - t0);
    }
    return s + knots_.back().second * (t - knots_.back().first);
  }

 private:
  std::vector<std::pair<double, double>> knots_;
};

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return 0.5 - 0.5 * std::cos(kPi * x);
}

/// 0 before t0, ramps to 1 over [t0, t1], holds, ramps back to 0 over [t2, t3].
double window(double t, double t0, double t1, double t2, double t3) {
  if (t < t1) return smoothstep((t - t0) / (t1 - t0));
  if (t <= t2) return 1.0;
  return 1.0 - smoothstep((t - t2) / (t3 - t2));
}

struct Motion {
  const Path* path{nullptr};
  std::function<double(double)> along;  // arc length at time t
  std::function<double(double)> lateral = [](double) { return 0.0; };
};

geodesy::UtmCoord origin_utm() { return geodesy::deg2utm(kOrigin); }

VehicleTrajectory sample_motion(TargetId id, Role role, double length, double width, const Motion& m,
                                double duration, double rate) {
  const geodesy::UtmCoord o = origin_utm();
  auto grid_at = [&](double t) { return m.path->offset(m.along(t), m.lateral(t)); };

  VehicleTrajectory tr;
  tr.id = id;
  tr.role = role;
  tr.length_m = length;
  tr.width_m = width;
  const auto count = static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
  tr.samples.reserve(count);
  constexpr double h = 1e-3;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / rate;
    const Grid p = grid_at(t);
    const Grid a = grid_at(t - h);
    const Grid b = grid_at(t + h);
    const double de = b.e - a.e, dn = b.n - a.n;
    const double speed = std::hypot(de, dn) / (2.0 * h);
    const double grid_heading = speed > 0.05 ? std::atan2(de, dn) : m.path->heading(m.along(t));

    geodesy::UtmCoord c = o;
    c.easting += p.e;
    c.northing += p.n;
    PoseSample ps;
    ps.t = t;
    ps.position = geodesy::utm2deg(c);
    double heading = grid_heading / kDeg + geodesy::grid_convergence_deg(ps.position, o.zone);
    heading = std::fmod(heading, 360.0);
    if (heading < 0.0) heading += 360.0;
    ps.heading_deg = heading;
    ps.speed_mps = speed;
    tr.samples.push_back(ps);
  }
  return tr;
}

double scenario_duration(const ScenarioConfig& cfg, double fallback) {
  return cfg.duration_s > 0.0 ? cfg.duration_s : fallback;
}

double noise(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return std::mt19937_64(seq);
}

}  // namespace

PoseSample VehicleTrajectory::at(double t) const {
  if (samples.empty()) throw DomainError("trajectory of vehicle " + std::to_string(id) + " is empty");
  if (samples.size() == 1 || t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  const double dt = samples[1].t - samples[0].t;
  const double pos = (t - samples.front().t) / dt;
  const auto k = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - static_cast<double>(k)) < 1e-6 && k < samples.size()) return samples[k];

  const auto i = static_cast<std::size_t>(std::floor(pos));
  const PoseSample& a = samples[i];
  const PoseSample& b = samples[std::min(i + 1, samples.size() - 1)];
  const double w = (t - a.t) / (b.t - a.t);
  PoseSample out;
  out.t = t;
  out.position = {a.position.lat_deg + w * (b.position.lat_deg - a.position.lat_deg),
                  a.position.lon_deg + w * (b.position.lon_deg - a.position.lon_deg)};
  out.heading_deg = a.heading_deg + w * geodesy::wrap_deg(b.heading_deg - a.heading_deg);
  out.heading_deg = std::fmod(out.heading_deg + 360.0, 360.0);
  out.speed_mps = a.speed_mps + w * (b.speed_mps - a.speed_mps);
  return out;
}

Kind parse_kind(const std::string& name) {
  if (name == "car_following") return Kind::CarFollowing;
  if (name == "ima") return Kind::Ima;
  throw ConfigError("unknown scenario '" + name + "' (expected car_following or ima)");
}

std::string to_string(Kind k) { return k == Kind::CarFollowing ? "car_following" : "ima"; }

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
  };
  positive(camera_rate_hz, "camera_rate_hz");
  positive(v2v_rate_hz, "v2v_rate_hz");
  positive(sync_rate_hz, "sync_rate_hz");
  positive(camera_fov_deg, "camera_fov_deg");
  positive(camera_max_range_m, "camera_max_range_m");
  non_negative(duration_s, "duration_s");
  non_negative(camera_sigma_m, "camera_sigma_m");
  non_negative(camera_heading_sigma_deg, "camera_heading_sigma_deg");
  non_negative(camera_speed_sigma_mps, "camera_speed_sigma_mps");
  non_negative(occlusion_bias_frac, "occlusion_bias_frac");
  non_negative(occlusion_sigma_scale, "occlusion_sigma_scale");
  non_negative(gps_sigma_m, "gps_sigma_m");
  non_negative(gps_heading_sigma_deg, "gps_heading_sigma_deg");
  non_negative(gps_speed_sigma_mps, "gps_speed_sigma_mps");
  non_negative(churn_gap_s, "churn_gap_s");
  if (!(full_occlusion_below >= 0.0 && full_occlusion_below <= partial_occlusion_below &&
        partial_occlusion_below <= 1.0)) {
    throw ConfigError("occlusion cutoffs must satisfy 0 <= full_occlusion_below <= partial_occlusion_below <= 1");
  }
}

Scenario gen_car_following(const ScenarioConfig& cfg) {
  cfg.validate();
  const double duration = scenario_duration(cfg, 120.0);
  // Clockwise stadium: two 300 m straights joined by R = 80 m half circles.
  static const Path course = [] {
    Path p({0.0, 0.0}, 0.0, true);
    p.straight(300.0).arc(80.0, kPi).straight(300.0).arc(80.0, kPi);
    return p;
  }();

  const SpeedProfile host_speed(
      {{0.0, 11.0}, {20.0, 13.0}, {40.0, 13.0}, {50.0, 10.0}, {70.0, 10.0}, {85.0, 14.0}, {120.0, 12.0}});
  auto host_s = [host_speed](double t) { return host_speed.distance(t); };
  auto gap1 = [](double t) { return 11.0 + 3.0 * std::sin(2.0 * kPi * t / 37.0); };
  // RV_2 drives ahead of RV_1, a little left in the lane (so RV_1 hides part
  // of it), then pulls into the left lane and runs side by side for a while.
  auto lane2 = [](double t) { return window(t, 44.0, 48.0, 68.0, 72.0); };
  auto beside = [](double t) { return window(t, 48.0, 53.0, 63.0, 68.0); };
  auto gap2 = [=](double t) {
    const double ahead = 7.0 + 2.0 * std::sin(2.0 * kPi * t / 53.0 + 0.7);
    return gap1(t) + (1.0 - beside(t)) * ahead;
  };

  Scenario sc;
  sc.kind = Kind::CarFollowing;
  sc.duration_s = duration;
  const double rate = cfg.camera_rate_hz;

  Motion host{&course, host_s};
  sc.vehicles.push_back(sample_motion(kHostId, Role::Host, 4.9, 1.9, host, duration, rate));

  Motion rv1{&course, [=](double t) { return host_s(t) + gap1(t); }};
  sc.vehicles.push_back(sample_motion(kRv1Id, Role::Remote, 4.8, 1.9, rv1, duration, rate));

  Motion rv2{&course, [=](double t) { return host_s(t) + gap2(t); },
             [=](double t) { return 1.4 + 2.2 * lane2(t); }};
  sc.vehicles.push_back(sample_motion(kRv2Id, Role::Remote, 4.6, 1.8, rv2, duration, rate));

  const double parked_at[] = {60.0, 140.0, 250.0, 620.0, 700.0, 790.0};
  TargetId pid = kFirstParkedId;
  for (double s : parked_at) {
    Motion pv{&course, [s](double) { return s; }, [](double) { return -4.2; }};
    sc.vehicles.push_back(sample_motion(pid++, Role::Parked, 4.5, 1.8, pv, duration, rate));
  }
  return sc;
}

Scenario gen_ima(const ScenarioConfig& cfg) {
  cfg.validate();
  const double duration = scenario_duration(cfg, 30.0);
  // Crossroad along grid east at N = 0. The host drives north in the lane at
  // E = +1.75 and stops with its centre at N = -7.5. RV_1 drives east in the
  // near lane (N = -1.75), RV_2 west in the far lane (N = +1.75); both pass
  // E = +1.75 at t = 15 s, slowed to 2.5 m/s. The approach is slow enough
  // that neither remote vehicle enters the camera's view before it is close
  // to the crossing, so each is seen in one continuous stretch apart from
  // RV_2's occlusion.
  static const Path host_path = [] {
    Path p({1.75, -40.0}, 0.0, false);
    p.straight(200.0);
    return p;
  }();
  const SpeedProfile host_speed({{0.0, 4.0}, {6.125, 4.0}, {10.125, 0.0}, {60.0, 0.0}});

  const SpeedProfile cross_speed({{0.0, 8.0}, {4.0, 8.0}, {8.0, 2.5}, {22.0, 2.5}, {26.0, 8.0}, {60.0, 8.0}});
  const double to_crossing = cross_speed.distance(15.0);
  static const Path east_path = [to_crossing] {
    Path p({1.75 - to_crossing, -1.75}, 0.5 * kPi, false);
    p.straight(400.0);
    return p;
  }();
  static const Path west_path = [to_crossing] {
    Path p({1.75 + to_crossing, 1.75}, 1.5 * kPi, false);
    p.straight(400.0);
    return p;
  }();

  Scenario sc;
  sc.kind = Kind::Ima;
  sc.duration_s = duration;
  const double rate = cfg.camera_rate_hz;

  Motion host{&host_path, [host_speed](double t) { return host_speed.distance(t); }};
  sc.vehicles.push_back(sample_motion(kHostId, Role::Host, 4.9, 1.9, host, duration, rate));
  Motion rv1{&east_path, [cross_speed](double t) { return cross_speed.distance(t); }};
  sc.vehicles.push_back(sample_motion(kRv1Id, Role::Remote, 4.8, 1.9, rv1, duration, rate));
  Motion rv2{&west_path, [cross_speed](double t) { return cross_speed.distance(t); }};
  sc.vehicles.push_back(sample_motion(kRv2Id, Role::Remote, 4.8, 1.9, rv2, duration, rate));
  return sc;
}

Scenario generate(Kind kind, const ScenarioConfig& cfg) {
  return kind == Kind::CarFollowing ? gen_car_following(cfg) : gen_ima(cfg);
}

Emulation emulate_sensors(const Scenario& sc, const ScenarioConfig& cfg) {
  cfg.validate();
  if (sc.vehicles.empty() || sc.vehicles.front().role != Role::Host) {
    throw DomainError("scenario must list the host vehicle first");
  }
  const VehicleTrajectory& host = sc.vehicles.front();
  auto camera_rng = stream(cfg.seed, 1);
  auto gps_rng = stream(cfg.seed, 2);
  auto id_rng = stream(cfg.seed, 3);

  // Camera object ids: a shuffled pool, never reused within a run.
  std::vector<TargetId> id_pool(255);
  for (std::size_t i = 0; i < id_pool.size(); ++i) id_pool[i] = static_cast<TargetId>(i + 1);
  std::shuffle(id_pool.begin(), id_pool.end(), id_rng);
  std::size_t next_id = 0;
  auto fresh_id = [&]() -> TargetId {
    return next_id < id_pool.size() ? id_pool[next_id++] : static_cast<TargetId>(256 + next_id++);
  };

  struct CamTrack {
    bool assigned{false};
    TargetId id{0};
    double last_seen{0.0};
  };
  std::map<TargetId, CamTrack> cam_state;

  Emulation em;
  const double half_fov = 0.5 * cfg.camera_fov_deg * kDeg;
  const auto frames = static_cast<std::size_t>(std::floor(sc.duration_s * cfg.camera_rate_hz + 1e-9)) + 1;

  for (std::size_t k = 0; k < frames; ++k) {
    const double t = static_cast<double>(k) / cfg.camera_rate_hz;
    const PoseSample hp = host.at(t);
    em.log.host.push_back({t, hp.position, hp.heading_deg, hp.speed_mps});
    const auto pose = geodesy::HostPose::from_geo(hp.position, hp.heading_deg);

    struct Seen {
      const VehicleTrajectory* v;
      PoseSample s;
      geodesy::VehicleFramePoint p;
      double rel_heading;
    };
    std::vector<Seen> seen;
    std::vector<Footprint> prints;
    for (std::size_t i = 1; i < sc.vehicles.size(); ++i) {
      const VehicleTrajectory& v = sc.vehicles[i];
      const PoseSample s = v.at(t);
      const auto c = geodesy::deg2utm(s.position, pose.position().zone);
      const auto p = geodesy::global_to_vehicle(geodesy::relative_displacement(pose.position(), c), pose);
      const double rel_heading = geodesy::wrap_deg(s.heading_deg - hp.heading_deg);
      seen.push_back({&v, s, p, rel_heading});
      prints.push_back({p.px(), p.py(), -rel_heading * kDeg, v.length_m, v.width_m});
    }

    CameraFrame frame;
    frame.t = t;
    for (std::size_t i = 0; i < seen.size(); ++i) {
      const Seen& target = seen[i];
      const double bearing = std::atan2(target.p.py(), target.p.px());
      if (!(target.p.px() > 0.0) || std::abs(bearing) > half_fov ||
          target.p.range() > cfg.camera_max_range_m) {
        continue;
      }
      std::vector<Footprint> others;
      for (std::size_t j = 0; j < prints.size(); ++j) {
        if (j != i) others.push_back(prints[j]);
      }
      const double vis = visible_fraction(prints[i], others);
      if (vis < cfg.full_occlusion_below) continue;
      const bool partial = vis < cfg.partial_occlusion_below;

      CamTrack& ct = cam_state[target.v->id];
      if (!ct.assigned || (cfg.id_churn && t - ct.last_seen > cfg.churn_gap_s)) {
        ct.id = fresh_id();
        ct.assigned = true;
      }
      ct.last_seen = t;

      const double sigma = cfg.camera_sigma_m * (partial ? cfg.occlusion_sigma_scale : 1.0);
      const double bias = partial ? cfg.occlusion_bias_frac * target.p.range() : 0.0;
      SensorDetection d;
      d.sensor = Sensor::Camera;
      d.target_id = ct.id;
      d.t = t;
      d.px = target.p.px() + bias + noise(camera_rng, sigma);
      d.py = target.p.py() + noise(camera_rng, sigma);
      d.rel_heading_deg = geodesy::wrap_deg(target.rel_heading + noise(camera_rng, cfg.camera_heading_sigma_deg));
      d.rel_speed_mps = target.s.speed_mps - hp.speed_mps + noise(camera_rng, cfg.camera_speed_sigma_mps);
      // The camera's size estimate is systematically off, which is why size
      // is never used for association.
      d.length_m = 0.85 * target.v->length_m;
      d.width_m = 0.95 * target.v->width_m;
      em.log.camera.push_back(d);
      frame.sightings.push_back({target.v->id, ct.id, vis, partial});
    }
    em.frames.push_back(std::move(frame));
  }

  // BSMs: each remote vehicle broadcasts with its own phase on the camera grid.
  const double period = 1.0 / cfg.v2v_rate_hz;
  std::size_t remote_index = 0;
  for (std::size_t i = 1; i < sc.vehicles.size(); ++i) {
    const VehicleTrajectory& v = sc.vehicles[i];
    if (v.role != Role::Remote) continue;
    const double phase = std::fmod(static_cast<double>(2 * remote_index) / cfg.camera_rate_hz, period);
    ++remote_index;
    for (std::size_t k = 0;; ++k) {
      const double t = phase + static_cast<double>(k) * period;
      if (t > sc.duration_s + 1e-9) break;
      const PoseSample s = v.at(t);
      geodesy::UtmCoord c = geodesy::deg2utm(s.position);
      c.easting += noise(gps_rng, cfg.gps_sigma_m);
      c.northing += noise(gps_rng, cfg.gps_sigma_m);
      BsmRecord b;
      b.t = t;
      b.vehicle_id = v.id;
      b.position = geodesy::utm2deg(c);
      b.heading_deg = std::fmod(s.heading_deg + noise(gps_rng, cfg.gps_heading_sigma_deg) + 360.0, 360.0);
      b.speed_mps = std::max(0.0, s.speed_mps + noise(gps_rng, cfg.gps_speed_sigma_mps));
      b.length_m = v.length_m;
      b.width_m = v.width_m;
      em.log.v2v.push_back(b);
    }
  }
  std::stable_sort(em.log.v2v.begin(), em.log.v2v.end(),
                   [](const BsmRecord& a, const BsmRecord& b) { return a.t < b.t; });
  return em;
}

GroundTruthMap export_ground_truth(const Scenario& sc, const Emulation& em, double sync_rate_hz) {
  GroundTruthMap truth;
  if (em.log.empty()) return truth;
  const auto [t0, t1] = time_span(em.log);
  for (double tick : sync_schedule(t0, t1, sync_rate_hz)) {
    auto it = std::upper_bound(em.frames.begin(), em.frames.end(), tick,
                               [](double t, const CameraFrame& f) { return t < f.t; });
    const CameraFrame* frame = it == em.frames.begin() ? nullptr : &*(it - 1);
    for (const VehicleTrajectory& v : sc.vehicles) {
      if (v.role != Role::Remote) continue;
      std::optional<TargetId> cam;
      if (frame != nullptr) {
        for (const CameraSighting& s : frame->sightings) {
          if (s.vehicle == v.id) cam = s.camera_id;
        }
      }
      truth.set(tick, v.id, cam);
    }
  }
  return truth;
}

Simulation simulate(Kind kind, const ScenarioConfig& cfg) {
  Simulation sim;
  sim.scenario = generate(kind, cfg);
  sim.emulation = emulate_sensors(sim.scenario, cfg);
  sim.truth = export_ground_truth(sim.scenario, sim.emulation, cfg.sync_rate_hz);
  return sim;
}

}  // namespace tta::scenario
