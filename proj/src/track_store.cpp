#include "tta/track_store.hpp"

#include <cmath>
#include <sstream>

#include "tta/errors.hpp"

namespace tta {
namespace {

Mat2 diag2(double v) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = m(1, 1) = v;
  return m;
}

void check_finite(const SensorDetection& d) {
  const double fields[] = {d.t, d.px, d.py, d.rel_heading_deg, d.rel_speed_mps};
  for (double v : fields) {
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "non-finite field in " << to_string(d.sensor) << " detection of target " << d.target_id;
      throw DomainError(os.str());
    }
  }
}

}  // namespace

TrackStore::TrackStore(const FilterConfig& cfg)
    : cfg_(cfg), camera_(cfg.q, diag2(cfg.r_camera)), v2v_(cfg.q, diag2(cfg.r_v2v)) {
  if (!(cfg.init_vel_var > 0.0)) throw ConfigError("init_vel_var must be > 0");
  if (!(cfg.staleness_horizon_s > 0.0)) throw ConfigError("staleness_horizon_s must be > 0");
}

std::optional<TrackKey> TrackStore::process_detection(const SensorDetection& d) {
  check_finite(d);
  retire_stale(d.t);

  const TrackKey key{d.sensor, d.target_id};
  const KfModel& m = model(d.sensor);
  const Vec2 z(d.px, d.py);

  auto it = tracks_.find(key);
  if (it == tracks_.end()) {
    Track tr;
    tr.key = key;
    tr.posterior.t = d.t;
    tr.posterior.x << d.px, d.py, 0.0, 0.0;
    tr.posterior.P = Mat4::Zero();
    tr.posterior.P.topLeftCorner<2, 2>() = m.R();
    tr.posterior.P(2, 2) = tr.posterior.P(3, 3) = cfg_.init_vel_var;
    tr.kinematics = {d.rel_heading_deg, d.rel_speed_mps};
    tr.updates = 1;
    tracks_.emplace(key, tr);
    return key;
  }

  Track& tr = it->second;
  if (d.t < tr.posterior.t) {
    ++dropped_out_of_order_;
    return std::nullopt;
  }
  TrackState pred = kf_predict(tr.posterior, m, d.t - tr.posterior.t);
  pred.t = d.t;
  tr.posterior = kf_update(pred, m, z);
  tr.kinematics = {d.rel_heading_deg, d.rel_speed_mps};
  ++tr.updates;
  return key;
}

std::vector<TrackKey> TrackStore::retire_stale(double now) {
  std::vector<TrackKey> gone;
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    if (now - it->second.posterior.t > cfg_.staleness_horizon_s) {
      gone.push_back(it->first);
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
  retired_ += gone.size();
  return gone;
}

const Track* TrackStore::find(const TrackKey& key) const {
  auto it = tracks_.find(key);
  return it == tracks_.end() ? nullptr : &it->second;
}

TrackState sync_estimate(const Track& track, const KfModel& model, double t_trigger) {
  const double dt = t_trigger - track.posterior.t;
  if (dt < 0.0) {
    std::ostringstream os;
    os << "sync trigger t=" << t_trigger << " precedes last update t=" << track.posterior.t
       << " of " << to_string(track.key.sensor) << " track " << track.key.id;
    throw OrderingError(os.str());
  }
  TrackState s = kf_predict(track.posterior, model, dt);
  s.t = t_trigger;
  return s;
}

std::vector<double> sync_schedule(double t_first, double t_last, double rate_hz) {
  if (!(rate_hz > 0.0)) throw ConfigError("sync rate must be > 0");
  if (t_last < t_first) throw OrderingError("sync schedule end precedes start");
  const double count = std::ceil((t_last - t_first) * rate_hz - 1e-9);
  std::vector<double> ticks;
  ticks.reserve(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) {
    ticks.push_back(t_first + static_cast<double>(k) / rate_hz);
  }
  return ticks;
}

}  // namespace tta
