#include "tta/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tta/errors.hpp"

namespace tta {

double confidence(double distance, double th) {
  if (!(th > 0.0)) throw DomainError("confidence threshold th must be > 0");
  if (!(distance >= 0.0)) throw DomainError("distance must be >= 0");
  return std::clamp(100.0 * ((th - distance) / th), 0.0, 100.0);
}

std::int64_t tick_key(double t) { return std::llround(t * 1000.0); }

void GroundTruthMap::set(double t, TargetId vehicle, std::optional<TargetId> camera) {
  const std::int64_t key = tick_key(t);
  Pairing& p = ticks_[key];
  times_[key] = t;
  if (camera) {
    for (const auto& [v, c] : p) {
      if (v != vehicle && c == camera) {
        std::ostringstream os;
        os << "truth at t=" << t << " maps camera id " << *camera << " to vehicles " << v << " and "
           << vehicle;
        throw DomainError(os.str());
      }
    }
  }
  p[vehicle] = camera;
}

const GroundTruthMap::Pairing* GroundTruthMap::at(double t) const {
  auto it = ticks_.find(tick_key(t));
  return it == ticks_.end() ? nullptr : &it->second;
}

std::set<TargetId> GroundTruthMap::aliases(TargetId vehicle) const {
  std::set<TargetId> out;
  for (const auto& [key, pairing] : ticks_) {
    auto it = pairing.find(vehicle);
    if (it != pairing.end() && it->second) out.insert(*it->second);
  }
  return out;
}

std::optional<double> TmaCounts::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

enum class Decision { Correct, Wrong, None };

Decision judge(const AssociationResult& r, TargetId vehicle, const std::optional<TargetId>& camera,
               const std::set<TargetId>& aliases) {
  const TrackKey v2v{Sensor::V2V, vehicle};
  const Cluster* c = r.cluster_of(v2v);
  if (c == nullptr) return Decision::None;

  if (camera) {
    const TrackKey cam{Sensor::Camera, *camera};
    if (r.cluster_of(cam) == nullptr) return Decision::None;
    return c->members.size() == 2 && c->contains(cam) ? Decision::Correct : Decision::Wrong;
  }
  if (c->members.size() == 1) return Decision::Correct;
  const bool coasting_alias = std::all_of(c->members.begin(), c->members.end(), [&](const TrackKey& k) {
    return k == v2v || (k.sensor == Sensor::Camera && aliases.count(k.id) > 0);
  });
  return coasting_alias ? Decision::None : Decision::Wrong;
}

}  // namespace

TmaReport tma(std::span<const AssociationResult> results, const GroundTruthMap& truth) {
  std::map<std::int64_t, const AssociationResult*> by_tick;
  for (const AssociationResult& r : results) {
    if (!by_tick.emplace(tick_key(r.t), &r).second) {
      std::ostringstream os;
      os << "duplicate association result at t=" << r.t;
      throw CoverageError(os.str());
    }
  }

  std::vector<std::int64_t> missing_results, missing_truth;
  for (const auto& [key, pairing] : truth.ticks()) {
    if (!by_tick.count(key)) missing_results.push_back(key);
  }
  for (const auto& [key, r] : by_tick) {
    if (!truth.ticks().count(key)) missing_truth.push_back(key);
  }
  if (!missing_results.empty() || !missing_truth.empty()) {
    std::ostringstream os;
    os << "tick coverage mismatch";
    auto list = [&os](const char* what, const std::vector<std::int64_t>& keys) {
      if (keys.empty()) return;
      os << "; " << keys.size() << " ticks " << what << " (ms):";
      for (std::size_t i = 0; i < keys.size() && i < 10; ++i) os << ' ' << keys[i];
      if (keys.size() > 10) os << " ...";
    };
    list("missing from results", missing_results);
    list("missing from truth", missing_truth);
    throw CoverageError(os.str());
  }

  std::map<TargetId, std::set<TargetId>> alias_cache;
  TmaReport rep;
  for (const auto& [key, pairing] : truth.ticks()) {
    const AssociationResult& r = *by_tick.at(key);
    for (const auto& [vehicle, camera] : pairing) {
      auto ai = alias_cache.find(vehicle);
      if (ai == alias_cache.end()) ai = alias_cache.emplace(vehicle, truth.aliases(vehicle)).first;
      TmaCounts& counts = rep.per_vehicle[vehicle];
      switch (judge(r, vehicle, camera, ai->second)) {
        case Decision::Correct:
          ++counts.correct;
          ++counts.total;
          break;
        case Decision::Wrong:
          ++counts.total;
          break;
        case Decision::None:
          ++counts.no_decision;
          break;
      }
    }
  }
  for (const auto& [vehicle, c] : rep.per_vehicle) {
    rep.aggregate.correct += c.correct;
    rep.aggregate.total += c.total;
    rep.aggregate.no_decision += c.no_decision;
  }
  return rep;
}

}  // namespace tta
