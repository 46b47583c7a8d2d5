#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>

#include "tta/association.hpp"

namespace tta {

/// Association confidence in percent: 100 (th - D) / th clamped to [0, 100].
/// Requires th > 0 and D >= 0 (DomainError otherwise).
double confidence(double distance, double th);

/// Tick key on a millisecond grid, shared by truth tables and results.
std::int64_t tick_key(double t);

/// Per sync tick, the camera id each V2V vehicle should be paired with
/// (std::nullopt when the camera does not currently see the vehicle).
class GroundTruthMap {
 public:
  using Pairing = std::map<TargetId, std::optional<TargetId>>;

  /// Throws DomainError if two vehicles map to the same camera id in a tick.
  void set(double t, TargetId vehicle, std::optional<TargetId> camera);

  const std::map<std::int64_t, Pairing>& ticks() const noexcept { return ticks_; }
  const Pairing* at(double t) const;
  double time_of(std::int64_t key) const { return times_.at(key); }
  bool empty() const noexcept { return ticks_.empty(); }

  /// Every camera id ever paired with the vehicle.
  std::set<TargetId> aliases(TargetId vehicle) const;

  bool operator==(const GroundTruthMap&) const = default;

 private:
  std::map<std::int64_t, Pairing> ticks_;
  std::map<std::int64_t, double> times_;
};

struct TmaCounts {
  std::size_t correct{0};
  std::size_t total{0};
  std::size_t no_decision{0};

  /// 100 correct / total, or nullopt with no decisions.
  std::optional<double> percent() const;
};

struct TmaReport {
  std::map<TargetId, TmaCounts> per_vehicle;
  TmaCounts aggregate;
};

/// Track matching accuracy. A decision is correct when the V2V track's
/// cluster is exactly {V2V track, truth camera track}, or a singleton when
/// truth has no camera match. Ticks where the truth camera track is not live,
/// the V2V track is not live, or the vehicle is momentarily unseen while one
/// of its own earlier camera tracks is still coasting are no-decisions.
/// Throws CoverageError if result and truth tick sets differ.
TmaReport tma(std::span<const AssociationResult> results, const GroundTruthMap& truth);

}  // namespace tta
