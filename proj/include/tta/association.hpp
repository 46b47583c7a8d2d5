#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tta/kalman.hpp"
#include "tta/track_store.hpp"

namespace tta {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct HistoryEntry {
  TrackState state;
  GateKinematics kinematics;
};

/// Ring of the last n synchronized estimates of one track, newest last.
class TrackHistory {
 public:
  TrackHistory(TrackKey owner, std::size_t capacity);

  /// Throws OrderingError unless the entry is strictly newer than the latest.
  void push(const HistoryEntry& e);

  const TrackKey& owner() const noexcept { return owner_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::deque<HistoryEntry>& entries() const noexcept { return entries_; }
  const HistoryEntry& latest() const { return entries_.back(); }

 private:
  TrackKey owner_;
  std::size_t capacity_;
  std::deque<HistoryEntry> entries_;
};

/// Mahalanobis distance between two same-time estimates using the summed
/// covariance. Throws NumericError (with rcond) if Pa + Pb is singular and
/// OrderingError if the timestamps differ.
double mahalanobis_step(const TrackState& a, const TrackState& b);

/// Mean of the per-tick distances over ticks present in both histories.
/// std::nullopt when the histories share no tick.
std::optional<double> track_distance(const TrackHistory& a, const TrackHistory& b);

struct GateConfig {
  double speed_mps{3.0};
  double heading_deg{45.0};
};

enum class GateReason { None, Speed, Heading };

const char* to_string(GateReason r);

struct GateResult {
  bool pass{true};
  GateReason reason{GateReason::None};
};

/// Compares the latest relative speed and wrapped relative heading.
GateResult gate_check(const TrackHistory& a, const TrackHistory& b, const GateConfig& gates);

struct GateRejection {
  TrackKey a;
  TrackKey b;
  GateReason reason{GateReason::None};
};

/// N x N track-to-track distances. Only strictly-lower-triangle cells between
/// different sensors can be finite. Labels put V2V tracks first.
class TtdMatrix {
 public:
  TtdMatrix() = default;
  explicit TtdMatrix(std::vector<TrackKey> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<TrackKey>& labels() const noexcept { return labels_; }
  double at(std::size_t row, std::size_t col) const { return cells_[row * size() + col]; }
  void set(std::size_t row, std::size_t col, double v) { cells_[row * size() + col] = v; }
  bool any_finite() const;

  std::vector<GateRejection> gate_rejections;

 private:
  std::vector<TrackKey> labels_;
  std::vector<double> cells_;
};

/// Reference single-threaded build.
TtdMatrix build_ttd_matrix_serial(std::span<const TrackHistory* const> tracks, double threshold,
                                  const GateConfig& gates);

/// Row-parallel build (OpenMP when enabled); result is identical to the
/// serial build regardless of thread count.
TtdMatrix build_ttd_matrix(std::span<const TrackHistory* const> tracks, double threshold,
                           const GateConfig& gates);

struct Cluster {
  std::vector<TrackKey> members;
  std::optional<double> distance;    // D of the pick that formed the cluster
  std::optional<double> confidence;  // percent, filled by associate_tick

  bool contains(const TrackKey& k) const;
};

/// Greedy minimum extraction over the matrix. Clusters come out in pick
/// order, followed by singletons for every unclustered track in label order.
/// Exact ties go to the lowest (row, column).
std::vector<Cluster> cluster_tracks(const TtdMatrix& m);

struct AssociationConfig {
  double threshold{8.0};
  GateConfig gates;
  double confidence_th{8.0};
  std::size_t buffer_size{10};
};

struct AssociationResult {
  double t{0.0};
  std::vector<Cluster> clusters;
  std::vector<GateRejection> gate_rejections;

  /// Cluster containing the track, or nullptr.
  const Cluster* cluster_of(const TrackKey& k) const;
};

AssociationResult associate_tick(std::span<const TrackHistory* const> histories, double t,
                                 const AssociationConfig& cfg);

}  // namespace tta
