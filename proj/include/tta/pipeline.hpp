#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "tta/association.hpp"
#include "tta/config.hpp"
#include "tta/metrics.hpp"
#include "tta/sensor_log.hpp"

namespace tta {

/// ingested == consumed + dropped_out_of_order + dropped_no_host_pose.
struct PipelineCounters {
  std::size_t detections_ingested{0};
  std::size_t consumed{0};
  std::size_t dropped_out_of_order{0};
  std::size_t dropped_no_host_pose{0};
  std::size_t gate_rejections{0};
  std::size_t singleton_clusters{0};
  std::size_t tracks_retired{0};

  bool operator==(const PipelineCounters&) const = default;
};

struct ConfidenceRange {
  double min{0.0};
  double max{0.0};
  std::size_t ticks{0};
};

struct RunReport {
  std::vector<AssociationResult> timeline;  // one entry per sync trigger
  std::vector<std::size_t> live_tracks;     // parallel to timeline
  PipelineCounters counters;
  std::optional<TmaReport> tma;  // only when ground truth is available

  /// Per V2V vehicle, over the ticks where it sat in a cluster.
  std::map<TargetId, ConfidenceRange> confidence_by_vehicle() const;
};

/// Replays the log through filtering, buffering and association.
RunReport run_pipeline(const SensorLog& log, const RunConfig& cfg, const GroundTruthMap* truth = nullptr);

/// Simulates cfg.scenario or ingests cfg.input_dir (plus its truth.csv when
/// present), then replays.
RunReport run_pipeline(const RunConfig& cfg);

/// Writes report.json, timeline.csv and confidence.csv into dir.
void emit_report(const RunReport& report, const std::filesystem::path& dir);

inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kTimelineFile = "timeline.csv";
inline constexpr const char* kConfidenceFile = "confidence.csv";

}  // namespace tta
