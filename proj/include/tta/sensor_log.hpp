#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "tta/metrics.hpp"
#include "tta/records.hpp"

namespace tta {

/// Emulated or recorded feeds. Each stream is timestamp-ordered.
struct SensorLog {
  std::vector<HostSample> host;
  std::vector<SensorDetection> camera;
  std::vector<BsmRecord> v2v;

  bool empty() const noexcept { return host.empty() && camera.empty() && v2v.empty(); }
  bool operator==(const SensorLog&) const = default;
};

using LogEvent = std::variant<const HostSample*, const BsmRecord*, const SensorDetection*>;

double event_time(const LogEvent& e);

/// All records in timestamp order. At equal timestamps host poses come
/// first, then V2V records, then camera detections.
std::vector<LogEvent> merged_events(const SensorLog& log);

/// Earliest and latest timestamp over all streams; {0, 0} for an empty log.
std::pair<double, double> time_span(const SensorLog& log);

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double v);

namespace log_io {

inline constexpr const char* kCameraFile = "camera.csv";
inline constexpr const char* kV2vFile = "v2v.csv";
inline constexpr const char* kHostFile = "host.csv";
inline constexpr const char* kTruthFile = "truth.csv";

/// Reads camera.csv, v2v.csv and host.csv from dir. Errors carry the file,
/// line and column: ParseError for malformed cells or missing columns,
/// DomainError for out-of-range coordinates, OrderingError for timestamps
/// going backwards within a stream.
SensorLog ingest_log(const std::filesystem::path& dir);

void write_log(const SensorLog& log, const std::filesystem::path& dir);

GroundTruthMap read_truth(const std::filesystem::path& file);
void write_truth(const GroundTruthMap& truth, const std::filesystem::path& file);

}  // namespace log_io
}  // namespace tta
