#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "tta/association.hpp"
#include "tta/scenario.hpp"
#include "tta/track_store.hpp"

namespace tta {

/// Everything one pipeline run needs. Serialized as a flat JSON object whose
/// keys are listed in README.md.
struct RunConfig {
  double sync_rate_hz{10.0};
  FilterConfig filter;
  AssociationConfig association;
  std::optional<scenario::Kind> scenario;
  std::optional<std::filesystem::path> input_dir;
  std::filesystem::path out_dir;
  scenario::ScenarioConfig sim;  // seed lives here

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Overlays the keys present in `doc` onto cfg. Unknown keys and values of
/// the wrong type are ConfigErrors.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

/// `key=value`; the value is read as JSON when it parses, else as a string.
void apply_override(RunConfig& cfg, const std::string& assignment);

RunConfig load_config(const std::filesystem::path& file);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace tta
