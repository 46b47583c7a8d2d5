#include "tta/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "tta/errors.hpp"

namespace tta {
namespace {

using nlohmann::json;
using Setter = std::function<void(RunConfig&, const json&)>;

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number, got " + v.dump());
  return v.get<double>();
}

std::uint64_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(key + ": expected a non-negative integer, got " + v.dump());
  }
  return v.get<std::uint64_t>();
}

bool boolean(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw ConfigError(key + ": expected true or false, got " + v.dump());
  return v.get<bool>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + ": expected a string, got " + v.dump());
  return v.get<std::string>();
}

template <class T>
Setter num(T RunConfig::*group, double T::*field, const char* key) {
  return [=](RunConfig& c, const json& v) { (c.*group).*field = number(v, key); };
}

Setter sim(double scenario::ScenarioConfig::*field, const char* key) {
  return [=](RunConfig& c, const json& v) { c.sim.*field = number(v, key); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["sync_rate_hz"] = [](RunConfig& c, const json& v) {
      c.sync_rate_hz = number(v, "sync_rate_hz");
      c.sim.sync_rate_hz = c.sync_rate_hz;
    };
    t["q_accel"] = num(&RunConfig::filter, &FilterConfig::q, "q_accel");
    t["r_camera_m2"] = num(&RunConfig::filter, &FilterConfig::r_camera, "r_camera_m2");
    t["r_v2v_m2"] = num(&RunConfig::filter, &FilterConfig::r_v2v, "r_v2v_m2");
    t["init_vel_var"] = num(&RunConfig::filter, &FilterConfig::init_vel_var, "init_vel_var");
    t["staleness_horizon_s"] = num(&RunConfig::filter, &FilterConfig::staleness_horizon_s, "staleness_horizon_s");
    t["ttd_threshold"] = [](RunConfig& c, const json& v) {
      if (v.is_string() && v.get<std::string>() == "inf") {
        c.association.threshold = kInf;
      } else {
        c.association.threshold = number(v, "ttd_threshold");
      }
    };
    t["buffer_size"] = [](RunConfig& c, const json& v) {
      c.association.buffer_size = static_cast<std::size_t>(count(v, "buffer_size"));
    };
    t["gate_speed_mps"] = [](RunConfig& c, const json& v) {
      c.association.gates.speed_mps = number(v, "gate_speed_mps");
    };
    t["gate_heading_deg"] = [](RunConfig& c, const json& v) {
      c.association.gates.heading_deg = number(v, "gate_heading_deg");
    };
    t["confidence_th"] = num(&RunConfig::association, &AssociationConfig::confidence_th, "confidence_th");
    t["scenario"] = [](RunConfig& c, const json& v) {
      if (v.is_null()) {
        c.scenario.reset();
      } else {
        c.scenario = scenario::parse_kind(text(v, "scenario"));
      }
    };
    t["input_dir"] = [](RunConfig& c, const json& v) {
      if (v.is_null()) {
        c.input_dir.reset();
      } else {
        c.input_dir = text(v, "input_dir");
      }
    };
    t["out_dir"] = [](RunConfig& c, const json& v) { c.out_dir = text(v, "out_dir"); };
    t["seed"] = [](RunConfig& c, const json& v) { c.sim.seed = count(v, "seed"); };
    t["duration_s"] = sim(&scenario::ScenarioConfig::duration_s, "duration_s");
    t["camera_rate_hz"] = sim(&scenario::ScenarioConfig::camera_rate_hz, "camera_rate_hz");
    t["camera_fov_deg"] = sim(&scenario::ScenarioConfig::camera_fov_deg, "camera_fov_deg");
    t["camera_max_range_m"] = sim(&scenario::ScenarioConfig::camera_max_range_m, "camera_max_range_m");
    t["camera_sigma_m"] = sim(&scenario::ScenarioConfig::camera_sigma_m, "camera_sigma_m");
    t["camera_heading_sigma_deg"] =
        sim(&scenario::ScenarioConfig::camera_heading_sigma_deg, "camera_heading_sigma_deg");
    t["camera_speed_sigma_mps"] = sim(&scenario::ScenarioConfig::camera_speed_sigma_mps, "camera_speed_sigma_mps");
    t["occlusion_bias_frac"] = sim(&scenario::ScenarioConfig::occlusion_bias_frac, "occlusion_bias_frac");
    t["occlusion_sigma_scale"] = sim(&scenario::ScenarioConfig::occlusion_sigma_scale, "occlusion_sigma_scale");
    t["full_occlusion_below"] = sim(&scenario::ScenarioConfig::full_occlusion_below, "full_occlusion_below");
    t["partial_occlusion_below"] =
        sim(&scenario::ScenarioConfig::partial_occlusion_below, "partial_occlusion_below");
    t["v2v_rate_hz"] = sim(&scenario::ScenarioConfig::v2v_rate_hz, "v2v_rate_hz");
    t["gps_sigma_m"] = sim(&scenario::ScenarioConfig::gps_sigma_m, "gps_sigma_m");
    t["gps_heading_sigma_deg"] = sim(&scenario::ScenarioConfig::gps_heading_sigma_deg, "gps_heading_sigma_deg");
    t["gps_speed_sigma_mps"] = sim(&scenario::ScenarioConfig::gps_speed_sigma_mps, "gps_speed_sigma_mps");
    t["id_churn"] = [](RunConfig& c, const json& v) { c.sim.id_churn = boolean(v, "id_churn"); };
    t["churn_gap_s"] = sim(&scenario::ScenarioConfig::churn_gap_s, "churn_gap_s");
    return t;
  }();
  return table;
}

void positive(double v, const char* key) {
  if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be > 0");
}

}  // namespace

void RunConfig::validate() const {
  positive(sync_rate_hz, "sync_rate_hz");
  positive(filter.q, "q_accel");
  positive(filter.r_camera, "r_camera_m2");
  positive(filter.r_v2v, "r_v2v_m2");
  positive(filter.init_vel_var, "init_vel_var");
  positive(filter.staleness_horizon_s, "staleness_horizon_s");
  positive(association.threshold, "ttd_threshold");
  if (association.buffer_size == 0) throw ConfigError("buffer_size must be >= 1");
  positive(association.gates.speed_mps, "gate_speed_mps");
  positive(association.gates.heading_deg, "gate_heading_deg");
  positive(association.confidence_th, "confidence_th");
  if (scenario.has_value() == input_dir.has_value()) {
    throw ConfigError("exactly one of scenario and input_dir must be set");
  }
  if (scenario) sim.validate();
}

void apply_json(RunConfig& cfg, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value);
  }
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  apply_json(cfg, json{{key, value}});
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ParseError(file.string() + ": not valid JSON");
  RunConfig cfg;
  apply_json(cfg, doc);
  if (cfg.input_dir && cfg.input_dir->is_relative()) cfg.input_dir = file.parent_path() / *cfg.input_dir;
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  json j;
  j["sync_rate_hz"] = c.sync_rate_hz;
  j["q_accel"] = c.filter.q;
  j["r_camera_m2"] = c.filter.r_camera;
  j["r_v2v_m2"] = c.filter.r_v2v;
  j["init_vel_var"] = c.filter.init_vel_var;
  j["staleness_horizon_s"] = c.filter.staleness_horizon_s;
  if (std::isinf(c.association.threshold)) {
    j["ttd_threshold"] = "inf";
  } else {
    j["ttd_threshold"] = c.association.threshold;
  }
  j["buffer_size"] = c.association.buffer_size;
  j["gate_speed_mps"] = c.association.gates.speed_mps;
  j["gate_heading_deg"] = c.association.gates.heading_deg;
  j["confidence_th"] = c.association.confidence_th;
  j["scenario"] = c.scenario ? json(scenario::to_string(*c.scenario)) : json(nullptr);
  j["input_dir"] = c.input_dir ? json(c.input_dir->string()) : json(nullptr);
  j["seed"] = c.sim.seed;
  j["duration_s"] = c.sim.duration_s;
  j["camera_rate_hz"] = c.sim.camera_rate_hz;
  j["camera_fov_deg"] = c.sim.camera_fov_deg;
  j["camera_max_range_m"] = c.sim.camera_max_range_m;
  j["camera_sigma_m"] = c.sim.camera_sigma_m;
  j["camera_heading_sigma_deg"] = c.sim.camera_heading_sigma_deg;
  j["camera_speed_sigma_mps"] = c.sim.camera_speed_sigma_mps;
  j["occlusion_bias_frac"] = c.sim.occlusion_bias_frac;
  j["occlusion_sigma_scale"] = c.sim.occlusion_sigma_scale;
  j["full_occlusion_below"] = c.sim.full_occlusion_below;
  j["partial_occlusion_below"] = c.sim.partial_occlusion_below;
  j["v2v_rate_hz"] = c.sim.v2v_rate_hz;
  j["gps_sigma_m"] = c.sim.gps_sigma_m;
  j["gps_heading_sigma_deg"] = c.sim.gps_heading_sigma_deg;
  j["gps_speed_sigma_mps"] = c.sim.gps_speed_sigma_mps;
  j["id_churn"] = c.sim.id_churn;
  j["churn_gap_s"] = c.sim.churn_gap_s;
  return j;
}

}  // namespace tta
