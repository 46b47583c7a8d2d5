// tta: simulate scenarios, run association over logs, summarize reports.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tta/config.hpp"
#include "tta/errors.hpp"
#include "tta/pipeline.hpp"
#include "tta/scenario.hpp"
#include "tta/sensor_log.hpp"

namespace {

int cmd_simulate(const std::string& scenario, std::uint64_t seed, const std::string& out,
                 const std::vector<std::string>& sets) {
  tta::RunConfig cfg;
  for (const auto& s : sets) tta::apply_override(cfg, s);
  cfg.sim.seed = seed;
  cfg.sim.sync_rate_hz = cfg.sync_rate_hz;
  const auto sim = tta::scenario::simulate(tta::scenario::parse_kind(scenario), cfg.sim);
  tta::log_io::write_log(sim.emulation.log, out);
  tta::log_io::write_truth(sim.truth, std::filesystem::path(out) / tta::log_io::kTruthFile);
  std::cout << "wrote " << sim.emulation.log.camera.size() << " camera, " << sim.emulation.log.v2v.size()
            << " v2v, " << sim.emulation.log.host.size() << " host records to " << out << "\n";
  return 0;
}

int cmd_associate(const std::string& config, const std::string& input, const std::string& scenario,
                  const std::optional<std::uint64_t>& seed, const std::vector<std::string>& sets,
                  std::string out) {
  tta::RunConfig cfg = config.empty() ? tta::RunConfig{} : tta::load_config(config);
  if (!input.empty()) {
    cfg.input_dir = input;
    cfg.scenario.reset();
  }
  if (!scenario.empty()) {
    cfg.scenario = tta::scenario::parse_kind(scenario);
    cfg.input_dir.reset();
  }
  if (seed) cfg.sim.seed = *seed;
  for (const auto& s : sets) tta::apply_override(cfg, s);
  if (out.empty()) out = cfg.out_dir.string();
  if (out.empty()) throw tta::ConfigError("out_dir: no output directory given (--out)");

  const tta::RunReport report = tta::run_pipeline(cfg);
  tta::emit_report(report, out);
  std::cout << report.timeline.size() << " ticks";
  if (report.tma) {
    const auto p = report.tma->aggregate.percent();
    std::cout << ", TMA " << (p ? tta::format_double(std::round(*p * 10.0) / 10.0) + "%" : "no decisions");
  }
  std::cout << "; report in " << out << "\n";
  return 0;
}

int cmd_report(const std::string& in) {
  const auto path = std::filesystem::path(in) / tta::kReportFile;
  std::ifstream f(path);
  if (!f) throw tta::IoError("cannot open " + path.string());
  const auto j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw tta::ParseError(path.string() + ": not valid JSON");

  std::cout << "ticks: " << j.value("ticks", 0) << "\n";
  if (j.contains("tma") && !j["tma"].is_null()) {
    const auto& agg = j["tma"]["aggregate"];
    std::cout << "TMA aggregate: " << agg["percent"].dump() << " (" << agg["correct"] << "/" << agg["total"]
              << ", " << agg["no_decision"] << " no-decision)\n";
    for (const auto& [id, v] : j["tma"]["per_vehicle"].items()) {
      std::cout << "  vehicle " << id << ": " << v["percent"].dump() << " (" << v["correct"] << "/" << v["total"]
                << ")\n";
    }
  } else {
    std::cout << "TMA: no ground truth\n";
  }
  if (j.contains("confidence")) {
    for (const auto& [id, v] : j["confidence"].items()) {
      std::cout << "confidence " << id << ": " << v["min"] << " .. " << v["max"] << " over " << v["ticks"]
                << " ticks\n";
    }
  }
  if (j.contains("counters")) {
    for (const auto& [k, v] : j["counters"].items()) std::cout << k << ": " << v << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Track-to-track association between V2V and camera tracks"};
  app.require_subcommand(1);

  std::string sim_scenario, sim_out;
  std::uint64_t sim_seed = 1;
  std::vector<std::string> sim_sets;
  auto* simulate = app.add_subcommand("simulate", "Generate a scenario's sensor logs and ground truth");
  simulate->add_option("--scenario", sim_scenario, "car_following or ima")
      ->required()
      ->check(CLI::IsMember({"car_following", "ima"}));
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--set", sim_sets, "Override a config key (key=value)");

  std::string config, input, as_scenario, as_out;
  std::optional<std::uint64_t> as_seed;
  std::vector<std::string> as_sets;
  auto* associate = app.add_subcommand("associate", "Run the association pipeline");
  associate->add_option("--config", config, "JSON run configuration");
  associate->add_option("--input", input, "Log directory (overrides the config)");
  associate->add_option("--scenario", as_scenario, "Simulate instead of reading a log");
  associate->add_option("--seed", as_seed, "Random seed");
  associate->add_option("--set", as_sets, "Override a config key (key=value)");
  associate->add_option("--out", as_out, "Output directory");

  std::string report_in;
  auto* report = app.add_subcommand("report", "Summarize a report directory");
  report->add_option("--in", report_in, "Directory holding report.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return cmd_simulate(sim_scenario, sim_seed, sim_out, sim_sets);
    if (*associate) return cmd_associate(config, input, as_scenario, as_seed, as_sets, as_out);
    if (*report) return cmd_report(report_in);
  } catch (const tta::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
