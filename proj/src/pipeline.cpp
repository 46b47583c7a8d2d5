#include "tta/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "tta/errors.hpp"
#include "tta/geodesy.hpp"
#include "tta/scenario.hpp"
#include "tta/track_store.hpp"

namespace tta {
namespace {

class Replay {
 public:
  explicit Replay(const RunConfig& cfg) : cfg_(cfg), store_(cfg.filter) {}

  void consume(const LogEvent& e) {
    if (const auto* h = std::get_if<const HostSample*>(&e)) {
      host_ = *h;
      return;
    }
    ++counters_.detections_ingested;
    SensorDetection d;
    if (const auto* c = std::get_if<const SensorDetection*>(&e)) {
      d = **c;
    } else {
      const BsmRecord& b = *std::get<const BsmRecord*>(e);
      if (host_ == nullptr) {
        ++counters_.dropped_no_host_pose;
        return;
      }
      try {
        d = geodesy::bsm_to_detection(*host_, b, 1.0 / cfg_.sync_rate_hz);
      } catch (const StalenessError&) {
        ++counters_.dropped_no_host_pose;
        return;
      }
    }
    const auto key = store_.process_detection(d);
    if (!key) {
      ++counters_.dropped_out_of_order;
      return;
    }
    ++counters_.consumed;
    // A fresh track under a reused key must not inherit the old buffer.
    if (store_.find(*key)->updates == 1) histories_.erase(*key);
  }

  AssociationResult tick(double t) {
    store_.retire_stale(t);
    drop_dead_histories();

    std::vector<const TrackHistory*> live;
    live.reserve(store_.size());
    for (const auto& [key, track] : store_.tracks()) {
      auto it = histories_.find(key);
      if (it == histories_.end()) {
        it = histories_.emplace(key, TrackHistory(key, cfg_.association.buffer_size)).first;
      }
      it->second.push({sync_estimate(track, store_.model(key.sensor), t), track.kinematics});
      live.push_back(&it->second);
    }
    AssociationResult r = associate_tick(live, t, cfg_.association);
    counters_.gate_rejections += r.gate_rejections.size();
    counters_.singleton_clusters +=
        static_cast<std::size_t>(std::count_if(r.clusters.begin(), r.clusters.end(),
                                               [](const Cluster& c) { return c.members.size() == 1; }));
    return r;
  }

  std::size_t live_tracks() const { return store_.size(); }

  PipelineCounters counters() const {
    PipelineCounters c = counters_;
    c.tracks_retired = store_.retired();
    return c;
  }

 private:
  void drop_dead_histories() {
    std::erase_if(histories_, [this](const auto& kv) { return store_.find(kv.first) == nullptr; });
  }

  const RunConfig& cfg_;
  TrackStore store_;
  std::map<TrackKey, TrackHistory> histories_;
  const HostSample* host_{nullptr};
  PipelineCounters counters_;
};

void percent_json(const TmaCounts& c, nlohmann::json& out) {
  if (const auto p = c.percent()) {
    out["percent"] = std::round(*p * 10.0) / 10.0;
  } else {
    out["percent"] = "no decisions";
  }
  out["correct"] = c.correct;
  out["total"] = c.total;
  out["no_decision"] = c.no_decision;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::map<TargetId, ConfidenceRange> RunReport::confidence_by_vehicle() const {
  std::map<TargetId, ConfidenceRange> out;
  for (const AssociationResult& r : timeline) {
    for (const Cluster& c : r.clusters) {
      if (!c.confidence) continue;
      for (const TrackKey& k : c.members) {
        if (k.sensor != Sensor::V2V) continue;
        auto [it, fresh] = out.try_emplace(k.id, ConfidenceRange{*c.confidence, *c.confidence, 0});
        ConfidenceRange& cr = it->second;
        cr.min = std::min(cr.min, *c.confidence);
        cr.max = std::max(cr.max, *c.confidence);
        ++cr.ticks;
      }
    }
  }
  return out;
}

RunReport run_pipeline(const SensorLog& log, const RunConfig& cfg, const GroundTruthMap* truth) {
  RunReport report;
  Replay replay(cfg);
  const std::vector<LogEvent> events = merged_events(log);
  std::size_t next = 0;
  if (!events.empty()) {
    const auto [t0, t1] = time_span(log);
    for (double t : sync_schedule(t0, t1, cfg.sync_rate_hz)) {
      while (next < events.size() && event_time(events[next]) <= t) replay.consume(events[next++]);
      report.timeline.push_back(replay.tick(t));
      report.live_tracks.push_back(replay.live_tracks());
    }
  }
  while (next < events.size()) replay.consume(events[next++]);
  report.counters = replay.counters();
  if (truth != nullptr) report.tma = tma(report.timeline, *truth);
  return report;
}

RunReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.scenario) {
    scenario::ScenarioConfig sc = cfg.sim;
    sc.sync_rate_hz = cfg.sync_rate_hz;
    const scenario::Simulation sim = scenario::simulate(*cfg.scenario, sc);
    return run_pipeline(sim.emulation.log, cfg, &sim.truth);
  }
  const SensorLog log = log_io::ingest_log(*cfg.input_dir);
  const auto truth_file = *cfg.input_dir / log_io::kTruthFile;
  if (std::filesystem::exists(truth_file)) {
    const GroundTruthMap truth = log_io::read_truth(truth_file);
    return run_pipeline(log, cfg, &truth);
  }
  return run_pipeline(log, cfg, nullptr);
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json j;
  j["ticks"] = report.timeline.size();
  if (report.tma) {
    nlohmann::json agg, per;
    percent_json(report.tma->aggregate, agg);
    for (const auto& [id, c] : report.tma->per_vehicle) percent_json(c, per[std::to_string(id)]);
    j["tma"] = {{"aggregate", agg}, {"per_vehicle", per}};
  } else {
    j["tma"] = nullptr;
  }
  const PipelineCounters& c = report.counters;
  j["counters"] = {{"detections_ingested", c.detections_ingested},
                   {"consumed", c.consumed},
                   {"dropped_out_of_order", c.dropped_out_of_order},
                   {"dropped_no_host_pose", c.dropped_no_host_pose},
                   {"gate_rejections", c.gate_rejections},
                   {"singleton_clusters", c.singleton_clusters},
                   {"tracks_retired", c.tracks_retired}};
  nlohmann::json conf = nlohmann::json::object();
  for (const auto& [id, r] : report.confidence_by_vehicle()) {
    conf[std::to_string(id)] = {{"min", r.min}, {"max", r.max}, {"ticks", r.ticks}};
  }
  j["confidence"] = conf;
  write_file(dir / kReportFile, j.dump(2) + "\n");

  std::ostringstream tl;
  tl << "t_s,tracks,clusters,pairs\n";
  std::ostringstream cf;
  cf << "t_s,vehicle_id,camera_id,confidence_pct\n";
  for (std::size_t i = 0; i < report.timeline.size(); ++i) {
    const AssociationResult& r = report.timeline[i];
    const std::string t = format_double(r.t);
    std::map<TargetId, std::optional<TargetId>> pairs;
    for (const Cluster& cl : r.clusters) {
      std::optional<TargetId> cam;
      for (const TrackKey& k : cl.members) {
        if (k.sensor == Sensor::Camera) cam = k.id;
      }
      for (const TrackKey& k : cl.members) {
        if (k.sensor != Sensor::V2V) continue;
        pairs[k.id] = cam;
        if (cam && cl.confidence) {
          cf << t << ',' << k.id << ',' << *cam << ',' << format_double(*cl.confidence) << '\n';
        }
      }
    }
    const std::size_t multi = static_cast<std::size_t>(std::count_if(
        r.clusters.begin(), r.clusters.end(), [](const Cluster& cl) { return cl.members.size() > 1; }));
    tl << t << ',' << report.live_tracks[i] << ',' << multi << ',';
    bool first = true;
    for (const auto& [v, cam] : pairs) {
      if (!first) tl << ';';
      first = false;
      tl << v << ':';
      if (cam) {
        tl << *cam;
      } else {
        tl << '-';
      }
    }
    tl << '\n';
  }
  write_file(dir / kTimelineFile, tl.str());
  write_file(dir / kConfidenceFile, cf.str());
}

}  // namespace tta
