#include "tta/sensor_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>

#include "tta/errors.hpp"

namespace tta {

double event_time(const LogEvent& e) {
  return std::visit([](const auto* r) { return r->t; }, e);
}

std::vector<LogEvent> merged_events(const SensorLog& log) {
  std::vector<LogEvent> ev;
  ev.reserve(log.host.size() + log.v2v.size() + log.camera.size());
  for (const auto& h : log.host) ev.emplace_back(&h);
  for (const auto& b : log.v2v) ev.emplace_back(&b);
  for (const auto& c : log.camera) ev.emplace_back(&c);
  // Variant index encodes the host < v2v < camera precedence.
  std::stable_sort(ev.begin(), ev.end(), [](const LogEvent& a, const LogEvent& b) {
    const double ta = event_time(a), tb = event_time(b);
    if (ta != tb) return ta < tb;
    return a.index() < b.index();
  });
  return ev;
}

std::pair<double, double> time_span(const SensorLog& log) {
  bool any = false;
  double lo = 0.0, hi = 0.0;
  auto take = [&](double t) {
    if (!any) {
      lo = hi = t;
      any = true;
    } else {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  };
  for (const auto& h : log.host) take(h.t);
  for (const auto& b : log.v2v) take(b.t);
  for (const auto& c : log.camera) take(c.t);
  return {lo, hi};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace log_io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Column-addressed reader over one CSV file.
class CsvReader {
 public:
  CsvReader(const std::filesystem::path& file, std::vector<std::string> required)
      : name_(file.filename().string()), in_(file), required_(std::move(required)) {
    if (!in_) throw IoError("cannot open " + file.string());
    std::string header;
    if (!std::getline(in_, header)) throw ParseError(name_ + ": empty file, header expected");
    ++line_no_;
    const auto cols = split(header);
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t i = 0; i < cols.size(); ++i) index.emplace(std::string(cols[i]), i);
    std::vector<std::string> missing;
    for (const auto& r : required_) {
      auto it = index.find(r);
      if (it == index.end()) {
        missing.push_back(r);
      } else {
        pos_.push_back(it->second);
      }
    }
    if (!missing.empty()) {
      std::ostringstream os;
      os << name_ << ": header is missing required column(s):";
      for (const auto& m : missing) os << ' ' << m;
      throw ParseError(os.str());
    }
  }

  bool next() {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      cells_ = split(line_);
      return true;
    }
    return false;
  }

  std::string_view raw(std::size_t col) const {
    const std::size_t p = pos_[col];
    if (p >= cells_.size()) fail(col, "missing cell");
    return cells_[p];
  }

  double number(std::size_t col) const {
    const std::string_view s = raw(col);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
      fail(col, "expected a number, got '" + std::string(s) + "'");
    }
    return v;
  }

  TargetId integer(std::size_t col) const {
    const std::string_view s = raw(col);
    TargetId v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
      fail(col, "expected an integer id, got '" + std::string(s) + "'");
    }
    return v;
  }

  std::optional<TargetId> optional_integer(std::size_t col) const {
    if (raw(col).empty()) return std::nullopt;
    return integer(col);
  }

  [[noreturn]] void fail(std::size_t col, const std::string& msg) const {
    std::ostringstream os;
    os << where() << " column " << required_[col] << ": " << msg;
    throw ParseError(os.str());
  }

  std::string where() const { return name_ + " line " + std::to_string(line_no_); }

 private:
  std::string name_;
  std::ifstream in_;
  std::vector<std::string> required_;
  std::vector<std::size_t> pos_;
  std::string line_;
  std::vector<std::string_view> cells_;
  std::size_t line_no_{0};
};

template <typename Fn>
void with_context(const CsvReader& r, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw DomainError(r.where() + ": " + e.what());
  }
}

void check_order(const CsvReader& r, double prev, double t) {
  if (t < prev) {
    std::ostringstream os;
    os << r.where() << ": timestamp " << t << " goes back from " << prev;
    throw OrderingError(os.str());
  }
}

void check_finite(const CsvReader& r, std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw ParseError(r.where() + ": non-finite value");
  }
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

}  // namespace

SensorLog ingest_log(const std::filesystem::path& dir) {
  SensorLog log;
  {
    CsvReader r(dir / kHostFile, {"t_s", "lat_deg", "lon_deg", "heading_deg", "speed_mps"});
    double prev = -kInf;
    while (r.next()) {
      HostSample h{r.number(0), {r.number(1), r.number(2)}, r.number(3), r.number(4)};
      check_finite(r, {h.t, h.heading_deg, h.speed_mps});
      with_context(r, [&] { validate(h.position); });
      check_order(r, prev, h.t);
      prev = h.t;
      log.host.push_back(h);
    }
  }
  {
    CsvReader r(dir / kV2vFile, {"t_s", "vehicle_id", "lat_deg", "lon_deg", "heading_deg",
                                 "speed_mps", "length_m", "width_m"});
    double prev = -kInf;
    while (r.next()) {
      BsmRecord b{r.number(0),  r.integer(1), {r.number(2), r.number(3)},
                  r.number(4),  r.number(5),  r.number(6),
                  r.number(7)};
      check_finite(r, {b.t, b.heading_deg, b.speed_mps, b.length_m, b.width_m});
      with_context(r, [&] { validate(b.position); });
      check_order(r, prev, b.t);
      prev = b.t;
      log.v2v.push_back(b);
    }
  }
  {
    CsvReader r(dir / kCameraFile, {"t_s", "target_id", "px_m", "py_m", "rel_heading_deg",
                                    "rel_speed_mps", "length_m", "width_m"});
    double prev = -kInf;
    while (r.next()) {
      SensorDetection d;
      d.sensor = Sensor::Camera;
      d.t = r.number(0);
      d.target_id = r.integer(1);
      d.px = r.number(2);
      d.py = r.number(3);
      d.rel_heading_deg = r.number(4);
      d.rel_speed_mps = r.number(5);
      d.length_m = r.number(6);
      d.width_m = r.number(7);
      check_finite(r, {d.t, d.px, d.py, d.rel_heading_deg, d.rel_speed_mps, d.length_m, d.width_m});
      check_order(r, prev, d.t);
      prev = d.t;
      log.camera.push_back(d);
    }
  }
  return log;
}

void write_log(const SensorLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / kHostFile);
    out << "t_s,lat_deg,lon_deg,heading_deg,speed_mps\n";
    for (const auto& h : log.host) {
      out << format_double(h.t) << ',' << format_double(h.position.lat_deg) << ','
          << format_double(h.position.lon_deg) << ',' << format_double(h.heading_deg) << ','
          << format_double(h.speed_mps) << '\n';
    }
  }
  {
    auto out = open_out(dir / kV2vFile);
    out << "t_s,vehicle_id,lat_deg,lon_deg,heading_deg,speed_mps,length_m,width_m\n";
    for (const auto& b : log.v2v) {
      out << format_double(b.t) << ',' << b.vehicle_id << ',' << format_double(b.position.lat_deg)
          << ',' << format_double(b.position.lon_deg) << ',' << format_double(b.heading_deg) << ','
          << format_double(b.speed_mps) << ',' << format_double(b.length_m) << ','
          << format_double(b.width_m) << '\n';
    }
  }
  {
    auto out = open_out(dir / kCameraFile);
    out << "t_s,target_id,px_m,py_m,rel_heading_deg,rel_speed_mps,length_m,width_m\n";
    for (const auto& d : log.camera) {
      out << format_double(d.t) << ',' << d.target_id << ',' << format_double(d.px) << ','
          << format_double(d.py) << ',' << format_double(d.rel_heading_deg) << ','
          << format_double(d.rel_speed_mps) << ',' << format_double(d.length_m) << ','
          << format_double(d.width_m) << '\n';
    }
  }
}

GroundTruthMap read_truth(const std::filesystem::path& file) {
  GroundTruthMap truth;
  CsvReader r(file, {"t_s", "vehicle_id", "camera_id"});
  while (r.next()) {
    const double t = r.number(0);
    const TargetId v = r.integer(1);
    const auto c = r.optional_integer(2);
    with_context(r, [&] { truth.set(t, v, c); });
  }
  return truth;
}

void write_truth(const GroundTruthMap& truth, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  auto out = open_out(file);
  out << "t_s,vehicle_id,camera_id\n";
  for (const auto& [key, pairing] : truth.ticks()) {
    for (const auto& [v, c] : pairing) {
      out << format_double(truth.time_of(key)) << ',' << v << ',';
      if (c) out << *c;
      out << '\n';
    }
  }
}

}  // namespace log_io
}  // namespace tta
