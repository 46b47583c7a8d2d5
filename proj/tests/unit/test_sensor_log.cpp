#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "tta/errors.hpp"
#include "tta/sensor_log.hpp"

using namespace tta;
namespace fs = std::filesystem;

namespace {

class LogDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tta_log_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const char* name, const std::string& body) { std::ofstream(dir_ / name) << body; }

  void write_valid() {
    write(log_io::kHostFile, "t_s,lat_deg,lon_deg,heading_deg,speed_mps\n0,40,-83,0,10\n0.1,40.00001,-83,0,10\n");
    write(log_io::kV2vFile,
          "t_s,vehicle_id,lat_deg,lon_deg,heading_deg,speed_mps,length_m,width_m\n0.05,7,40.0002,-83,0,10,4.8,1.9\n");
    write(log_io::kCameraFile,
          "t_s,target_id,px_m,py_m,rel_heading_deg,rel_speed_mps,length_m,width_m\n0.025,3,20,0.5,0,0,4,1.8\n");
  }

  template <typename E>
  std::string error_of() {
    try {
      log_io::ingest_log(dir_);
    } catch (const E& e) {
      return e.what();
    }
    ADD_FAILURE() << "no exception of the expected type";
    return {};
  }

  fs::path dir_;
};

SensorLog sample_log() {
  SensorLog log;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double t = 0.025 * k + 1e-7 * u(rng);
    log.host.push_back({0.1 * k, {40.0 + 1e-4 * u(rng), -83.0 + 1e-4 * u(rng)}, 359.9 * (0.5 + 0.5 * u(rng)), 10.0 / 3.0});
    log.v2v.push_back({0.1 * k + 0.013, 100 + k % 3, {40.0 + u(rng) * 1e-3, -83.0}, 1.0 / 3.0, 12.0, 4.8, 1.9});
    SensorDetection d;
    d.t = t + 0.5;
    d.target_id = k;
    d.px = 0.1 * u(rng);
    d.py = 1e-17 * u(rng);
    d.rel_heading_deg = -7.25;
    d.rel_speed_mps = 2.0 / 7.0;
    d.length_m = 4.3;
    d.width_m = 1.71;
    log.camera.push_back(d);
  }
  return log;
}

}  // namespace

TEST_F(LogDir, RoundTripIsExact) {
  const SensorLog log = sample_log();
  log_io::write_log(log, dir_);
  EXPECT_EQ(log_io::ingest_log(dir_), log);
}

TEST_F(LogDir, TruthRoundTrip) {
  GroundTruthMap truth;
  truth.set(0.1, 1, 5);
  truth.set(0.1, 2, std::nullopt);
  truth.set(0.2, 1, std::nullopt);
  log_io::write_truth(truth, dir_ / log_io::kTruthFile);
  EXPECT_EQ(log_io::read_truth(dir_ / log_io::kTruthFile), truth);
}

TEST_F(LogDir, ValidMinimalLog) {
  write_valid();
  const SensorLog log = log_io::ingest_log(dir_);
  EXPECT_EQ(log.host.size(), 2u);
  EXPECT_EQ(log.v2v.size(), 1u);
  ASSERT_EQ(log.camera.size(), 1u);
  EXPECT_EQ(log.camera[0].sensor, Sensor::Camera);
  EXPECT_EQ(log.camera[0].target_id, 3);
}

TEST_F(LogDir, LatitudeOutOfRangeNamesTheField) {
  write_valid();
  write(log_io::kHostFile, "t_s,lat_deg,lon_deg,heading_deg,speed_mps\n0,91,-83,0,10\n");
  const std::string what = error_of<DomainError>();
  EXPECT_NE(what.find("lat"), std::string::npos) << what;
  EXPECT_NE(what.find("host.csv line 2"), std::string::npos) << what;
}

TEST_F(LogDir, MissingColumnIsAParseError) {
  write_valid();
  write(log_io::kCameraFile, "t_s,target_id,px_m,rel_heading_deg,rel_speed_mps,length_m,width_m\n");
  const std::string what = error_of<ParseError>();
  EXPECT_NE(what.find("py_m"), std::string::npos) << what;
}

TEST_F(LogDir, BadCellReportsLineAndColumn) {
  write_valid();
  write(log_io::kV2vFile,
        "t_s,vehicle_id,lat_deg,lon_deg,heading_deg,speed_mps,length_m,width_m\n"
        "0.05,7,40.0002,-83,0,10,4.8,1.9\n"
        "0.15,7,40.0002,-83,north,10,4.8,1.9\n");
  const std::string what = error_of<ParseError>();
  EXPECT_NE(what.find("v2v.csv line 3"), std::string::npos) << what;
  EXPECT_NE(what.find("heading_deg"), std::string::npos) << what;
}

TEST_F(LogDir, TimestampsGoingBackwardsAreAnOrderingError) {
  write_valid();
  write(log_io::kCameraFile,
        "t_s,target_id,px_m,py_m,rel_heading_deg,rel_speed_mps,length_m,width_m\n"
        "0.5,3,20,0.5,0,0,4,1.8\n0.4,3,20,0.5,0,0,4,1.8\n");
  const std::string what = error_of<OrderingError>();
  EXPECT_NE(what.find("camera.csv line 3"), std::string::npos) << what;
}

TEST_F(LogDir, MissingFileIsAnIoError) {
  write_valid();
  fs::remove(dir_ / log_io::kV2vFile);
  EXPECT_THROW(log_io::ingest_log(dir_), IoError);
}

TEST(MergedEvents, TieOrderIsHostThenV2vThenCamera) {
  SensorLog log;
  log.camera.push_back(SensorDetection{Sensor::Camera, 1, 1.0});
  log.v2v.push_back(BsmRecord{1.0, 2, {40.0, -83.0}});
  log.host.push_back(HostSample{1.0, {40.0, -83.0}});
  log.host.push_back(HostSample{0.5, {40.0, -83.0}});
  std::sort(log.host.begin(), log.host.end(), [](auto& a, auto& b) { return a.t < b.t; });
  const auto ev = merged_events(log);
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<const HostSample*>(ev[0]));
  EXPECT_EQ(event_time(ev[0]), 0.5);
  EXPECT_TRUE(std::holds_alternative<const HostSample*>(ev[1]));
  EXPECT_TRUE(std::holds_alternative<const BsmRecord*>(ev[2]));
  EXPECT_TRUE(std::holds_alternative<const SensorDetection*>(ev[3]));
  EXPECT_EQ(time_span(log), (std::pair<double, double>{0.5, 1.0}));
  EXPECT_EQ(time_span(SensorLog{}), (std::pair<double, double>{0.0, 0.0}));
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(v)), v);
}
