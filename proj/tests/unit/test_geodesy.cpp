#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tta/errors.hpp"
#include "tta/geodesy.hpp"

using namespace tta;
using namespace tta::geodesy;

namespace {

std::vector<std::vector<double>> load(const std::string& name) {
  std::ifstream in(std::filesystem::path(TTA_TEST_DATA_DIR) / name);
  EXPECT_TRUE(in.good()) << name;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

// Reference values were produced by pyproj before the build (see
// tests/data/gen_geodesy_reference.py) and are frozen in the repository.
TEST(Geodesy, MatchesFrozenReferenceWithinOneCentimetre) {
  const auto rows = load("utm_reference.csv");
  ASSERT_EQ(rows.size(), 100u);
  for (const auto& r : rows) {
    const UtmCoord c = deg2utm({r[0], r[1]});
    EXPECT_EQ(c.zone.number, static_cast<int>(r[2]));
    EXPECT_EQ(c.zone.north, r[3] == 1.0);
    EXPECT_NEAR(c.easting, r[4], 0.01) << r[0] << "," << r[1];
    EXPECT_NEAR(c.northing, r[5], 0.01) << r[0] << "," << r[1];
  }
}

TEST(Geodesy, CentralMeridianOnEquatorIsFalseEasting) {
  const UtmCoord c = deg2utm({0.0, 3.0});
  EXPECT_NEAR(c.easting, 500000.0, 1e-6);
  EXPECT_NEAR(c.northing, 0.0, 1e-6);
  EXPECT_EQ(c.zone.number, 31);
}

TEST(Geodesy, RoundTripIsSubMillimetre) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lat(-79.5, 83.5), lon(-179.9, 179.9);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint p{lat(rng), lon(rng)};
    const GeoPoint q = utm2deg(deg2utm(p));
    EXPECT_NEAR(q.lat_deg, p.lat_deg, 1e-9);
    EXPECT_NEAR(q.lon_deg, p.lon_deg, 1e-9);
  }
}

TEST(Geodesy, EastingAndNorthingAreMonotone) {
  const UtmZone z{17, true};
  double prev_e = -1.0, prev_n = -1e9;
  for (int i = 0; i < 50; ++i) {
    const double lon = -83.5 + 0.02 * i;
    const UtmCoord c = deg2utm({40.0, lon}, z);
    EXPECT_GT(c.easting, prev_e);
    prev_e = c.easting;
    const UtmCoord d = deg2utm({39.0 + 0.02 * i, -82.0}, z);
    EXPECT_GT(d.northing, prev_n);
    prev_n = d.northing;
  }
}

TEST(Geodesy, ShortMeridianArcMatchesReference) {
  // pyproj: 40.0 -> 40.00090061983262 along lon -81 is 99.9600 m of grid northing.
  const UtmCoord a = deg2utm({40.0, -81.0});
  const UtmCoord b = deg2utm({40.00090061983262, -81.0});
  EXPECT_NEAR(b.northing - a.northing, 99.9600, 1e-3);
  EXPECT_NEAR(b.easting - a.easting, 0.0, 1e-6);
}

TEST(Geodesy, RejectsOutOfRangeCoordinates) {
  try {
    deg2utm({91.0, 0.0});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("lat"), std::string::npos);
  }
  try {
    deg2utm({10.0, 181.0});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("lon"), std::string::npos);
  }
  EXPECT_THROW(deg2utm({84.5, 10.0}), DomainError);
  EXPECT_THROW(deg2utm({10.0, 10.0}, UtmZone{0, true}), DomainError);
}

TEST(Geodesy, RelativeDisplacementRequiresOneZone) {
  const UtmCoord a = deg2utm({40.0, -78.01});
  const UtmCoord b = deg2utm({40.0, -77.99});
  ASSERT_NE(a.zone.number, b.zone.number);
  EXPECT_THROW(relative_displacement(a, b), DomainError);
  const Displacement d = relative_displacement(a, deg2utm({40.0, -77.99}, a.zone));
  EXPECT_GT(d.east, 1700.0);
  EXPECT_LT(d.east, 1720.0);
}

TEST(Geodesy, HostFrameRotationIsAnIsometry) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> h(0.0, 360.0), x(-200.0, 200.0);
  for (int i = 0; i < 200; ++i) {
    const HostPose pose = HostPose::from_geo({40.0 + 0.01 * i, -83.0 + 0.01 * i}, h(rng));
    const Displacement d{x(rng), x(rng)};
    const VehicleFramePoint p = global_to_vehicle(d, pose);
    EXPECT_NEAR(p.range(), std::hypot(d.east, d.north), 1e-9);
    const Displacement back = vehicle_to_global(p.px(), p.py(), pose);
    EXPECT_NEAR(back.east, d.east, 1e-9);
    EXPECT_NEAR(back.north, d.north, 1e-9);
  }
}

TEST(Geodesy, HostFrameAxesFollowTheHeading) {
  // On the central meridian grid and true north coincide.
  const HostPose pose = HostPose::from_geo({40.0, -81.0}, 90.0);
  const VehicleFramePoint ahead = global_to_vehicle({10.0, 0.0}, pose);
  EXPECT_NEAR(ahead.px(), 10.0, 1e-9);
  EXPECT_NEAR(ahead.py(), 0.0, 1e-9);
  const VehicleFramePoint left = global_to_vehicle({0.0, 5.0}, pose);
  EXPECT_NEAR(left.px(), 0.0, 1e-9);
  EXPECT_NEAR(left.py(), 5.0, 1e-9);
}

TEST(Geodesy, DeadAheadTargetsLandOnTheAxis) {
  const auto rows = load("dead_ahead_reference.csv");
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    const HostSample host{0.0, {r[0], r[1]}, r[2], 0.0};
    const BsmRecord bsm{0.0, 1, {r[3], r[4]}, r[2], 0.0, 4.8, 1.9};
    const SensorDetection d = bsm_to_detection(host, bsm, 0.1);
    EXPECT_NEAR(d.py, 0.0, 0.1) << "heading " << r[2];
    EXPECT_NEAR(d.px, r[5], 0.1);
    EXPECT_EQ(d.sensor, Sensor::V2V);
  }
}

TEST(Geodesy, BsmRelativeKinematics) {
  const HostSample host{1.0, {40.0, -83.0}, 350.0, 12.0};
  const BsmRecord bsm{1.05, 9, {40.0003, -83.0}, 20.0, 14.5, 4.8, 1.9};
  const SensorDetection d = bsm_to_detection(host, bsm, 0.1);
  EXPECT_NEAR(d.rel_heading_deg, 30.0, 1e-9);
  EXPECT_NEAR(d.rel_speed_mps, 2.5, 1e-12);
  EXPECT_EQ(d.t, 1.05);
  EXPECT_EQ(d.target_id, 9);
}

TEST(Geodesy, StaleHostPoseIsRejected) {
  const HostSample host{1.0, {40.0, -83.0}, 0.0, 0.0};
  const BsmRecord bsm{1.5, 9, {40.0003, -83.0}, 0.0, 0.0, 4.8, 1.9};
  EXPECT_THROW(bsm_to_detection(host, bsm, 0.1), StalenessError);
}

TEST(Geodesy, ZoneBoundaryTargetIsReprojected) {
  const HostSample host{0.0, {40.0, -78.0002}, 90.0, 0.0};
  const BsmRecord bsm{0.0, 3, {40.0, -77.9998}, 90.0, 0.0, 4.8, 1.9};
  const SensorDetection d = bsm_to_detection(host, bsm, 0.1);
  EXPECT_NEAR(d.px, 34.1, 0.2);
  EXPECT_NEAR(d.py, 0.0, 0.1);
}

TEST(Geodesy, WrapDeg) {
  EXPECT_EQ(wrap_deg(180.0), 180.0);
  EXPECT_EQ(wrap_deg(-180.0), 180.0);
  EXPECT_EQ(wrap_deg(190.0), -170.0);
  EXPECT_EQ(wrap_deg(-190.0), 170.0);
  EXPECT_EQ(wrap_deg(720.0), 0.0);
}
