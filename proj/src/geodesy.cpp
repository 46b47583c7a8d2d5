#include "tta/geodesy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "tta/errors.hpp"

namespace tta {

void validate(const GeoPoint& p) {
  if (!std::isfinite(p.lat_deg) || p.lat_deg < -90.0 || p.lat_deg > 90.0) {
    std::ostringstream os;
    os << "lat " << p.lat_deg << " outside [-90, 90]";
    throw DomainError(os.str());
  }
  if (!std::isfinite(p.lon_deg) || p.lon_deg < -180.0 || p.lon_deg > 180.0) {
    std::ostringstream os;
    os << "lon " << p.lon_deg << " outside [-180, 180]";
    throw DomainError(os.str());
  }
}

std::string_view to_string(Sensor s) {
  switch (s) {
    case Sensor::V2V:
      return "v2v";
    case Sensor::Camera:
      return "camera";
  }
  return "unknown";
}

namespace geodesy {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// WGS84
constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;

struct Series {
  double e;         // first eccentricity
  double e2;
  double rect_a;    // rectifying radius A
  std::array<double, 6> alpha;
  std::array<double, 6> beta;
};

Series make_series() {
  const double n = kF / (2.0 - kF);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  Series s{};
  s.e2 = kF * (2.0 - kF);
  s.e = std::sqrt(s.e2);
  s.rect_a = kA / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  s.alpha = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 +
          7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0 -
          1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0,
  };
  s.beta = {
      n / 2.0 - 2.0 * n2 / 3.0 + 37.0 * n3 / 96.0 - n4 / 360.0 - 81.0 * n5 / 512.0 +
          96199.0 * n6 / 604800.0,
      n2 / 48.0 + n3 / 15.0 - 437.0 * n4 / 1440.0 + 46.0 * n5 / 105.0 - 1118711.0 * n6 / 3870720.0,
      17.0 * n3 / 480.0 - 37.0 * n4 / 840.0 - 209.0 * n5 / 4480.0 + 5569.0 * n6 / 90720.0,
      4397.0 * n4 / 161280.0 - 11.0 * n5 / 504.0 - 830251.0 * n6 / 7257600.0,
      4583.0 * n5 / 161280.0 - 108847.0 * n6 / 3991680.0,
      20648693.0 * n6 / 638668800.0,
  };
  return s;
}

const Series& series() {
  static const Series s = make_series();
  return s;
}

double central_meridian_deg(int zone) { return -183.0 + 6.0 * zone; }

// Conformal latitude: tan(phi) -> tan(phi').
double taup(double tau, double e) {
  const double tau1 = std::hypot(1.0, tau);
  const double sig = std::sinh(e * std::atanh(e * tau / tau1));
  return std::hypot(1.0, sig) * tau - sig * tau1;
}

// Newton inversion of taup.
double tau_from_taup(double tau_prime, double e, double e2) {
  const double e2m = 1.0 - e2;
  double tau = tau_prime;
  for (int i = 0; i < 8; ++i) {
    const double tp = taup(tau, e);
    const double dtau = (tau_prime - tp) / std::hypot(1.0, tp) * (1.0 + e2m * tau * tau) /
                        (e2m * std::hypot(1.0, tau));
    tau += dtau;
    if (std::abs(dtau) < 1e-15 * std::max(1.0, std::abs(tau))) break;
  }
  return tau;
}

void check_band(const GeoPoint& p) {
  validate(p);
  if (p.lat_deg < kMinUtmLat || p.lat_deg > kMaxUtmLat) {
    std::ostringstream os;
    os << "lat " << p.lat_deg << " outside the UTM band [" << kMinUtmLat << ", " << kMaxUtmLat
       << "]";
    throw DomainError(os.str());
  }
}

struct Projected {
  double x;  // scaled easting offset from the central meridian
  double y;  // scaled northing from the equator
  double gamma_rad;
};

Projected project(double lat_deg, double dlon_deg) {
  const Series& s = series();
  const double phi = lat_deg * kDeg;
  const double lam = dlon_deg * kDeg;
  const double tp = taup(std::tan(phi), s.e);
  const double cos_lam = std::cos(lam);
  const double xip = std::atan2(tp, cos_lam);
  const double etap = std::asinh(std::sin(lam) / std::hypot(tp, cos_lam));

  double xi = xip, eta = etap, p = 1.0, q = 0.0;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    const double c2 = 2.0 * j;
    const double sx = std::sin(c2 * xip), cx = std::cos(c2 * xip);
    const double sh = std::sinh(c2 * etap), ch = std::cosh(c2 * etap);
    xi += a * sx * ch;
    eta += a * cx * sh;
    p += c2 * a * cx * ch;
    q += c2 * a * sx * sh;
  }
  const double gamma1 = std::atan2(tp * std::tan(lam), std::hypot(1.0, tp));
  const double gamma = std::abs(lam) < kPi / 2.0 ? gamma1 + std::atan2(q, p) : std::atan2(q, p);
  return {kK0 * s.rect_a * eta, kK0 * s.rect_a * xi, gamma};
}

double dlon_for_zone(double lon_deg, int zone) {
  double d = lon_deg - central_meridian_deg(zone);
  d = std::remainder(d, 360.0);
  return d;
}

}  // namespace

UtmZone utm_zone_for(const GeoPoint& p) {
  validate(p);
  int z = static_cast<int>(std::floor((p.lon_deg + 180.0) / 6.0)) + 1;
  z = std::clamp(z, 1, 60);
  return {z, p.lat_deg >= 0.0};
}

UtmCoord deg2utm(const GeoPoint& p) { return deg2utm(p, utm_zone_for(p)); }

UtmCoord deg2utm(const GeoPoint& p, const UtmZone& zone) {
  check_band(p);
  if (zone.number < 1 || zone.number > 60) {
    throw DomainError("utm zone " + std::to_string(zone.number) + " outside [1, 60]");
  }
  const Projected pr = project(p.lat_deg, dlon_for_zone(p.lon_deg, zone.number));
  UtmCoord c;
  c.zone = zone;
  c.easting = kFalseEasting + pr.x;
  c.northing = pr.y + (zone.north ? 0.0 : kFalseNorthingSouth);
  return c;
}

GeoPoint utm2deg(const UtmCoord& c) {
  if (c.zone.number < 1 || c.zone.number > 60) {
    throw DomainError("utm zone " + std::to_string(c.zone.number) + " outside [1, 60]");
  }
  const Series& s = series();
  const double scale = kK0 * s.rect_a;
  const double xi = (c.northing - (c.zone.north ? 0.0 : kFalseNorthingSouth)) / scale;
  const double eta = (c.easting - kFalseEasting) / scale;

  double xip = xi, etap = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[j - 1];
    const double c2 = 2.0 * j;
    xip -= b * std::sin(c2 * xi) * std::cosh(c2 * eta);
    etap -= b * std::cos(c2 * xi) * std::sinh(c2 * eta);
  }
  const double sinh_etap = std::sinh(etap);
  const double cos_xip = std::cos(xip);
  const double tp = std::sin(xip) / std::hypot(sinh_etap, cos_xip);
  const double lam = std::atan2(sinh_etap, cos_xip);
  const double tau = tau_from_taup(tp, s.e, s.e2);

  GeoPoint g;
  g.lat_deg = std::atan(tau) / kDeg;
  g.lon_deg = std::remainder(central_meridian_deg(c.zone.number) + lam / kDeg, 360.0);
  return g;
}

double grid_convergence_deg(const GeoPoint& p, const UtmZone& zone) {
  validate(p);
  return project(p.lat_deg, dlon_for_zone(p.lon_deg, zone.number)).gamma_rad / kDeg;
}

HostPose::HostPose(const UtmCoord& position, double heading_deg)
    : position_(position),
      heading_deg_(heading_deg),
      convergence_deg_(grid_convergence_deg(utm2deg(position), position.zone)) {}

HostPose HostPose::from_geo(const GeoPoint& position, double heading_deg) {
  const UtmCoord c = deg2utm(position);
  return HostPose(c, heading_deg, grid_convergence_deg(position, c.zone));
}

Displacement relative_displacement(const UtmCoord& hv, const UtmCoord& rv) {
  if (!(hv.zone == rv.zone)) {
    std::ostringstream os;
    os << "utm zone mismatch: host " << hv.zone.number << (hv.zone.north ? 'N' : 'S')
       << ", remote " << rv.zone.number << (rv.zone.north ? 'N' : 'S')
       << "; re-project the remote vehicle into the host zone";
    throw DomainError(os.str());
  }
  return {rv.easting - hv.easting, rv.northing - hv.northing};
}

VehicleFramePoint global_to_vehicle(const Displacement& d, const HostPose& pose) {
  const double th = pose.grid_heading_deg() * kDeg;
  const double s = std::sin(th), c = std::cos(th);
  return {d.east * s + d.north * c, -d.east * c + d.north * s};
}

Displacement vehicle_to_global(double px, double py, const HostPose& pose) {
  const double th = pose.grid_heading_deg() * kDeg;
  const double s = std::sin(th), c = std::cos(th);
  return {px * s - py * c, px * c + py * s};
}

double wrap_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

SensorDetection bsm_to_detection(const HostSample& host, const BsmRecord& bsm, double max_skew_s) {
  if (std::abs(bsm.t - host.t) > max_skew_s) {
    std::ostringstream os;
    os << "host pose at t=" << host.t << " is stale for V2V record at t=" << bsm.t
       << " (allowed skew " << max_skew_s << " s)";
    throw StalenessError(os.str(), bsm.t, host.t);
  }
  const HostPose pose = HostPose::from_geo(host.position, host.heading_deg);
  const UtmCoord rv = deg2utm(bsm.position, pose.position().zone);
  const VehicleFramePoint p = global_to_vehicle(relative_displacement(pose.position(), rv), pose);

  SensorDetection d;
  d.sensor = Sensor::V2V;
  d.target_id = bsm.vehicle_id;
  d.t = bsm.t;
  d.px = p.px();
  d.py = p.py();
  d.rel_heading_deg = wrap_deg(bsm.heading_deg - host.heading_deg);
  d.rel_speed_mps = bsm.speed_mps - host.speed_mps;
  d.length_m = bsm.length_m;
  d.width_m = bsm.width_m;
  return d;
}

}  // namespace geodesy
}  // namespace tta
