#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "tta/scenario.hpp"

namespace tta::scenario {
namespace {

std::array<std::pair<double, double>, 4> corners(const Footprint& f) {
  const double c = std::cos(f.heading_rad), s = std::sin(f.heading_rad);
  const double hl = 0.5 * f.length, hw = 0.5 * f.width;
  std::array<std::pair<double, double>, 4> out;
  const double sx[4] = {1, 1, -1, -1};
  const double sy[4] = {1, -1, -1, 1};
  for (int i = 0; i < 4; ++i) {
    out[i] = {f.cx + sx[i] * hl * c - sy[i] * hw * s, f.cy + sx[i] * hl * s + sy[i] * hw * c};
  }
  return out;
}

// Bearing interval subtended at the origin. Footprints are assumed to lie in
// front of the camera, so the interval never wraps.
std::pair<double, double> bearing_span(const Footprint& f) {
  double lo = 10.0, hi = -10.0;
  for (const auto& [x, y] : corners(f)) {
    const double b = std::atan2(y, x);
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

}  // namespace

double visible_fraction(const Footprint& target, std::span<const Footprint> others) {
  const auto [lo, hi] = bearing_span(target);
  const double width = hi - lo;
  if (!(width > 0.0)) return 1.0;
  const double range = std::hypot(target.cx, target.cy);

  std::vector<std::pair<double, double>> covered;
  for (const Footprint& o : others) {
    if (!(std::hypot(o.cx, o.cy) < range)) continue;
    const auto [olo, ohi] = bearing_span(o);
    const double a = std::max(olo, lo), b = std::min(ohi, hi);
    if (b > a) covered.emplace_back(a, b);
  }
  std::sort(covered.begin(), covered.end());
  double hidden = 0.0, cur_lo = 0.0, cur_hi = 0.0;
  bool open = false;
  for (const auto& [a, b] : covered) {
    if (!open || a > cur_hi) {
      if (open) hidden += cur_hi - cur_lo;
      cur_lo = a;
      cur_hi = b;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, b);
    }
  }
  if (open) hidden += cur_hi - cur_lo;
  return std::clamp(1.0 - hidden / width, 0.0, 1.0);
}

}  // namespace tta::scenario
