#include "tta/association.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "tta/errors.hpp"
#include "tta/geodesy.hpp"
#include "tta/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tta {

TrackHistory::TrackHistory(TrackKey owner, std::size_t capacity) : owner_(owner), capacity_(capacity) {
  if (capacity == 0) throw ConfigError("track history capacity must be >= 1");
}

void TrackHistory::push(const HistoryEntry& e) {
  if (!entries_.empty() && !(e.state.t > entries_.back().state.t)) {
    std::ostringstream os;
    os << "history of " << to_string(owner_.sensor) << " track " << owner_.id << ": t=" << e.state.t
       << " is not after t=" << entries_.back().state.t;
    throw OrderingError(os.str());
  }
  entries_.push_back(e);
  if (entries_.size() > capacity_) entries_.pop_front();
}

double mahalanobis_step(const TrackState& a, const TrackState& b) {
  if (a.t != b.t) {
    std::ostringstream os;
    os << "mahalanobis_step on unsynchronized states t=" << a.t << " and t=" << b.t;
    throw OrderingError(os.str());
  }
  const Mat4 S = a.P + b.P;
  const Eigen::LLT<Mat4> llt(S);
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (llt.info() != Eigen::Success || !(rcond > 1e-14)) {
    std::ostringstream os;
    os << "summed covariance is singular (rcond " << rcond << ")";
    throw NumericError(os.str(), rcond);
  }
  const Vec4 delta = a.x - b.x;
  const double d2 = delta.dot(llt.solve(delta));
  return std::sqrt(std::max(d2, 0.0));
}

std::optional<double> track_distance(const TrackHistory& a, const TrackHistory& b) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  double sum = 0.0;
  std::size_t m = 0;
  auto ia = ea.begin();
  auto ib = eb.begin();
  while (ia != ea.end() && ib != eb.end()) {
    if (ia->state.t < ib->state.t) {
      ++ia;
    } else if (ib->state.t < ia->state.t) {
      ++ib;
    } else {
      sum += mahalanobis_step(ia->state, ib->state);
      ++m;
      ++ia;
      ++ib;
    }
  }
  if (m == 0) return std::nullopt;
  return sum / static_cast<double>(m);
}

const char* to_string(GateReason r) {
  switch (r) {
    case GateReason::None:
      return "none";
    case GateReason::Speed:
      return "speed";
    case GateReason::Heading:
      return "heading";
  }
  return "unknown";
}

GateResult gate_check(const TrackHistory& a, const TrackHistory& b, const GateConfig& gates) {
  const GateKinematics& ka = a.latest().kinematics;
  const GateKinematics& kb = b.latest().kinematics;
  if (std::abs(geodesy::wrap_deg(ka.rel_heading_deg - kb.rel_heading_deg)) > gates.heading_deg) {
    return {false, GateReason::Heading};
  }
  if (std::abs(ka.rel_speed_mps - kb.rel_speed_mps) > gates.speed_mps) {
    return {false, GateReason::Speed};
  }
  return {};
}

TtdMatrix::TtdMatrix(std::vector<TrackKey> labels)
    : labels_(std::move(labels)), cells_(labels_.size() * labels_.size(), kInf) {}

bool TtdMatrix::any_finite() const {
  return std::any_of(cells_.begin(), cells_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

std::vector<const TrackHistory*> v2v_first(std::span<const TrackHistory* const> tracks) {
  std::vector<const TrackHistory*> ordered(tracks.begin(), tracks.end());
  std::stable_partition(ordered.begin(), ordered.end(),
                        [](const TrackHistory* h) { return h->owner().sensor == Sensor::V2V; });
  return ordered;
}

TtdMatrix empty_matrix(const std::vector<const TrackHistory*>& ordered) {
  std::vector<TrackKey> labels;
  labels.reserve(ordered.size());
  for (const TrackHistory* h : ordered) labels.push_back(h->owner());
  return TtdMatrix(std::move(labels));
}

// Fills row `row` of the lower triangle; rejections are appended in column order.
void fill_row(TtdMatrix& m, const std::vector<const TrackHistory*>& ordered, std::size_t row,
              double threshold, const GateConfig& gates, std::vector<GateRejection>& rejected) {
  const TrackHistory& a = *ordered[row];
  for (std::size_t col = 0; col < row; ++col) {
    const TrackHistory& b = *ordered[col];
    if (a.owner().sensor == b.owner().sensor || a.empty() || b.empty()) continue;
    const GateResult g = gate_check(a, b, gates);
    if (!g.pass) {
      rejected.push_back({b.owner(), a.owner(), g.reason});
      continue;
    }
    const std::optional<double> d = track_distance(a, b);
    if (d && *d <= threshold) m.set(row, col, *d);
  }
}

}  // namespace

TtdMatrix build_ttd_matrix_serial(std::span<const TrackHistory* const> tracks, double threshold,
                                  const GateConfig& gates) {
  const auto ordered = v2v_first(tracks);
  TtdMatrix m = empty_matrix(ordered);
  for (std::size_t row = 0; row < ordered.size(); ++row) {
    fill_row(m, ordered, row, threshold, gates, m.gate_rejections);
  }
  return m;
}

TtdMatrix build_ttd_matrix(std::span<const TrackHistory* const> tracks, double threshold,
                           const GateConfig& gates) {
  const auto ordered = v2v_first(tracks);
  TtdMatrix m = empty_matrix(ordered);
  const auto n = static_cast<std::ptrdiff_t>(ordered.size());
  std::vector<std::vector<GateRejection>> per_row(ordered.size());
  // Rows write disjoint cells; numerical errors are rethrown after the loop.
  std::vector<std::exception_ptr> errors(ordered.size());

#pragma omp parallel for schedule(dynamic, 4) if (n >= 16)
  for (std::ptrdiff_t row = 0; row < n; ++row) {
    try {
      fill_row(m, ordered, static_cast<std::size_t>(row), threshold, gates,
               per_row[static_cast<std::size_t>(row)]);
    } catch (...) {
      errors[static_cast<std::size_t>(row)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& r : per_row) {
    m.gate_rejections.insert(m.gate_rejections.end(), r.begin(), r.end());
  }
  return m;
}

bool Cluster::contains(const TrackKey& k) const {
  return std::find(members.begin(), members.end(), k) != members.end();
}

std::vector<Cluster> cluster_tracks(const TtdMatrix& m) {
  const std::size_t n = m.size();
  const auto& labels = m.labels();
  std::vector<double> work(n * n, kInf);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < r; ++c) work[r * n + c] = m.at(r, c);
  }
  auto cell = [&](std::size_t i, std::size_t j) -> double& {
    return i > j ? work[i * n + j] : work[j * n + i];
  };
  // Makes track i unavailable to every track of sensor s.
  auto invalidate = [&](std::size_t i, Sensor s) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && labels[j].sensor == s) cell(i, j) = kInf;
    }
  };

  std::vector<int> cluster_of(n, -1);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> pick_distance;

  for (;;) {
    double best = kInf;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = 1; r < n; ++r) {
      for (std::size_t c = 0; c < r; ++c) {
        if (work[r * n + c] < best) {
          best = work[r * n + c];
          br = r;
          bc = c;
        }
      }
    }
    if (!std::isfinite(best)) break;

    int touched = -1;
    const int gr = cluster_of[br];
    const int gc = cluster_of[bc];
    if (gr < 0 && gc < 0) {
      touched = static_cast<int>(groups.size());
      groups.push_back({bc, br});
      pick_distance.push_back(best);
      cluster_of[bc] = cluster_of[br] = touched;
    } else if ((gr < 0) != (gc < 0)) {
      // Only reachable with three or more sensors.
      const int g = gr < 0 ? gc : gr;
      const std::size_t other = gr < 0 ? br : bc;
      const bool sensor_taken = std::any_of(groups[g].begin(), groups[g].end(), [&](std::size_t k) {
        return labels[k].sensor == labels[other].sensor;
      });
      if (!sensor_taken) {
        groups[g].push_back(other);
        cluster_of[other] = g;
        touched = g;
      }
    }

    cell(br, bc) = kInf;
    invalidate(br, labels[bc].sensor);
    invalidate(bc, labels[br].sensor);
    if (touched >= 0) {
      for (std::size_t member : groups[touched]) {
        for (std::size_t other : groups[touched]) invalidate(member, labels[other].sensor);
      }
    }
  }

  std::vector<Cluster> out;
  out.reserve(groups.size() + n);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto idx = groups[g];
    std::sort(idx.begin(), idx.end());
    Cluster c;
    for (std::size_t k : idx) c.members.push_back(labels[k]);
    c.distance = pick_distance[g];
    out.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (cluster_of[k] < 0) out.push_back(Cluster{{labels[k]}, std::nullopt, std::nullopt});
  }
  return out;
}

const Cluster* AssociationResult::cluster_of(const TrackKey& k) const {
  for (const Cluster& c : clusters) {
    if (c.contains(k)) return &c;
  }
  return nullptr;
}

AssociationResult associate_tick(std::span<const TrackHistory* const> histories, double t,
                                 const AssociationConfig& cfg) {
  AssociationResult res;
  res.t = t;
  if (histories.empty()) return res;
  TtdMatrix m = build_ttd_matrix(histories, cfg.threshold, cfg.gates);
  res.clusters = cluster_tracks(m);
  res.gate_rejections = std::move(m.gate_rejections);
  for (Cluster& c : res.clusters) {
    if (c.distance) c.confidence = confidence(*c.distance, cfg.confidence_th);
  }
  return res;
}

}  // namespace tta
