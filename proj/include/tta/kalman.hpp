#pragma once

#include <Eigen/Core>

namespace tta {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat24 = Eigen::Matrix<double, 2, 4>;

/// Filtered state (px, py, vx, vy) in the host frame with its covariance.
struct TrackState {
  Vec4 x{Vec4::Zero()};
  Mat4 P{Mat4::Identity()};
  double t{0.0};
};

/// Constant-velocity model with position-only measurements. There is no
/// control input. Process noise uses the piecewise-constant acceleration
/// discretization, q being the acceleration variance per axis.
class KfModel {
 public:
  /// Throws ConfigError if q < 0 or R is not symmetric positive definite.
  KfModel(double q, const Mat2& R);

  static Mat4 F(double dt);
  static Mat24 H();
  Mat4 Q(double dt) const;
  const Mat2& R() const noexcept { return R_; }
  double q() const noexcept { return q_; }

 private:
  double q_;
  Mat2 R_;
};

/// Throws OrderingError if dt < 0.
TrackState kf_predict(const TrackState& s, const KfModel& model, double dt);

/// Standard update P = (I - KH)P', symmetrized.
TrackState kf_update(const TrackState& predicted, const KfModel& model, const Vec2& z);

/// Innovation and its covariance for a predicted state; exposed for
/// consistency checks.
struct Innovation {
  Vec2 y;
  Mat2 S;
};
Innovation kf_innovation(const TrackState& predicted, const KfModel& model, const Vec2& z);

/// True when P is symmetric within tol and its smallest eigenvalue >= -tol.
bool is_valid_covariance(const Mat4& P, double tol = 1e-9);

}  // namespace tta
