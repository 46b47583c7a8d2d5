#include "tta/kalman.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "tta/errors.hpp"

namespace tta {

KfModel::KfModel(double q, const Mat2& R) : q_(q), R_(R) {
  if (!std::isfinite(q) || q < 0.0) {
    std::ostringstream os;
    os << "process noise q must be >= 0, got " << q;
    throw ConfigError(os.str());
  }
  if (!R.allFinite() || std::abs(R(0, 1) - R(1, 0)) > 1e-12) {
    throw ConfigError("measurement noise R must be finite and symmetric");
  }
  Eigen::LLT<Mat2> llt(R);
  if (llt.info() != Eigen::Success || R(0, 0) <= 0.0 || R(1, 1) <= 0.0) {
    throw ConfigError("measurement noise R must be positive definite");
  }
}

Mat4 KfModel::F(double dt) {
  Mat4 f = Mat4::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  return f;
}

Mat24 KfModel::H() {
  Mat24 h = Mat24::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

Mat4 KfModel::Q(double dt) const {
  // G = [dt^2/2, dt] per axis, Q = q G G^T.
  const double a = 0.25 * dt * dt * dt * dt;
  const double b = 0.5 * dt * dt * dt;
  const double c = dt * dt;
  Mat4 out = Mat4::Zero();
  out(0, 0) = out(1, 1) = q_ * a;
  out(0, 2) = out(2, 0) = out(1, 3) = out(3, 1) = q_ * b;
  out(2, 2) = out(3, 3) = q_ * c;
  return out;
}

TrackState kf_predict(const TrackState& s, const KfModel& model, double dt) {
  if (!(dt >= 0.0)) {
    std::ostringstream os;
    os << "negative prediction step dt=" << dt << " from t=" << s.t;
    throw OrderingError(os.str());
  }
  const Mat4 F = KfModel::F(dt);
  TrackState out;
  out.x = F * s.x;
  out.P = F * s.P * F.transpose() + model.Q(dt);
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.t = s.t + dt;
  return out;
}

Innovation kf_innovation(const TrackState& predicted, const KfModel& model, const Vec2& z) {
  const Mat24 H = KfModel::H();
  return {z - H * predicted.x, H * predicted.P * H.transpose() + model.R()};
}

TrackState kf_update(const TrackState& predicted, const KfModel& model, const Vec2& z) {
  const Mat24 H = KfModel::H();
  const Innovation inn = kf_innovation(predicted, model, z);
  // K = P' H^T S^-1, solved through S rather than forming the inverse.
  const Eigen::Matrix<double, 4, 2> PHt = predicted.P * H.transpose();
  const Eigen::Matrix<double, 4, 2> K = inn.S.llt().solve(PHt.transpose()).transpose();

  TrackState out;
  out.t = predicted.t;
  out.x = predicted.x + K * inn.y;
  out.P = (Mat4::Identity() - K * H) * predicted.P;
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

bool is_valid_covariance(const Mat4& P, double tol) {
  if (!P.allFinite()) return false;
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat4> es(P, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace tta
