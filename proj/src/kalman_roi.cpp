#include "roisub/kalman_roi.hpp"

#include <stdexcept>

namespace roisub {

namespace {

// P never gains asymmetry beyond roundoff; enforce it after every step.
StateMat symmetrized(const StateMat& m) { return (m + m.transpose()) / 2.0; }

}  // namespace

KalmanParams KalmanParams::constant_velocity(double dt) {
  KalmanParams p;
  p.transition = StateMat::Identity();
  for (int i = 0; i < kMeasDim; ++i) p.transition(i, i + kMeasDim) = dt;
  p.observation = ObsMat::Zero();
  for (int i = 0; i < kMeasDim; ++i) p.observation(i, i) = 1.0;
  p.process_noise = StateMat::Zero();
  for (int i = 0; i < kMeasDim; ++i) {
    p.process_noise(i, i) = 1.0;
    p.process_noise(i + kMeasDim, i + kMeasDim) = 0.25;
  }
  p.measurement_noise = MeasMat::Identity() * 4.0;
  return p;
}

MeasVec box_to_measurement(const BoundingBox& box) {
  MeasVec z;
  z << box.cx(), box.cy(), box.w, box.h;
  return z;
}

BoundingBox state_to_box(const KalmanState& state) {
  const double w = std::max(state.x(2), 0.0);
  const double h = std::max(state.x(3), 0.0);
  return {state.x(0) - w / 2.0, state.x(1) - h / 2.0, w, h};
}

KalmanState kalman_init(const BoundingBox& first_box, const std::array<double, kStateDim>& p0_diag) {
  if (first_box.degenerate())
    throw std::invalid_argument("kalman_init: degenerate first-frame box");
  KalmanState state;
  state.x.head<kMeasDim>() = box_to_measurement(first_box);
  for (int i = 0; i < kStateDim; ++i) state.P(i, i) = p0_diag[static_cast<std::size_t>(i)];
  return state;
}

KalmanState kalman_predict(const KalmanState& state, const KalmanParams& params) {
  KalmanState out;
  out.x = params.transition * state.x;
  out.P = symmetrized(params.transition * state.P * params.transition.transpose() + params.process_noise);
  return out;
}

std::pair<KalmanState, Innovation> kalman_update(const KalmanState& predicted,
                                                 const BoundingBox& measurement,
                                                 const KalmanParams& params) {
  const ObsMat& H = params.observation;

  Innovation innovation;
  innovation.residual = box_to_measurement(measurement) - H * predicted.x;
  innovation.covariance = H * predicted.P * H.transpose() + params.measurement_noise;

  Eigen::JacobiSVD<MeasMat> svd(innovation.covariance);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(kMeasDim - 1);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw std::runtime_error("kalman_update: innovation covariance is numerically singular");

  // K = P H^T S^-1 via an LDLT solve of S K^T = H P^T rather than an explicit inverse.
  const GainMat pht = predicted.P * H.transpose();
  innovation.gain = innovation.covariance.ldlt().solve(pht.transpose()).transpose();

  KalmanState out;
  out.x = predicted.x + innovation.gain * innovation.residual;
  out.P = symmetrized((StateMat::Identity() - innovation.gain * H) * predicted.P);
  return {out, innovation};
}

}  // namespace roisub
