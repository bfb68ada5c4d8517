// Constant-velocity Kalman filter over bounding-box state.
//
// State is [cx, cy, w, h, vcx, vcy, vw, vh] in pixels and pixels/frame.
// predict() applies x' = A x, P' = A P A^T + Q; update() applies the
// innovation / gain / correction sequence
//   y = b - H x,  S = H P H^T + R,  K = P H^T S^-1,
//   x' = x + K y,  P' = (I - K H) P.

#pragma once

#include <Eigen/Dense>
#include <array>

#include "roisub/geometry.hpp"

namespace roisub {

inline constexpr int kStateDim = 8;
inline constexpr int kMeasDim = 4;

using StateVec = Eigen::Matrix<double, kStateDim, 1>;
using StateMat = Eigen::Matrix<double, kStateDim, kStateDim>;
using MeasVec = Eigen::Matrix<double, kMeasDim, 1>;
using MeasMat = Eigen::Matrix<double, kMeasDim, kMeasDim>;
using ObsMat = Eigen::Matrix<double, kMeasDim, kStateDim>;
using GainMat = Eigen::Matrix<double, kStateDim, kMeasDim>;

struct KalmanParams {
  StateMat transition;         // A
  StateMat process_noise;      // Q
  ObsMat observation;          // H
  MeasMat measurement_noise;   // R (named R_meas in configs; R is the frame rate elsewhere)

  /// SORT-style constant-velocity model: A = [[I, dt*I],[0, I]], H = [I4 | 0],
  /// Q = diag(1,1,1,1,.25,.25,.25,.25), R = diag(4,4,4,4).
  static KalmanParams constant_velocity(double dt = 1.0);
};

/// Default initial covariance diagonal: loose on velocities, moderate on position.
inline constexpr std::array<double, kStateDim> kDefaultP0Diag = {10, 10, 10, 10, 100, 100, 100, 100};

struct KalmanState {
  StateVec x = StateVec::Zero();
  StateMat P = StateMat::Zero();
};

struct Innovation {
  MeasVec residual = MeasVec::Zero();        // y
  MeasMat covariance = MeasMat::Zero();      // S
  GainMat gain = GainMat::Zero();            // K
};

/// [cx, cy, w, h] measurement vector for a box.
MeasVec box_to_measurement(const BoundingBox& box);

/// Inverse of box_to_measurement; w and h are clamped to >= 0 on export.
BoundingBox state_to_box(const KalmanState& state);

/// Seeds the state from the first-frame annotation: position components from
/// the box center/size, velocities zero, P = diag(p0_diag). Throws
/// std::invalid_argument on a degenerate seed box.
KalmanState kalman_init(const BoundingBox& first_box, const std::array<double, kStateDim>& p0_diag = kDefaultP0Diag);

KalmanState kalman_predict(const KalmanState& state, const KalmanParams& params);

/// Measurement update. Throws std::runtime_error when S is numerically
/// singular (condition number above 1e12).
std::pair<KalmanState, Innovation> kalman_update(const KalmanState& predicted,
                                                 const BoundingBox& measurement,
                                                 const KalmanParams& params);

/// Stateful wrapper used by the pipeline: one instance per tracked sequence.
class RoiKalmanFilter {
 public:
  RoiKalmanFilter(const BoundingBox& first_box, const KalmanParams& params,
                  const std::array<double, kStateDim>& p0_diag = kDefaultP0Diag)
      : params_(params), state_(kalman_init(first_box, p0_diag)) {}

  /// Advances one frame and returns the predicted ROI.
  BoundingBox predict() {
    state_ = kalman_predict(state_, params_);
    return state_to_box(state_);
  }

  Innovation update(const BoundingBox& measurement) {
    auto [next, innovation] = kalman_update(state_, measurement, params_);
    state_ = next;
    return innovation;
  }

  const KalmanState& state() const { return state_; }
  BoundingBox box() const { return state_to_box(state_); }

 private:
  KalmanParams params_;
  KalmanState state_;
};

}  // namespace roisub
