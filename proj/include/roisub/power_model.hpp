// CMOS sensor average-power model extended to per-frame effective resolution
// under ROI readout.
//
// At a given effective resolution n the sensor runs at the optimal clock
// f = sqrt(c2*n / (alpha1*T_exp)) and draws
//   P = alpha1*R*T_exp*f + R*c2*n/f
// whose two terms are equal at that clock, so P = 2*R*sqrt(alpha1*T_exp*c2*n).
// Constants are used exactly as printed for the characterized sensors; the
// output unit is "model watts" and all claims downstream are ratios and
// orderings, never absolute calibration.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roisub/geometry.hpp"
#include "roisub/pipeline.hpp"

namespace roisub {

struct SensorModel {
  std::string name;
  int width = 0;
  int height = 0;
  double c2 = 0.0;          // static power coefficient
  double alpha1 = 0.0;      // sensor intrinsic, independent of resolution
  double frame_rate = 30.0; // fps
  double exposure_ms = 0.05;

  std::int64_t full_resolution() const {
    return static_cast<std::int64_t>(width) * height;
  }

  static SensorModel b1() { return {"B1", 3264, 2448, 159.0, 4.0e-6}; }
  static SensorModel b2() { return {"B2", 2592, 1944, 93.0, 8.2e-7}; }
  static SensorModel b3() { return {"B3", 752, 480, 13.1, 3.35e-6}; }
  static std::optional<SensorModel> preset(const std::string& name);
};

/// Optimal readout clock at n_effective pixels. Throws std::invalid_argument
/// for n_effective <= 0 (empty frames are handled by frame_power directly).
double optimal_clock(const SensorModel& sensor, double n_effective);

/// Average power at the optimal clock; 0 pixels costs 0 by convention.
double frame_power(const SensorModel& sensor, double n_effective);

/// Duty-cycle form P = (P_idle*T_exp + P_active*T_active) / T_frame.
double frame_power_phases(double p_idle, double p_active, double t_exp, double t_active,
                          double t_frame);

struct PowerReport {
  double mean_power = 0.0;
  double full_frame_power = 0.0;
  double savings_ratio = 0.0;  // 1 - mean/full when the ROI stays inside the frame
  std::vector<double> per_frame_power;
  ReadoutMode readout = ReadoutMode::window;
};

/// Per-frame power from each record's active pixel count, with the pixel
/// fraction mapped onto the sensor's native resolution (keyframes land on
/// full N). Mean over frames; savings vs. the all-full-frame baseline.
PowerReport sequence_power(const SensorModel& sensor, const std::vector<FrameRecord>& records,
                           ReadoutMode readout);

struct TradeoffRow {
  std::string label;
  double auc = 0.0;
  double mean_power = 0.0;
};

/// Rows sorted by AUC descending; ties broken by lower power first.
std::vector<TradeoffRow> tradeoff_table(std::vector<TradeoffRow> runs);

}  // namespace roisub
