#include "roisub/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace roisub {

std::optional<SensorModel> SensorModel::preset(const std::string& name) {
  if (name == "B1" || name == "b1") return b1();
  if (name == "B2" || name == "b2") return b2();
  if (name == "B3" || name == "b3") return b3();
  return std::nullopt;
}

double optimal_clock(const SensorModel& sensor, double n_effective) {
  if (!(n_effective > 0.0))
    throw std::invalid_argument("optimal_clock: n_effective must be positive");
  return std::sqrt(sensor.c2 * n_effective / (sensor.alpha1 * sensor.exposure_ms));
}

double frame_power(const SensorModel& sensor, double n_effective) {
  if (n_effective < 0.0)
    throw std::invalid_argument("frame_power: n_effective must be >= 0");
  if (n_effective == 0.0) return 0.0;
  const double f = optimal_clock(sensor, n_effective);
  return sensor.alpha1 * sensor.frame_rate * sensor.exposure_ms * f +
         sensor.frame_rate * sensor.c2 * n_effective / f;
}

double frame_power_phases(double p_idle, double p_active, double t_exp, double t_active,
                          double t_frame) {
  if (!(t_frame > 0.0))
    throw std::invalid_argument("frame_power_phases: t_frame must be positive");
  return (p_idle * t_exp + p_active * t_active) / t_frame;
}

PowerReport sequence_power(const SensorModel& sensor, const std::vector<FrameRecord>& records,
                           ReadoutMode readout) {
  if (records.empty()) throw std::invalid_argument("sequence_power: no records");

  // Keyframes carry the sequence's full resolution; scale every count so ROI
  // fractions land on the sensor's native pixel grid.
  std::int64_t sequence_full = 0;
  for (const auto& r : records) sequence_full = std::max(sequence_full, r.active_pixels);
  if (sequence_full <= 0) throw std::invalid_argument("sequence_power: no active pixels recorded");
  const double scale =
      static_cast<double>(sensor.full_resolution()) / static_cast<double>(sequence_full);

  PowerReport report;
  report.readout = readout;
  report.full_frame_power = frame_power(sensor, static_cast<double>(sensor.full_resolution()));
  report.per_frame_power.reserve(records.size());
  double sum = 0.0;
  for (const auto& r : records) {
    const double p = frame_power(sensor, static_cast<double>(r.active_pixels) * scale);
    report.per_frame_power.push_back(p);
    sum += p;
  }
  report.mean_power = sum / static_cast<double>(records.size());
  report.savings_ratio = 1.0 - report.mean_power / report.full_frame_power;
  return report;
}

std::vector<TradeoffRow> tradeoff_table(std::vector<TradeoffRow> runs) {
  std::stable_sort(runs.begin(), runs.end(), [](const TradeoffRow& a, const TradeoffRow& b) {
    if (a.auc != b.auc) return a.auc > b.auc;
    return a.mean_power < b.mean_power;
  });
  return runs;
}

}  // namespace roisub
