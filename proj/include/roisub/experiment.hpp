// Benchmark harness: experiment configuration, per-sequence fan-out, and the
// plot-ready CSV/JSON emitters behind the CLI subcommands.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "roisub/dataset_io.hpp"
#include "roisub/detectors.hpp"
#include "roisub/kalman_roi.hpp"
#include "roisub/metrics.hpp"
#include "roisub/pipeline.hpp"
#include "roisub/power_model.hpp"

namespace roisub {

inline constexpr const char* kToolVersion = "0.1.0";

struct ExperimentConfig {
  // Dataset source: a directory of sequences, or inline synthetic specs.
  std::string dataset_dir;
  std::vector<SyntheticSpec> synthetic;

  DetectorKind detector;
  PredictorMode mode = PredictorMode::kalman;
  std::vector<int> intervals = {11};  // keyframing intervals; i -> k = max(i-1, 0)
  SensorModel sensor = SensorModel::b3();
  ReadoutMode readout = ReadoutMode::window;
  LatencyModel latency;

  double kf_dt = 1.0;
  std::array<double, kStateDim> q_diag = {1, 1, 1, 1, 0.25, 0.25, 0.25, 0.25};
  std::array<double, kMeasDim> r_diag = {4, 4, 4, 4};
  std::array<double, kStateDim> p0_diag = kDefaultP0Diag;

  std::string out_dir = "out";
  std::string label;  // manifest/tradeoff row label; composed when empty
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = available parallelism

  KalmanParams kalman_params() const;
  RunConfig run_config(int interval) const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// The conventions block every metadata sidecar and manifest carries.
nlohmann::json conventions_json(const ExperimentConfig& config);

struct SequenceResult {
  std::string id;
  std::vector<FrameRecord> records;
  double auc = 0.0;
  PowerReport power;
  FpsEstimate fps;
};

/// One (config, interval) evaluation with no file I/O. Sequences fan out to a
/// bounded worker pool; per-sequence RNG streams derive from (seed, index),
/// and aggregation runs in index order, so results do not depend on the
/// worker count.
struct IntervalResult {
  int interval = 0;
  int k = 0;
  double aggregate_auc = 0.0;
  double mean_power = 0.0;
  FpsEstimate fps;
  std::vector<SequenceResult> sequences;
};

IntervalResult run_interval(const ExperimentConfig& config, int interval);

struct RunManifest {
  nlohmann::json document;
  std::filesystem::path path;
};

/// Executes run_interval, writes per-sequence record CSVs (with sidecars) and
/// the manifest JSON atomically under <out_dir>/run_i<interval>/.
RunManifest cmd_run(const ExperimentConfig& config, int interval);

/// One cmd_run per configured interval; emits keyframing.csv with columns
/// interval, auc, mean_power, algorithm_fps, system_fps.
std::filesystem::path cmd_sweep_keyframing(const ExperimentConfig& config);

/// Emits the 21-point dataset success curve per interval as success_plot.csv
/// (label column + one precision column per threshold).
std::filesystem::path cmd_sweep_threshold(const ExperimentConfig& config);

/// Collates manifests into tradeoff.csv rows (label, auc, mean_power) sorted
/// by AUC descending, ties broken by lower power.
std::filesystem::path cmd_tradeoff(const std::vector<std::filesystem::path>& manifest_paths,
                                   const std::filesystem::path& out_dir);

/// Fixed 6-decimal formatting used for every real-valued CSV field.
std::string format_fixed(double value);

}  // namespace roisub
