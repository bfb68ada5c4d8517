#include "roisub/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "roisub/log.hpp"
#include "roisub/rng.hpp"

namespace roisub {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

// --- enum <-> string ---------------------------------------------------------

namespace {

PredictorMode mode_from_string(const std::string& s) {
  if (s == "kalman") return PredictorMode::kalman;
  if (s == "memoization" || s == "memo") return PredictorMode::memoization;
  if (s == "detector_chain" || s == "chain") return PredictorMode::detector_chain;
  throw std::invalid_argument("unknown predictor mode: " + s);
}

ReadoutMode readout_from_string(const std::string& s) {
  if (s == "window") return ReadoutMode::window;
  if (s == "column_skip" || s == "colskip") return ReadoutMode::column_skip;
  throw std::invalid_argument("unknown readout mode: " + s);
}

std::string detector_name(const DetectorKind& kind) {
  switch (kind.type) {
    case DetectorKind::Type::oracle: return "oracle";
    case DetectorKind::Type::trace: return "trace";
    case DetectorKind::Type::mean_shift: return "meanshift";
  }
  return "?";
}

DetectorKind::Type detector_type_from_string(const std::string& s) {
  if (s == "oracle") return DetectorKind::Type::oracle;
  if (s == "trace") return DetectorKind::Type::trace;
  if (s == "meanshift" || s == "mean_shift") return DetectorKind::Type::mean_shift;
  throw std::invalid_argument("unknown detector type: " + s);
}

template <std::size_t N>
std::array<double, N> array_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N)
    throw std::invalid_argument(std::string(what) + " must be an array of " + std::to_string(N));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<double>();
  return out;
}

MotionSpec motion_from_json(const json& j) {
  MotionSpec m;
  const std::string type = j.value("type", "constant_velocity");
  if (type == "constant_velocity") {
    m.type = MotionType::constant_velocity;
    m.vx = j.value("vx", 0.0);
    m.vy = j.value("vy", 0.0);
  } else if (type == "sinusoidal") {
    m.type = MotionType::sinusoidal;
    m.amplitude = j.value("amplitude", 0.0);
    m.period = j.value("period", 60.0);
  } else if (type == "random_walk") {
    m.type = MotionType::random_walk;
    m.step_sigma = j.value("step_sigma", 1.0);
  } else {
    throw std::invalid_argument("unknown motion type: " + type);
  }
  return m;
}

json motion_to_json(const MotionSpec& m) {
  switch (m.type) {
    case MotionType::constant_velocity:
      return {{"type", "constant_velocity"}, {"vx", m.vx}, {"vy", m.vy}};
    case MotionType::sinusoidal:
      return {{"type", "sinusoidal"}, {"amplitude", m.amplitude}, {"period", m.period}};
    case MotionType::random_walk:
      return {{"type", "random_walk"}, {"step_sigma", m.step_sigma}};
  }
  return {};
}

SyntheticSpec synthetic_from_json(const json& j) {
  SyntheticSpec s;
  s.id = j.value("id", "synthetic");
  if (j.contains("dims")) {
    s.dims.width = j["dims"][0].get<int>();
    s.dims.height = j["dims"][1].get<int>();
  }
  s.n_frames = j.value("n_frames", 100);
  if (j.contains("motion")) s.motion = motion_from_json(j["motion"]);
  if (j.contains("box")) {
    s.box_w = j["box"][0].get<double>();
    s.box_h = j["box"][1].get<double>();
  }
  if (j.contains("start")) {
    s.start_x = j["start"][0].get<double>();
    s.start_y = j["start"][1].get<double>();
  }
  if (j.contains("target_color"))
    for (int c = 0; c < 3; ++c)
      s.target_color[static_cast<std::size_t>(c)] = j["target_color"][c].get<std::uint8_t>();
  if (j.contains("background_color"))
    for (int c = 0; c < 3; ++c)
      s.background_color[static_cast<std::size_t>(c)] = j["background_color"][c].get<std::uint8_t>();
  s.rng_seed = j.value("seed", 0ULL);
  return s;
}

json synthetic_to_json(const SyntheticSpec& s) {
  json j{{"id", s.id},
         {"dims", {s.dims.width, s.dims.height}},
         {"n_frames", s.n_frames},
         {"motion", motion_to_json(s.motion)},
         {"box", {s.box_w, s.box_h}},
         {"target_color", s.target_color},
         {"background_color", s.background_color},
         {"seed", s.rng_seed}};
  if (s.start_x && s.start_y) j["start"] = {*s.start_x, *s.start_y};
  return j;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

// --- config ------------------------------------------------------------------

KalmanParams ExperimentConfig::kalman_params() const {
  KalmanParams params = KalmanParams::constant_velocity(kf_dt);
  params.process_noise = StateMat::Zero();
  for (int i = 0; i < kStateDim; ++i)
    params.process_noise(i, i) = q_diag[static_cast<std::size_t>(i)];
  params.measurement_noise = MeasMat::Zero();
  for (int i = 0; i < kMeasDim; ++i)
    params.measurement_noise(i, i) = r_diag[static_cast<std::size_t>(i)];
  return params;
}

RunConfig ExperimentConfig::run_config(int interval) const {
  RunConfig rc;
  rc.mode = mode;
  rc.schedule = FrameSchedule::from_interval(interval);
  rc.readout = readout;
  rc.kf_params = kalman_params();
  rc.p0_diag = p0_diag;
  rc.latency = latency;
  return rc;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("dataset")) {
    const json& d = j["dataset"];
    if (d.contains("dir")) c.dataset_dir = d["dir"].get<std::string>();
    if (d.contains("synthetic"))
      for (const auto& s : d["synthetic"]) c.synthetic.push_back(synthetic_from_json(s));
  }
  if (j.contains("detector")) {
    const json& d = j["detector"];
    c.detector.type = detector_type_from_string(d.value("type", "oracle"));
    c.detector.noise_sigma = d.value("noise_sigma", 0.0);
    c.detector.drop_rate = d.value("drop_rate", 0.0);
    c.detector.box_scale = d.value("box_scale", 1.0);
    c.detector.rng_seed = d.value("seed", 0ULL);
    c.detector.trace_path = d.value("trace_path", "");
    if (d.contains("mean_shift")) {
      const json& m = d["mean_shift"];
      c.detector.mean_shift.bins_per_channel = m.value("bins_per_channel", 16);
      c.detector.mean_shift.max_iters = m.value("max_iters", 20);
      c.detector.mean_shift.epsilon = m.value("epsilon", 1.0);
    }
  }
  if (j.contains("mode")) c.mode = mode_from_string(j["mode"].get<std::string>());
  if (j.contains("intervals")) c.intervals = j["intervals"].get<std::vector<int>>();
  if (j.contains("sensor")) {
    if (j["sensor"].is_string()) {
      auto preset = SensorModel::preset(j["sensor"].get<std::string>());
      if (!preset) throw std::invalid_argument("unknown sensor preset: " + j["sensor"].get<std::string>());
      c.sensor = *preset;
    } else {
      const json& s = j["sensor"];
      c.sensor.name = s.value("name", "custom");
      c.sensor.width = s.at("width").get<int>();
      c.sensor.height = s.at("height").get<int>();
      c.sensor.c2 = s.at("c2").get<double>();
      c.sensor.alpha1 = s.at("alpha1").get<double>();
      c.sensor.frame_rate = s.value("frame_rate", 30.0);
      c.sensor.exposure_ms = s.value("exposure_ms", 0.05);
    }
  }
  if (j.contains("readout")) c.readout = readout_from_string(j["readout"].get<std::string>());
  if (j.contains("latency_ms")) {
    const json& l = j["latency_ms"];
    c.latency.capture_ms = l.value("capture", 0.0);
    c.latency.preprocess_ms = l.value("preprocess", 0.0);
    c.latency.detect_ms = l.value("detect", 0.0);
    c.latency.postprocess_ms = l.value("postprocess", 0.0);
    c.latency.kf_update_ms = l.value("kf_update", 0.0);
    c.latency.kf_predict_ms = l.value("kf_predict", 0.0);
  }
  if (j.contains("kalman")) {
    const json& k = j["kalman"];
    c.kf_dt = k.value("dt", 1.0);
    if (k.contains("q_diag")) c.q_diag = array_from_json<kStateDim>(k["q_diag"], "kalman.q_diag");
    if (k.contains("r_diag")) c.r_diag = array_from_json<kMeasDim>(k["r_diag"], "kalman.r_diag");
    if (k.contains("p0_diag")) c.p0_diag = array_from_json<kStateDim>(k["p0_diag"], "kalman.p0_diag");
  }
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("label")) c.label = j["label"].get<std::string>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (c.intervals.empty()) throw std::invalid_argument("config needs at least one interval");
  if (c.dataset_dir.empty() && c.synthetic.empty())
    throw std::invalid_argument("config needs a dataset dir or synthetic specs");
  return c;
}

ExperimentConfig load_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  json j;
  in >> j;
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json dataset;
  if (!c.dataset_dir.empty()) dataset["dir"] = c.dataset_dir;
  if (!c.synthetic.empty()) {
    json specs = json::array();
    for (const auto& s : c.synthetic) specs.push_back(synthetic_to_json(s));
    dataset["synthetic"] = specs;
  }
  json detector{{"type", detector_name(c.detector)}};
  if (c.detector.type == DetectorKind::Type::oracle) {
    detector["noise_sigma"] = c.detector.noise_sigma;
    detector["drop_rate"] = c.detector.drop_rate;
    detector["box_scale"] = c.detector.box_scale;
    detector["seed"] = c.detector.rng_seed;
  } else if (c.detector.type == DetectorKind::Type::trace) {
    detector["trace_path"] = c.detector.trace_path;
  } else {
    detector["mean_shift"] = {{"bins_per_channel", c.detector.mean_shift.bins_per_channel},
                              {"max_iters", c.detector.mean_shift.max_iters},
                              {"epsilon", c.detector.mean_shift.epsilon}};
  }
  return json{
      {"dataset", dataset},
      {"detector", detector},
      {"mode", to_string(c.mode)},
      {"intervals", c.intervals},
      {"sensor",
       {{"name", c.sensor.name},
        {"width", c.sensor.width},
        {"height", c.sensor.height},
        {"c2", c.sensor.c2},
        {"alpha1", c.sensor.alpha1},
        {"frame_rate", c.sensor.frame_rate},
        {"exposure_ms", c.sensor.exposure_ms}}},
      {"readout", to_string(c.readout)},
      {"latency_ms",
       {{"capture", c.latency.capture_ms},
        {"preprocess", c.latency.preprocess_ms},
        {"detect", c.latency.detect_ms},
        {"postprocess", c.latency.postprocess_ms},
        {"kf_update", c.latency.kf_update_ms},
        {"kf_predict", c.latency.kf_predict_ms}}},
      {"kalman",
       {{"dt", c.kf_dt}, {"q_diag", c.q_diag}, {"r_diag", c.r_diag}, {"p0_diag", c.p0_diag}}},
      {"out_dir", c.out_dir},
      {"label", c.label},
      {"seed", c.seed},
      {"workers", c.workers}};
}

json conventions_json(const ExperimentConfig& config) {
  return json{
      {"iou_inequality", "strict: a frame counts when iou > threshold"},
      {"threshold_grid", "0.00:0.05:1.00, 21 scored points"},
      {"interval_mapping", "interval i -> k = max(i-1, 0) predicted frames between keyframes"},
      {"aggregation", "per-sequence AUC averaged uniformly over sequences"},
      {"degenerate_annotations", "excluded from metric denominators"},
      {"readout", to_string(config.readout)},
      {"power_unit", "model watts (relative scale; constants as characterized)"}};
}

// --- sequence fan-out -----------------------------------------------------------

namespace {

std::vector<Sequence> load_all_sequences(const ExperimentConfig& config, bool want_frames) {
  std::vector<Sequence> sequences;
  for (std::size_t i = 0; i < config.synthetic.size(); ++i) {
    SyntheticSpec spec = config.synthetic[i];
    if (spec.rng_seed == 0) spec.rng_seed = mix_seed(config.seed, i);
    sequences.push_back(generate_synthetic(spec));
  }
  if (!config.dataset_dir.empty()) {
    const fs::path root = config.dataset_dir;
    for (const auto& id : list_dataset(root))
      sequences.push_back(load_dataset_sequence(root, id, want_frames));
  }
  if (sequences.empty()) throw std::runtime_error("no sequences to run");
  return sequences;
}

SequenceResult evaluate_sequence(const ExperimentConfig& config, const RunConfig& rc,
                                 const Sequence& seq, std::uint64_t stream_seed) {
  auto detector = make_detector(config.detector, stream_seed);
  SequenceResult result;
  result.id = seq.id;
  result.records = run_sequence(seq, *detector, rc);
  const auto ious = collect_ious(result.records);
  result.auc = ious.empty() ? 0.0 : sequence_auc(ious);
  result.power = sequence_power(config.sensor, result.records, config.readout);
  // FPS columns stay zero when no latency model was configured.
  if (config.latency.configured()) result.fps = fps_estimate(result.records, config.latency);
  return result;
}

}  // namespace

IntervalResult run_interval(const ExperimentConfig& config, int interval) {
  const RunConfig rc = config.run_config(interval);
  const bool want_frames = config.detector.type == DetectorKind::Type::mean_shift;
  const std::vector<Sequence> sequences = load_all_sequences(config, want_frames);
  const std::size_t n = sequences.size();

  std::vector<SequenceResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned pool =
      std::min<unsigned>(config.workers > 0 ? static_cast<unsigned>(config.workers) : hw,
                         static_cast<unsigned>(n));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        results[i] = evaluate_sequence(config, rc, sequences[i], mix_seed(config.seed, i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (pool <= 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned t = 0; t < pool; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  for (std::size_t i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  // Deterministic reduce in sequence order, independent of worker count.
  IntervalResult out;
  out.interval = interval;
  out.k = FrameSchedule::from_interval(interval).keyframe_interval;
  std::vector<std::vector<double>> per_sequence_ious;
  double power_sum = 0.0, alg_sum = 0.0, sys_sum = 0.0;
  for (const auto& r : results) {
    per_sequence_ious.push_back(collect_ious(r.records));
    power_sum += r.power.mean_power;
    alg_sum += r.fps.algorithm_fps;
    sys_sum += r.fps.system_fps;
  }
  out.aggregate_auc = dataset_auc(per_sequence_ious);
  out.mean_power = power_sum / static_cast<double>(n);
  out.fps = {alg_sum / static_cast<double>(n), sys_sum / static_cast<double>(n)};
  out.sequences = std::move(results);
  log_info("interval " + std::to_string(interval) + ": auc=" + format_fixed(out.aggregate_auc) +
           " power=" + format_fixed(out.mean_power));
  return out;
}

// --- output emitters -----------------------------------------------------------

namespace {

void write_records_csv(const fs::path& path, const std::vector<FrameRecord>& records) {
  std::string csv =
      "frame,phase,pred_x,pred_y,pred_w,pred_h,det_valid,det_x,det_y,det_w,det_h,"
      "active_pixels,iou,gt_valid,latency_ms\n";
  for (const auto& r : records) {
    csv += std::to_string(r.frame_index);
    csv += ',';
    csv += to_string(r.phase);
    for (double v : {r.predicted_box.x, r.predicted_box.y, r.predicted_box.w, r.predicted_box.h}) {
      csv += ',';
      csv += format_fixed(v);
    }
    if (r.detection && r.detection->valid) {
      csv += ",1";
      for (double v :
           {r.detection->box.x, r.detection->box.y, r.detection->box.w, r.detection->box.h}) {
        csv += ',';
        csv += format_fixed(v);
      }
    } else {
      csv += ",0,,,,";
    }
    csv += ',';
    csv += std::to_string(r.active_pixels);
    csv += ',';
    csv += format_fixed(r.iou_vs_gt);
    csv += r.gt_valid ? ",1," : ",0,";
    csv += format_fixed(r.latency_ms);
    csv += '\n';
  }
  write_text_atomic(path, csv);
}

void write_sidecar(const fs::path& csv_path, const ExperimentConfig& config,
                   const json& extra = json::object()) {
  json meta{{"conventions", conventions_json(config)},
            {"tool_version", kToolVersion},
            {"run",
             {{"detector", detector_name(config.detector)},
              {"mode", to_string(config.mode)},
              {"sensor", config.sensor.name}}}};
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  write_text_atomic(csv_path.string() + ".meta.json", meta.dump(2) + "\n");
}

std::string run_label(const ExperimentConfig& config, int interval) {
  if (!config.label.empty()) return config.label + "_i" + std::to_string(interval);
  return detector_name(config.detector) + "_" + to_string(config.mode) + "_i" +
         std::to_string(interval);
}

}  // namespace

namespace {

// Dataset success curve: mean per-sequence precision at each threshold.
std::vector<double> dataset_curve(const std::vector<SequenceResult>& sequences) {
  std::vector<double> mean_precision(static_cast<std::size_t>(kThresholdCount), 0.0);
  for (const auto& seq : sequences) {
    const SuccessCurve curve = success_curve(collect_ious(seq.records));
    for (std::size_t i = 0; i < mean_precision.size(); ++i)
      mean_precision[i] += curve.precision[i];
  }
  for (double& p : mean_precision) p /= static_cast<double>(sequences.size());
  return mean_precision;
}

}  // namespace

RunManifest cmd_run(const ExperimentConfig& config, int interval) {
  const IntervalResult result = run_interval(config, interval);
  const fs::path run_dir = fs::path(config.out_dir) / ("run_i" + std::to_string(interval));
  fs::create_directories(run_dir);

  // Long-format curve for plotting, one row per threshold.
  {
    const auto grid = threshold_grid();
    const auto precision = dataset_curve(result.sequences);
    std::string csv = "threshold,precision\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      csv += format_fixed(grid[i]) + ',' + format_fixed(precision[i]) + '\n';
    write_text_atomic(run_dir / "success_curve.csv", csv);
    write_sidecar(run_dir / "success_curve.csv", config,
                  {{"interval", interval}, {"k", result.k}});
  }

  json sequence_entries = json::array();
  for (const auto& seq : result.sequences) {
    const std::string csv_name = seq.id + "_records.csv";
    write_records_csv(run_dir / csv_name, seq.records);
    write_sidecar(run_dir / csv_name, config,
                  {{"sequence", seq.id}, {"interval", interval}, {"k", result.k}});
    sequence_entries.push_back({{"id", seq.id},
                                {"auc", seq.auc},
                                {"mean_power", seq.power.mean_power},
                                {"savings_ratio", seq.power.savings_ratio},
                                {"records_csv", csv_name}});
  }

  RunManifest manifest;
  manifest.document = json{{"tool_version", kToolVersion},
                           {"label", run_label(config, interval)},
                           {"interval", interval},
                           {"k", result.k},
                           {"config", config_to_json(config)},
                           {"conventions", conventions_json(config)},
                           {"aggregate",
                            {{"auc", result.aggregate_auc},
                             {"mean_power", result.mean_power},
                             {"algorithm_fps", result.fps.algorithm_fps},
                             {"system_fps", result.fps.system_fps}}},
                           {"sequences", sequence_entries}};
  manifest.path = run_dir / "manifest.json";
  write_text_atomic(manifest.path, manifest.document.dump(2) + "\n");
  return manifest;
}

std::filesystem::path cmd_sweep_keyframing(const ExperimentConfig& config) {
  std::string csv = "interval,auc,mean_power,algorithm_fps,system_fps\n";
  for (int interval : config.intervals) {
    const RunManifest manifest = cmd_run(config, interval);
    const json& agg = manifest.document["aggregate"];
    csv += std::to_string(interval) + ',' + format_fixed(agg["auc"].get<double>()) + ',' +
           format_fixed(agg["mean_power"].get<double>()) + ',' +
           format_fixed(agg["algorithm_fps"].get<double>()) + ',' +
           format_fixed(agg["system_fps"].get<double>()) + '\n';
  }
  fs::create_directories(config.out_dir);
  const fs::path path = fs::path(config.out_dir) / "keyframing.csv";
  write_text_atomic(path, csv);
  write_sidecar(path, config, {{"sweep", "keyframing"}, {"intervals", config.intervals}});
  return path;
}

std::filesystem::path cmd_sweep_threshold(const ExperimentConfig& config) {
  const auto grid = threshold_grid();
  std::string csv = "label";
  for (double t : grid) csv += ",p_" + format_fixed(t);
  csv += '\n';

  for (int interval : config.intervals) {
    const IntervalResult result = run_interval(config, interval);
    csv += run_label(config, interval);
    for (double p : dataset_curve(result.sequences)) csv += ',' + format_fixed(p);
    csv += '\n';
  }
  fs::create_directories(config.out_dir);
  const fs::path path = fs::path(config.out_dir) / "success_plot.csv";
  write_text_atomic(path, csv);
  write_sidecar(path, config, {{"sweep", "threshold"}});
  return path;
}

std::filesystem::path cmd_tradeoff(const std::vector<fs::path>& manifest_paths,
                                   const fs::path& out_dir) {
  if (manifest_paths.empty()) throw std::invalid_argument("cmd_tradeoff: no manifests");
  std::vector<TradeoffRow> rows;
  for (const auto& path : manifest_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    json doc;
    in >> doc;
    rows.push_back({doc.at("label").get<std::string>(),
                    doc.at("aggregate").at("auc").get<double>(),
                    doc.at("aggregate").at("mean_power").get<double>()});
  }
  rows = tradeoff_table(std::move(rows));
  std::string csv = "label,auc,mean_power\n";
  for (const auto& row : rows)
    csv += row.label + ',' + format_fixed(row.auc) + ',' + format_fixed(row.mean_power) + '\n';
  fs::create_directories(out_dir);
  const fs::path path = out_dir / "tradeoff.csv";
  write_text_atomic(path, csv);
  json meta{{"tool_version", kToolVersion},
            {"sort", "auc descending, ties by lower mean_power"},
            {"sources", json::array()}};
  for (const auto& p : manifest_paths) meta["sources"].push_back(p.string());
  write_text_atomic(path.string() + ".meta.json", meta.dump(2) + "\n");
  return path;
}

}  // namespace roisub
