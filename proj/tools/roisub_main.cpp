// roisub: adaptive-subsampling tracking benchmark CLI.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roisub/experiment.hpp"
#include "roisub/log.hpp"

namespace {

using roisub::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string detector, mode, sensor, readout;
  std::vector<int> intervals;
  std::int64_t seed = -1;
  int workers = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment config file (JSON)")->required();
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "RNG seed (overrides config)");
  cmd->add_option("--workers", flags.workers, "Worker pool size (overrides config)");
  cmd->add_option("--interval", flags.intervals, "Keyframing interval list (overrides config)")
      ->delimiter(',');
  cmd->add_option("--detector", flags.detector, "Detector: oracle|trace|meanshift");
  cmd->add_option("--mode", flags.mode, "Predictor mode: kalman|memo|chain");
  cmd->add_option("--sensor", flags.sensor, "Sensor preset: B1|B2|B3");
  cmd->add_option("--readout", flags.readout, "Readout mode: window|colskip");
}

// CLI flags take precedence over config fields.
ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig config = roisub::load_config_file(flags.config_path);
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.workers >= 0) config.workers = flags.workers;
  if (!flags.intervals.empty()) config.intervals = flags.intervals;
  if (!flags.detector.empty()) {
    nlohmann::json j = roisub::config_to_json(config);
    j["detector"]["type"] = flags.detector;
    config = roisub::config_from_json(j);
  }
  if (!flags.mode.empty()) {
    nlohmann::json j = roisub::config_to_json(config);
    j["mode"] = flags.mode;
    config = roisub::config_from_json(j);
  }
  if (!flags.sensor.empty()) {
    auto preset = roisub::SensorModel::preset(flags.sensor);
    if (!preset) throw std::invalid_argument("unknown sensor preset: " + flags.sensor);
    config.sensor = *preset;
  }
  if (!flags.readout.empty()) {
    nlohmann::json j = roisub::config_to_json(config);
    j["readout"] = flags.readout;
    config = roisub::config_from_json(j);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive subsampling for ROI-based visual tracking: benchmark harness"};
  app.require_subcommand(1);

  CommonFlags run_flags, keyframing_flags, threshold_flags, gen_flags;

  CLI::App* run = app.add_subcommand("run", "Run the configured intervals and write manifests");
  add_common(run, run_flags);

  CLI::App* sweep_kf = app.add_subcommand(
      "sweep-keyframing", "Sweep keyframing intervals; emits keyframing.csv");
  add_common(sweep_kf, keyframing_flags);

  CLI::App* sweep_thr = app.add_subcommand(
      "sweep-threshold", "Emit the 21-point success plot per interval; success_plot.csv");
  add_common(sweep_thr, threshold_flags);

  CLI::App* tradeoff = app.add_subcommand(
      "tradeoff", "Collate run manifests into tradeoff.csv (AUC vs. mean power)");
  std::vector<std::string> manifest_args;
  std::string tradeoff_out = "out";
  tradeoff->add_option("manifests", manifest_args, "manifest.json paths")->required();
  tradeoff->add_option("--out", tradeoff_out, "Output directory");

  CLI::App* gen = app.add_subcommand(
      "gen-synthetic", "Render the config's synthetic specs to a dataset directory");
  add_common(gen, gen_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ExperimentConfig config = resolve_config(run_flags);
      for (int interval : config.intervals) {
        const auto manifest = roisub::cmd_run(config, interval);
        std::printf("%s\n", manifest.path.string().c_str());
      }
    } else if (sweep_kf->parsed()) {
      const ExperimentConfig config = resolve_config(keyframing_flags);
      std::printf("%s\n", roisub::cmd_sweep_keyframing(config).string().c_str());
    } else if (sweep_thr->parsed()) {
      const ExperimentConfig config = resolve_config(threshold_flags);
      std::printf("%s\n", roisub::cmd_sweep_threshold(config).string().c_str());
    } else if (tradeoff->parsed()) {
      std::vector<std::filesystem::path> paths(manifest_args.begin(), manifest_args.end());
      std::printf("%s\n", roisub::cmd_tradeoff(paths, tradeoff_out).string().c_str());
    } else if (gen->parsed()) {
      const ExperimentConfig config = resolve_config(gen_flags);
      if (config.synthetic.empty())
        throw std::invalid_argument("gen-synthetic needs synthetic specs in the config");
      for (const auto& spec : config.synthetic) {
        roisub::write_synthetic_dataset(config.out_dir, spec);
        std::printf("%s\n", (std::filesystem::path(config.out_dir) / spec.id).string().c_str());
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
