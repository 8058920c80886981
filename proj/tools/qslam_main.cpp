#include <cstdint>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qslam/bench/harness.hpp"
#include "qslam/bench/metrics.hpp"
#include "qslam/pipeline/dataset.hpp"
#include "qslam/pipeline/exports.hpp"

namespace {

struct RunOptions {
  std::string dataset;
  std::string config;
  int max_frames = 0;
  std::string export_map;
  std::string export_traj;
  std::string export_recon;
  std::string color_mode = "random";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run_dataset(const RunOptions& opt) {
  using namespace qslam;
  pipeline::PipelineConfig cfg =
      pipeline::pipeline_config_from(pipeline::Config::from_file(opt.config));
  if (opt.seed_set) cfg.seed = opt.seed;

  pipeline::TumDataset dataset(opt.dataset);
  const size_t n =
      opt.max_frames > 0 ? std::min<size_t>(dataset.size(), opt.max_frames) : dataset.size();

  pipeline::Pipeline pipe(cfg);
  for (size_t i = 0; i < n; ++i) {
    const auto frame = pipe.process_frame(dataset.frame(i).timestamp, dataset.load_depth(i));
    std::cout << "frame " << frame.frame_index << ": detections=" << frame.detection_count
              << " promoted=" << frame.promoted.size() << " cost=" << frame.solve.final_cost
              << (frame.dropped ? " [odometry dropped]" : "") << '\n';
  }

  int promoted = 0;
  for (const auto& lm : pipe.landmarks()) promoted += lm.pending ? 0 : 1;
  std::cout << "frames: " << pipe.frame_count() << ", promoted landmarks: " << promoted << '\n';
  std::cout << pipe.runtime().table();

  if (!opt.export_traj.empty()) pipe.export_trajectory(opt.export_traj);
  if (!opt.export_map.empty()) pipe.export_map(opt.export_map);
  if (!opt.export_recon.empty()) {
    pipe.export_reconstruction(opt.export_recon, opt.color_mode == "source"
                                                     ? pipeline::ReconstructionColor::Source
                                                     : pipeline::ReconstructionColor::RandomPerLandmark);
  }
  return 0;
}

struct SynthOptions {
  std::string scene;
  std::uint64_t seed = 0;
  int seeds = 1;
  std::string export_traj;
  std::string export_metrics;
  bool perception = false;
  int width = 640, height = 480;
  double association_threshold = 50.0;
};

int run_synth(const SynthOptions& opt) {
  using namespace qslam;
  bench::HarnessOptions harness_opts;
  harness_opts.association_cost_threshold = opt.association_threshold;

  std::vector<double> ates, dead_ates, landmark_errors;
  bool all_converged = true;
  int max_iters = 0;
  bench::RuntimeReport runtime;
  std::vector<std::pair<double, qslam::RigidTransform>> last_traj;

  for (int s = 0; s < opt.seeds; ++s) {
    bench::SceneSpec spec = opt.scene.empty() ? bench::default_benchmark_scene(opt.seed + s)
                                              : bench::load_scene(opt.scene);
    if (!opt.scene.empty()) spec.seed = opt.seed + s;

    bench::BenchmarkRun run;
    if (opt.perception) {
      perception::Intrinsics k{0.6 * opt.width, 0.6 * opt.width, opt.width / 2.0 - 0.5,
                               opt.height / 2.0 - 0.5, opt.width, opt.height, 1.0};
      run = bench::run_synthetic_perception_slam(spec, k, runtime, harness_opts);
    } else {
      run = bench::run_synthetic_slam(spec, harness_opts);
    }
    ates.push_back(run.ate);
    dead_ates.push_back(run.dead_reckoning_ate);
    for (double e : run.landmark_errors) landmark_errors.push_back(e);
    all_converged = all_converged && run.all_converged;
    max_iters = std::max(max_iters, run.max_solve_iterations);
    last_traj = run.trajectory;
  }

  std::ostringstream metrics;
  metrics << "ate_rmse " << bench::median(ates) << '\n'
          << "dead_reckoning_ate_rmse " << bench::median(dead_ates) << '\n'
          << "quadric_error_median " << bench::median(landmark_errors) << '\n'
          << "all_converged " << (all_converged ? 1 : 0) << '\n'
          << "max_solve_iterations " << max_iters << '\n';
  std::cout << metrics.str();
  if (opt.perception) {
    std::cout << runtime.table();
    metrics << runtime.machine();
  }
  if (!opt.export_metrics.empty()) {
    std::ofstream os(opt.export_metrics);
    os << metrics.str();
  }
  if (!opt.export_traj.empty()) pipeline::write_tum_trajectory(opt.export_traj, last_traj);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadric-landmark SLAM pipeline"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run the RGB-D pipeline on a TUM-format dataset");
  run->add_option("--dataset", run_opt.dataset, "Dataset directory")->required();
  run->add_option("--config", run_opt.config, "Key-value config file")->required();
  run->add_option("--max-frames", run_opt.max_frames, "Limit the number of frames");
  run->add_option("--export-map", run_opt.export_map, "Write the quadric map (text, one per line)");
  run->add_option("--export-traj", run_opt.export_traj, "Write the trajectory (TUM format)");
  run->add_option("--export-recon", run_opt.export_recon, "Write the reconstruction (PLY)");
  run->add_option("--color-mode", run_opt.color_mode, "Reconstruction colors: random|source");
  run->add_option("--seed", run_opt.seed, "Override the config seed")
      ->each([&](const std::string&) { run_opt.seed_set = true; });

  SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand("synth", "Run the synthetic benchmark");
  synth->add_option("--scene", synth_opt.scene, "Scene spec file (default: built-in benchmark scene)");
  synth->add_option("--seed", synth_opt.seed, "Base random seed");
  synth->add_option("--seeds", synth_opt.seeds, "Number of seeds to aggregate");
  synth->add_option("--export-traj", synth_opt.export_traj, "Write the last run's trajectory");
  synth->add_option("--metrics", synth_opt.export_metrics, "Write metrics (metric value lines)");
  synth->add_flag("--perception", synth_opt.perception,
                  "Render depth and run the full perception front-end");
  synth->add_option("--width", synth_opt.width, "Render width");
  synth->add_option("--height", synth_opt.height, "Render height");
  synth->add_option("--association-threshold", synth_opt.association_threshold,
                    "Data association gate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_dataset(run_opt);
    if (synth->parsed()) return run_synth(synth_opt);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
