#pragma once

#include <map>
#include <string>

#include "qslam/perception/icp.hpp"
#include "qslam/perception/ransac.hpp"

namespace qslam::pipeline {

/// Flat `key value` text config; '#' starts a comment line.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::string> values_;
};

struct PipelineConfig {
  perception::Intrinsics intrinsics{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};

  /// Measurement anchoring the first pose's prior.
  RigidTransform initial_pose;

  int promotion_threshold = 5;
  double association_cost_threshold = 1.0;

  perception::RansacParams ransac;
  perception::IcpParams icp;
  int normal_radius_px = 4;
  double normal_max_depth_gap = 0.05;
  double max_depth = 6.0;  // metres; 0 disables clipping

  // Per-class observation covariance is diag(obs_sigma^2) of the class dof.
  double obs_sigma = 0.05;
  double odom_sigma_t = 0.01;
  double odom_sigma_r = 0.01;
  double prior_sigma_t = 1e-3;
  double prior_sigma_r = 1e-3;
  double huber_delta = 0.0;  // 0 disables the robust kernel

  int recon_window_frames = 30;
  int recon_max_points_per_frame = 2000;
  std::uint64_t seed = 0;
};

PipelineConfig pipeline_config_from(const Config& config);

}  // namespace qslam::pipeline
