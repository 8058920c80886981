#include "qslam/pipeline/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qslam::pipeline {

Config Config::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return from_string(buffer.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string value;
    std::getline(ls, value);
    const size_t start = value.find_first_not_of(" \t");
    if (start == std::string::npos) throw std::invalid_argument("config key without value: " + key);
    const size_t end = value.find_last_not_of(" \t\r");
    cfg.values_[key] = value.substr(start, end - start + 1);
  }
  return cfg;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::stod(it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::stoi(it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return it->second == "1" || it->second == "true" || it->second == "on";
}

PipelineConfig pipeline_config_from(const Config& c) {
  PipelineConfig p;
  p.intrinsics.fx = c.get_double("fx", p.intrinsics.fx);
  p.intrinsics.fy = c.get_double("fy", p.intrinsics.fy);
  p.intrinsics.cx = c.get_double("cx", p.intrinsics.cx);
  p.intrinsics.cy = c.get_double("cy", p.intrinsics.cy);
  p.intrinsics.width = c.get_int("width", p.intrinsics.width);
  p.intrinsics.height = c.get_int("height", p.intrinsics.height);
  p.intrinsics.depth_scale = c.get_double("depth_scale", p.intrinsics.depth_scale);

  p.promotion_threshold = c.get_int("promotion_threshold", p.promotion_threshold);
  if (p.promotion_threshold < 1) throw std::invalid_argument("promotion_threshold must be >= 1");
  p.association_cost_threshold =
      c.get_double("association_cost_threshold", p.association_cost_threshold);

  p.ransac.epsilon = c.get_double("ransac_epsilon", p.ransac.epsilon);
  p.ransac.normal_threshold_deg = c.get_double("ransac_normal_deg", p.ransac.normal_threshold_deg);
  p.ransac.min_inliers = c.get_int("ransac_min_inliers", p.ransac.min_inliers);
  p.ransac.probability = c.get_double("ransac_probability", p.ransac.probability);
  p.ransac.max_samples = c.get_int("ransac_max_samples", p.ransac.max_samples);

  p.icp.max_iterations = c.get_int("icp_max_iterations", p.icp.max_iterations);
  p.icp.max_correspondence_dist = c.get_double("icp_max_dist", p.icp.max_correspondence_dist);
  p.icp.max_normal_angle_deg = c.get_double("icp_max_normal_deg", p.icp.max_normal_angle_deg);
  p.icp.stride = c.get_int("icp_stride", p.icp.stride);

  p.normal_radius_px = c.get_int("normal_radius_px", p.normal_radius_px);
  p.normal_max_depth_gap = c.get_double("normal_max_depth_gap", p.normal_max_depth_gap);
  p.max_depth = c.get_double("max_depth", p.max_depth);

  p.obs_sigma = c.get_double("obs_sigma", p.obs_sigma);
  p.odom_sigma_t = c.get_double("odom_sigma_t", p.odom_sigma_t);
  p.odom_sigma_r = c.get_double("odom_sigma_r", p.odom_sigma_r);
  p.prior_sigma_t = c.get_double("prior_sigma_t", p.prior_sigma_t);
  p.prior_sigma_r = c.get_double("prior_sigma_r", p.prior_sigma_r);
  p.huber_delta = c.get_bool("huber", false) ? c.get_double("huber_delta", 1.345) : 0.0;

  p.recon_window_frames = c.get_int("recon_window_frames", p.recon_window_frames);
  p.recon_max_points_per_frame = c.get_int("recon_max_points_per_frame", p.recon_max_points_per_frame);
  p.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<int>(p.seed)));

  if (p.association_cost_threshold <= 0.0 || p.obs_sigma <= 0.0) {
    throw std::invalid_argument("thresholds and sigmas must be positive");
  }
  return p;
}

}  // namespace qslam::pipeline
