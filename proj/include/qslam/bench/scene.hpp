#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qslam/core/quadric.hpp"

namespace qslam::bench {

struct SceneQuadric {
  Quadric quadric;
  // Intersections farther than this from the quadric-frame origin are ignored
  // when rendering, so infinite surfaces stay scene-sized.
  double extent = std::numeric_limits<double>::infinity();
};

struct NoiseSpec {
  double odom_sigma_t = 0.01;           // metres per step
  double odom_sigma_r = 0.5 * M_PI / 180.0;
  double obs_sigma = 0.01;              // per tangent component
  double depth_sigma = 0.0;             // metres
};

struct SceneSpec {
  std::vector<SceneQuadric> quadrics;
  std::vector<RigidTransform> trajectory;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  double visibility_range = 6.0;
};

/// 20 poses on a 2 m circle facing inward; 2 planes, 2 spheres, 1 cylinder,
/// 1 cone — one landmark of every supported constrained class.
SceneSpec default_benchmark_scene(std::uint64_t seed);

/// Camera pose at `position` with the optical axis pointing at `target`.
RigidTransform look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

SceneSpec load_scene(const std::string& path);
void save_scene(const std::string& path, const SceneSpec& spec);

}  // namespace qslam::bench
