#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qslam/core/quadric.hpp"
#include "qslam/perception/image.hpp"

namespace qslam::perception {

struct PlaneParams {
  Eigen::Vector3d normal;  // unit
  double offset = 0.0;     // normal . p = offset on the plane
};

struct SphereParams {
  Eigen::Vector3d centre;
  double radius = 0.0;
};

struct CylinderParams {
  Eigen::Vector3d axis_point;
  Eigen::Vector3d axis;  // unit
  double radius = 0.0;
};

struct ConeParams {
  Eigen::Vector3d apex;
  Eigen::Vector3d axis;  // unit, into the opening
  double half_angle = 0.0;
};

using PrimitiveParams = std::variant<PlaneParams, SphereParams, CylinderParams, ConeParams>;

struct ShapeDetection {
  QuadricClass cls = QuadricClass::Plane;
  PrimitiveParams primitive;
  std::vector<int> inliers;  // grid indices into the organized cloud
  int score = 0;             // inlier count
};

struct RansacParams {
  double epsilon = 0.01;              // distance band, metres
  double normal_threshold_deg = 25.0;
  int min_inliers = 500;
  double probability = 0.05;          // tolerated chance a better candidate was missed
  std::uint64_t seed = 0;
  int batch_size = 256;               // minimal samples drawn per scoring batch
  int max_samples = 60000;            // per extraction round
  int sample_window_px = 30;          // locality window for the 2nd/3rd sample
  int refine_max_points = 1200;
};

/// Greedy Efficient-RANSAC-style extraction of planes, spheres, circular
/// cylinders and circular cones from an organized cloud with normals.
/// Deterministic under a fixed seed. Throws on an empty cloud.
std::vector<ShapeDetection> detect_shapes(const OrganizedCloud& cloud, const RansacParams& params);

/// Unsigned distance from p to the primitive surface.
double primitive_distance(const PrimitiveParams& prim, const Eigen::Vector3d& p);

/// Distance-band plus normal-consistency membership test (post-hoc verifiable).
bool primitive_inlier(const PrimitiveParams& prim, const Eigen::Vector3d& p, const Eigen::Vector3d& n,
                      double epsilon, double cos_normal_threshold);

/// Converts a detection to the quadric landmark representation. Throws on
/// degenerate primitives.
Quadric primitive_to_quadric(const ShapeDetection& det);

}  // namespace qslam::perception
