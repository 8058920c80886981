#pragma once

#include "qslam/core/lie.hpp"
#include "qslam/perception/image.hpp"

namespace qslam::perception {

struct IcpParams {
  int max_iterations = 30;
  double max_correspondence_dist = 0.1;        // metres
  double max_normal_angle_deg = 30.0;
  int min_correspondences = 100;
  int stride = 2;                              // pixel subsampling of the source
};

struct IcpResult {
  /// Takes current-frame points into the previous frame: p_prev = transform * p_curr.
  RigidTransform transform;
  double fitness = 0.0;  // matched fraction of the sampled valid points
  int iterations = 0;
};

/// Point-to-plane ICP with projective data association on the previous
/// frame's grid. Throws std::runtime_error("insufficient overlap") when fewer
/// than min_correspondences survive rejection.
IcpResult icp_point_to_plane(const OrganizedCloud& prev, const OrganizedCloud& curr,
                             const RigidTransform& init, const IcpParams& params = {});

}  // namespace qslam::perception
