#pragma once

#include "qslam/bench/scene.hpp"
#include "qslam/perception/image.hpp"

namespace qslam::bench {

struct FrameObservations {
  // (landmark index, measurement in the sensor frame)
  std::vector<std::pair<int, Quadric>> detections;
};

struct SimulatedSequence {
  std::vector<RigidTransform> ground_truth;
  std::vector<RigidTransform> odometry;  // noisy relative pose k-1 -> k
  std::vector<FrameObservations> frames;
};

/// Draws noisy quadric measurements (prediction boxplus Gaussian tangent
/// noise) for every visible landmark and noisy relative odometry. All
/// randomness flows from spec.seed.
SimulatedSequence generate_observations(const SceneSpec& spec);

/// Ray-casts the scene from the frame's ground-truth pose into an organized
/// depth image (nearest positive intersection per pixel), then adds Gaussian
/// depth noise. Depth values are metres (depth_scale 1).
perception::DepthImage generate_depth(const SceneSpec& spec, size_t frame,
                                      const perception::Intrinsics& k);

perception::OrganizedCloud generate_cloud(const SceneSpec& spec, size_t frame,
                                          const perception::Intrinsics& k);

}  // namespace qslam::bench
