#pragma once

#include "qslam/bench/simulate.hpp"
#include "qslam/pipeline/pipeline.hpp"

namespace qslam::bench {

struct BenchmarkRun {
  double ate = 0.0;
  double dead_reckoning_ate = 0.0;
  std::vector<double> landmark_errors;  // one per scene landmark; inf if unmatched
  bool all_converged = true;
  int max_solve_iterations = 0;
  int promoted_landmarks = 0;
  std::vector<std::pair<double, RigidTransform>> trajectory;
};

struct HarnessOptions {
  // Sigma-weighted gate; generous because mid-sequence pose predictions carry
  // several sigma of drift while cross-landmark costs sit orders higher.
  double association_cost_threshold = 50.0;
  int promotion_threshold = 5;
};

/// Feeds a simulated sequence through the full lifecycle (association,
/// promotion, batch dog-leg each frame) and scores it against ground truth.
BenchmarkRun run_synthetic_slam(const SceneSpec& spec, const HarnessOptions& options = {});

/// The same scene replayed through the perception front-end: depth rendering,
/// normals, ICP odometry and RANSAC detection, with per-frame timings.
BenchmarkRun run_synthetic_perception_slam(const SceneSpec& spec, const perception::Intrinsics& k,
                                           RuntimeReport& runtime,
                                           const HarnessOptions& options = {});

}  // namespace qslam::bench
