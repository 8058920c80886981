#pragma once

#include <string>
#include <vector>

#include "qslam/core/quadric.hpp"

namespace qslam::bench {

/// Absolute trajectory error: rigid (Procrustes) alignment of the estimated
/// translations onto the ground truth, then translational RMSE.
/// Throws std::invalid_argument on length mismatch.
double evaluate_ate(const std::vector<RigidTransform>& estimated,
                    const std::vector<RigidTransform>& ground_truth);

/// Norm of the symmetry-quotiented tangent difference between two quadrics.
double quadric_error(const Quadric& estimate, const Quadric& truth);

double median(std::vector<double> values);

/// Per-frame component timings mirroring the four reported categories.
struct RuntimeReport {
  std::vector<double> normal_ms;
  std::vector<double> segmentation_ms;
  std::vector<double> association_ms;
  std::vector<double> optimization_ms;

  std::string table() const;    // human-readable
  std::string machine() const;  // `metric value` lines
};

}  // namespace qslam::bench
