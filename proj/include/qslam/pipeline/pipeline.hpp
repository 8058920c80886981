#pragma once

#include <array>
#include <deque>
#include <optional>

#include "qslam/bench/metrics.hpp"
#include "qslam/graph/solver.hpp"
#include "qslam/pipeline/config.hpp"

namespace qslam::pipeline {

struct Landmark {
  graph::VariableKey key;
  Quadric quadric;  // current world-frame estimate
  int observation_count = 0;
  bool pending = true;

  struct BufferedObservation {
    int pose_index;
    Quadric measured;
  };
  std::vector<BufferedObservation> buffered;  // factors-to-be until promotion

  struct ArchiveEntry {
    int pose_index;
    std::vector<Eigen::Vector3d> points_sensor;
    std::vector<std::array<std::uint8_t, 3>> colors;  // empty when no colour source
  };
  std::deque<ArchiveEntry> archive;  // bounded sliding window for reconstruction
};

/// A detection handed to the lifecycle core: the sensor-frame quadric plus a
/// bounded sample of its supporting points (for reconstruction export).
struct DetectionInput {
  Quadric quadric;
  std::vector<Eigen::Vector3d> points_sensor;
  std::vector<std::array<std::uint8_t, 3>> colors;
};

struct AssociationDecision {
  int detection = 0;
  std::optional<graph::VariableKey> landmark;  // empty = NEW
};

/// Greedy minimum-cost one-to-one matching of detections against same-class
/// landmarks under the gating threshold, using the predicted sensor pose.
std::vector<AssociationDecision> associate(const std::vector<Quadric>& detections,
                                           const std::vector<Landmark>& map,
                                           const RigidTransform& predicted_pose,
                                           const PipelineConfig& config);

struct FrameResult {
  int frame_index = 0;
  double timestamp = 0.0;
  RigidTransform pose;
  RigidTransform odometry;  // relative measurement used for this frame
  bool dropped = false;     // odometry fell back to constant velocity
  size_t detection_count = 0;
  std::vector<AssociationDecision> associations;
  std::vector<graph::VariableKey> promoted;
  graph::SolveReport solve;
};

enum class ReconstructionColor { RandomPerLandmark, Source };

class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& config);

  /// Full per-frame path: backprojection, normals, ICP odometry, shape
  /// detection, then the measurement update below.
  FrameResult process_frame(double timestamp, const perception::DepthImage& depth);

  /// Lifecycle core: association, promotion bookkeeping, graph update and a
  /// full batch solve. `odometry` is the relative pose previous -> current
  /// (ignored on the first frame).
  FrameResult process_measurements(double timestamp, const std::vector<DetectionInput>& detections,
                                   const RigidTransform& odometry, bool odometry_dropped = false);

  int frame_count() const { return frame_count_; }
  const graph::FactorGraph& graph() const { return graph_; }
  const graph::Values& estimate() const { return estimate_; }
  const std::vector<Landmark>& landmarks() const { return landmarks_; }
  std::vector<std::pair<double, RigidTransform>> trajectory() const;
  bench::RuntimeReport& runtime() { return runtime_; }
  const PipelineConfig& config() const { return config_; }

  void export_trajectory(const std::string& path) const;
  void export_map(const std::string& path) const;
  void export_reconstruction(const std::string& path,
                             ReconstructionColor mode = ReconstructionColor::RandomPerLandmark) const;

 private:
  Eigen::MatrixXd observation_covariance(QuadricClass cls) const;
  void archive_points(Landmark& lm, int pose_index, const DetectionInput& det);

  PipelineConfig config_;
  graph::FactorGraph graph_;
  graph::Values estimate_;
  std::vector<Landmark> landmarks_;
  std::vector<double> timestamps_;
  int frame_count_ = 0;
  int next_quadric_index_ = 0;

  std::optional<perception::OrganizedCloud> prev_cloud_;
  RigidTransform last_odometry_;  // constant-velocity fallback
  bench::RuntimeReport runtime_;
};

}  // namespace qslam::pipeline
