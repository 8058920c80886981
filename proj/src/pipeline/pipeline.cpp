#include "qslam/pipeline/pipeline.hpp"

#include <chrono>
#include <iostream>

#include "qslam/perception/icp.hpp"

namespace qslam::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(const Clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

std::vector<AssociationDecision> associate(const std::vector<Quadric>& detections,
                                           const std::vector<Landmark>& map,
                                           const RigidTransform& predicted_pose,
                                           const PipelineConfig& config) {
  struct Pair {
    double cost;
    int detection;
    size_t landmark;
  };
  std::vector<Pair> pairs;
  const double inv_var = 1.0 / (config.obs_sigma * config.obs_sigma);

  for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
    for (size_t l = 0; l < map.size(); ++l) {
      if (map[l].quadric.cls() != detections[static_cast<size_t>(d)].cls()) continue;
      if (map[l].quadric.signature() != detections[static_cast<size_t>(d)].signature()) continue;
      double cost;
      try {
        const Eigen::VectorXd r = graph::observation_residual(predicted_pose, map[l].quadric,
                                                              detections[static_cast<size_t>(d)]);
        cost = 0.5 * inv_var * r.squaredNorm();
      } catch (const std::domain_error&) {
        continue;  // pose difference at the log branch cut: not a match
      }
      if (cost < config.association_cost_threshold) pairs.push_back({cost, d, l});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.detection != b.detection) return a.detection < b.detection;
    return a.landmark < b.landmark;
  });

  std::vector<AssociationDecision> decisions(detections.size());
  for (size_t d = 0; d < detections.size(); ++d) decisions[d] = {static_cast<int>(d), std::nullopt};
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> lm_used(map.size(), false);
  for (const Pair& p : pairs) {
    if (det_used[static_cast<size_t>(p.detection)] || lm_used[p.landmark]) continue;
    det_used[static_cast<size_t>(p.detection)] = true;
    lm_used[p.landmark] = true;
    decisions[static_cast<size_t>(p.detection)].landmark = map[p.landmark].key;
  }
  return decisions;
}

Pipeline::Pipeline(const PipelineConfig& config) : config_(config) {}

Eigen::MatrixXd Pipeline::observation_covariance(QuadricClass cls) const {
  const int n = dof(cls);
  return config_.obs_sigma * config_.obs_sigma * Eigen::MatrixXd::Identity(n, n);
}

void Pipeline::archive_points(Landmark& lm, int pose_index, const DetectionInput& det) {
  if (det.points_sensor.empty()) return;
  Landmark::ArchiveEntry entry;
  entry.pose_index = pose_index;
  const size_t stride =
      std::max<size_t>(1, det.points_sensor.size() /
                              static_cast<size_t>(config_.recon_max_points_per_frame));
  for (size_t i = 0; i < det.points_sensor.size(); i += stride) {
    entry.points_sensor.push_back(det.points_sensor[i]);
    if (i < det.colors.size()) entry.colors.push_back(det.colors[i]);
  }
  lm.archive.push_back(std::move(entry));
  while (lm.archive.size() > static_cast<size_t>(config_.recon_window_frames)) {
    lm.archive.pop_front();
  }
}

FrameResult Pipeline::process_measurements(double timestamp,
                                           const std::vector<DetectionInput>& detections,
                                           const RigidTransform& odometry, bool odometry_dropped) {
  FrameResult result;
  result.frame_index = frame_count_;
  result.timestamp = timestamp;
  result.odometry = odometry;
  result.dropped = odometry_dropped;
  result.detection_count = detections.size();
  timestamps_.push_back(timestamp);

  const int pose_index = frame_count_;
  const graph::VariableKey pose_k = graph::pose_key(pose_index);

  RigidTransform predicted;
  if (pose_index == 0) {
    predicted = config_.initial_pose;
    estimate_.insert_pose(pose_index, predicted);
    Matrix6d prior_cov = Matrix6d::Identity();
    prior_cov.topLeftCorner<3, 3>() *= config_.prior_sigma_t * config_.prior_sigma_t;
    prior_cov.bottomRightCorner<3, 3>() *= config_.prior_sigma_r * config_.prior_sigma_r;
    graph_.add_prior(pose_k, config_.initial_pose, prior_cov);
  } else {
    predicted = estimate_.at_pose(graph::pose_key(pose_index - 1)) * odometry;
    estimate_.insert_pose(pose_index, predicted);
    Matrix6d odom_cov = Matrix6d::Identity();
    odom_cov.topLeftCorner<3, 3>() *= config_.odom_sigma_t * config_.odom_sigma_t;
    odom_cov.bottomRightCorner<3, 3>() *= config_.odom_sigma_r * config_.odom_sigma_r;
    graph_.add_odometry(graph::pose_key(pose_index - 1), pose_k, odometry, odom_cov);
  }

  // Data association against the full landmark list (pending included, so
  // observation streaks can accumulate toward promotion).
  const auto assoc_start = Clock::now();
  std::vector<Quadric> detected_quadrics;
  detected_quadrics.reserve(detections.size());
  for (const auto& det : detections) detected_quadrics.push_back(det.quadric);
  result.associations = associate(detected_quadrics, landmarks_, predicted, config_);
  runtime_.association_ms.push_back(ms_since(assoc_start));

  auto add_observation_factor = [&](const graph::VariableKey& pk, const graph::VariableKey& qk,
                                    const Quadric& meas) {
    auto factor = std::make_shared<graph::ObservationFactor>(pk, qk, meas,
                                                             observation_covariance(meas.cls()));
    if (config_.huber_delta > 0.0) factor->set_robust_huber(config_.huber_delta);
    graph_.add(std::move(factor));
  };

  for (auto& decision : result.associations) {
    const DetectionInput& det = detections[static_cast<size_t>(decision.detection)];
    Landmark* lm = nullptr;
    if (decision.landmark) {
      for (auto& candidate : landmarks_) {
        if (candidate.key == *decision.landmark) {
          lm = &candidate;
          break;
        }
      }
    } else {
      Landmark fresh;
      fresh.key = graph::quadric_key(next_quadric_index_++);
      fresh.quadric = transform(predicted.inverse(), det.quadric);  // world estimate
      landmarks_.push_back(std::move(fresh));
      lm = &landmarks_.back();
      decision.landmark = lm->key;
    }

    ++lm->observation_count;
    archive_points(*lm, pose_index, det);

    if (lm->pending) {
      lm->buffered.push_back({pose_index, det.quadric});
      if (lm->observation_count >= config_.promotion_threshold) {
        // Promotion: the variable enters the graph along with every
        // accumulated observation factor.
        lm->pending = false;
        lm->quadric = transform(estimate_.at_pose(pose_k).inverse(), det.quadric);
        estimate_.insert_quadric(lm->key.index, lm->quadric);
        for (const auto& obs : lm->buffered) {
          add_observation_factor(graph::pose_key(obs.pose_index), lm->key, obs.measured);
        }
        lm->buffered.clear();
        result.promoted.push_back(lm->key);
      }
    } else {
      add_observation_factor(pose_k, lm->key, det.quadric);
    }
  }

  // Entire batch solve with each step.
  const auto solve_start = Clock::now();
  graph::SolveOptions opts;
  opts.method = graph::SolveMethod::DogLeg;
  auto [solved, report] = graph::solve(graph_, estimate_, opts);
  runtime_.optimization_ms.push_back(ms_since(solve_start));
  estimate_ = std::move(solved);
  result.solve = report;

  for (auto& lm : landmarks_) {
    if (!lm.pending) lm.quadric = estimate_.at_quadric(lm.key);
  }
  result.pose = estimate_.at_pose(pose_k);
  ++frame_count_;
  return result;
}

FrameResult Pipeline::process_frame(double timestamp, const perception::DepthImage& depth) {
  perception::DepthImage clipped = depth;
  if (config_.max_depth > 0.0) {
    const double limit = config_.max_depth * config_.intrinsics.depth_scale;
    for (double& d : clipped.data) {
      if (d > limit) d = 0.0;
    }
  }
  perception::OrganizedCloud cloud = perception::backproject(clipped, config_.intrinsics);

  const auto normal_start = Clock::now();
  perception::estimate_normals(cloud, config_.normal_radius_px, config_.normal_max_depth_gap);
  runtime_.normal_ms.push_back(ms_since(normal_start));

  RigidTransform odometry;
  bool dropped = false;
  if (prev_cloud_) {
    try {
      const auto icp = perception::icp_point_to_plane(*prev_cloud_, cloud, last_odometry_, config_.icp);
      odometry = icp.transform;
      last_odometry_ = icp.transform;
    } catch (const std::exception& err) {
      std::cerr << "frame " << frame_count_ << ": odometry failed (" << err.what()
                << "); using constant-velocity prediction\n";
      odometry = last_odometry_;
      dropped = true;
    }
  }

  const auto seg_start = Clock::now();
  perception::RansacParams ransac = config_.ransac;
  ransac.seed = config_.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(frame_count_);
  const auto shapes = perception::detect_shapes(cloud, ransac);
  runtime_.segmentation_ms.push_back(ms_since(seg_start));

  std::vector<DetectionInput> detections;
  for (const auto& shape : shapes) {
    DetectionInput det;
    try {
      det.quadric = perception::primitive_to_quadric(shape);
    } catch (const std::exception&) {
      continue;  // degenerate fit
    }
    const size_t stride = std::max<size_t>(
        1, shape.inliers.size() / static_cast<size_t>(config_.recon_max_points_per_frame));
    for (size_t i = 0; i < shape.inliers.size(); i += stride) {
      det.points_sensor.push_back(cloud.point(static_cast<size_t>(shape.inliers[i])));
    }
    detections.push_back(std::move(det));
  }

  prev_cloud_ = std::move(cloud);
  return process_measurements(timestamp, detections, odometry, dropped);
}

std::vector<std::pair<double, RigidTransform>> Pipeline::trajectory() const {
  std::vector<std::pair<double, RigidTransform>> out;
  for (int i = 0; i < frame_count_; ++i) {
    out.emplace_back(timestamps_[static_cast<size_t>(i)], estimate_.at_pose(graph::pose_key(i)));
  }
  return out;
}

}  // namespace qslam::pipeline
