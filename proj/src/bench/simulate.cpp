#include "qslam/bench/simulate.hpp"

#include <random>

namespace qslam::bench {

namespace {

Eigen::VectorXd gaussian(std::mt19937_64& rng, int n, double sigma) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = sigma * dist(rng);
  return v;
}

bool visible(const RigidTransform& t_wc, const Quadric& q, double range) {
  const Eigen::Vector3d origin_cam = t_wc.inverse() * q.pose().translation();
  return origin_cam.norm() <= range && origin_cam.z() > 0.0;
}

}  // namespace

SimulatedSequence generate_observations(const SceneSpec& spec) {
  SimulatedSequence seq;
  seq.ground_truth = spec.trajectory;
  std::mt19937_64 rng(spec.seed);

  for (size_t i = 0; i < spec.trajectory.size(); ++i) {
    if (i > 0) {
      const RigidTransform rel = spec.trajectory[i - 1].inverse() * spec.trajectory[i];
      Vector6d noise;
      noise.head<3>() = gaussian(rng, 3, spec.noise.odom_sigma_t);
      noise.tail<3>() = gaussian(rng, 3, spec.noise.odom_sigma_r);
      seq.odometry.push_back(rel * se3_exp(noise));
    }
    FrameObservations frame;
    for (size_t j = 0; j < spec.quadrics.size(); ++j) {
      const Quadric& q = spec.quadrics[j].quadric;
      if (!visible(spec.trajectory[i], q, spec.visibility_range)) continue;
      const Quadric predicted = transform(spec.trajectory[i], q);
      const Eigen::VectorXd noise = gaussian(rng, predicted.dof(), spec.noise.obs_sigma);
      frame.detections.emplace_back(static_cast<int>(j), boxplus(predicted, noise));
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

perception::DepthImage generate_depth(const SceneSpec& spec, size_t frame,
                                      const perception::Intrinsics& k) {
  const RigidTransform& t_wc = spec.trajectory.at(frame);
  perception::DepthImage depth(k.width, k.height);

  struct CachedQuadric {
    Eigen::Matrix4d q;
    RigidTransform inv_pose;
    double extent;
  };
  std::vector<CachedQuadric> cached;
  for (const auto& sq : spec.quadrics) {
    cached.push_back({to_matrix(sq.quadric), sq.quadric.pose().inverse(), sq.extent});
  }

  const Eigen::Vector3d origin = t_wc.translation();
  Eigen::Vector4d origin_h;
  origin_h << origin, 1.0;

  constexpr double kNearClip = 0.05;
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // Direction with unit optical-axis component, so the ray parameter is
      // the z-depth directly.
      const Eigen::Vector3d dir_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Eigen::Vector3d dir = t_wc.rotation() * dir_cam;
      Eigen::Vector4d dir_h;
      dir_h << dir, 0.0;

      double best = std::numeric_limits<double>::infinity();
      for (const auto& cq : cached) {
        const double a = dir_h.dot(cq.q * dir_h);
        const double b = dir_h.dot(cq.q * origin_h);
        const double c = origin_h.dot(cq.q * origin_h);
        double roots[2];
        int n_roots = 0;
        if (std::abs(a) < 1e-14) {
          if (std::abs(b) > 1e-14) roots[n_roots++] = -c / (2.0 * b);
        } else {
          double disc = b * b - a * c;
          // Degenerate quadrics (planes) have an exact double root; keep it
          // when rounding pushes the discriminant barely negative.
          const double fuzz = 1e-12 * std::max(b * b, std::abs(a * c));
          if (disc < 0.0 && disc > -fuzz) disc = 0.0;
          if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            roots[n_roots++] = (-b - s) / a;
            roots[n_roots++] = (-b + s) / a;
          }
        }
        for (int r = 0; r < n_roots; ++r) {
          const double t = roots[r];
          if (!(t > kNearClip) || t >= best) continue;
          if (std::isfinite(cq.extent)) {
            const Eigen::Vector3d local = cq.inv_pose * (origin + t * dir);
            if (local.norm() > cq.extent) continue;
          }
          best = t;
        }
      }
      if (std::isfinite(best)) depth.at(u, v) = best;
    }
  }

  if (spec.noise.depth_sigma > 0.0) {
    // Depth noise stream keyed off the frame index so frames are independent.
    std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + frame + 1);
    std::normal_distribution<double> dist(0.0, spec.noise.depth_sigma);
    for (double& d : depth.data) {
      if (d > 0.0) {
        const double noisy = d + dist(rng);
        d = noisy > 0.0 ? noisy : 0.0;
      }
    }
  }
  return depth;
}

perception::OrganizedCloud generate_cloud(const SceneSpec& spec, size_t frame,
                                          const perception::Intrinsics& k) {
  return perception::backproject(generate_depth(spec, frame, k), k);
}

}  // namespace qslam::bench
