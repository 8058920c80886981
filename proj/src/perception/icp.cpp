#include "qslam/perception/icp.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace qslam::perception {

IcpResult icp_point_to_plane(const OrganizedCloud& prev, const OrganizedCloud& curr,
                             const RigidTransform& init, const IcpParams& params) {
  const Intrinsics& k = prev.intrinsics();
  const double cos_thresh = std::cos(params.max_normal_angle_deg * M_PI / 180.0);

  IcpResult result;
  result.transform = init;

  int sampled = 0;
  for (int v = 0; v < curr.height(); v += params.stride) {
    for (int u = 0; u < curr.width(); u += params.stride) {
      if (curr.valid(u, v)) ++sampled;
    }
  }
  if (sampled == 0) throw std::runtime_error("insufficient overlap");

  int matched = 0;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    result.iterations = iter + 1;
    Matrix6d h = Matrix6d::Zero();
    Vector6d g = Vector6d::Zero();
    matched = 0;

    for (int v = 0; v < curr.height(); v += params.stride) {
      for (int u = 0; u < curr.width(); u += params.stride) {
        if (!curr.valid(u, v)) continue;
        const Eigen::Vector3d p = result.transform * curr.point(u, v);
        if (p.z() <= 0.0) continue;

        // Projective association on the previous grid.
        const int pu = static_cast<int>(std::lround(k.fx * p.x() / p.z() + k.cx));
        const int pv = static_cast<int>(std::lround(k.fy * p.y() / p.z() + k.cy));
        if (pu < 0 || pu >= prev.width() || pv < 0 || pv >= prev.height()) continue;
        if (!prev.valid(pu, pv) || !prev.has_normal(pu, pv)) continue;

        const Eigen::Vector3d& q = prev.point(pu, pv);
        const Eigen::Vector3d& n = prev.normal(pu, pv);
        if ((p - q).norm() > params.max_correspondence_dist) continue;
        if (curr.has_normal(u, v)) {
          const Eigen::Vector3d nc = result.transform.rotation() * curr.normal(u, v);
          if (nc.dot(n) < cos_thresh) continue;
        }

        const double r = n.dot(p - q);
        Vector6d jac;
        jac.head<3>() = n;
        jac.tail<3>() = p.cross(n);
        h += jac * jac.transpose();
        g += jac * r;
        ++matched;
      }
    }

    if (matched < params.min_correspondences) throw std::runtime_error("insufficient overlap");

    const Vector6d delta = h.ldlt().solve(-g);
    if (!delta.allFinite()) throw std::runtime_error("ICP normal equations are singular");
    // World-frame update of the running estimate.
    result.transform = se3_exp(delta) * result.transform;
    if (delta.norm() < 1e-10) break;
  }

  result.fitness = static_cast<double>(matched) / sampled;
  return result;
}

}  // namespace qslam::perception
