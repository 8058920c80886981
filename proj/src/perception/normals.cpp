#include <Eigen/Eigenvalues>

#include "qslam/perception/image.hpp"

namespace qslam::perception {

void estimate_normals(OrganizedCloud& cloud, int radius_px, double max_depth_gap) {
  const int w = cloud.width();
  const int h = cloud.height();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const size_t idx = cloud.index(u, v);
      if (!cloud.valid(idx)) continue;
      const Eigen::Vector3d& centre = cloud.point(idx);

      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
      int count = 0;
      for (int dv = -radius_px; dv <= radius_px; ++dv) {
        const int vv = v + dv;
        if (vv < 0 || vv >= h) continue;
        for (int du = -radius_px; du <= radius_px; ++du) {
          const int uu = u + du;
          if (uu < 0 || uu >= w) continue;
          const size_t nidx = cloud.index(uu, vv);
          if (!cloud.valid(nidx)) continue;
          const Eigen::Vector3d& p = cloud.point(nidx);
          if (std::abs(p.z() - centre.z()) > max_depth_gap) continue;  // depth discontinuity
          mean += p;
          second += p * p.transpose();
          ++count;
        }
      }
      if (count < 6) continue;

      mean /= count;
      const Eigen::Matrix3d cov = second / count - mean * mean.transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
      eig.computeDirect(cov);
      Eigen::Vector3d n = eig.eigenvectors().col(0);
      const double len = n.norm();
      if (!(len > 0.0) || !n.allFinite()) continue;
      n /= len;
      if (n.dot(centre) > 0.0) n = -n;  // orient toward the camera
      cloud.set_normal(idx, n);
    }
  }
}

}  // namespace qslam::perception
