#include "qslam/perception/image.hpp"

#include <stdexcept>

namespace qslam::perception {

OrganizedCloud::OrganizedCloud(const Intrinsics& k)
    : k_(k),
      points_(static_cast<size_t>(k.width) * k.height, Eigen::Vector3d::Zero()),
      normals_(static_cast<size_t>(k.width) * k.height, Eigen::Vector3d::Zero()),
      valid_(static_cast<size_t>(k.width) * k.height, 0),
      has_normal_(static_cast<size_t>(k.width) * k.height, 0) {}

size_t OrganizedCloud::valid_count() const {
  size_t n = 0;
  for (uint8_t v : valid_) n += v;
  return n;
}

OrganizedCloud backproject(const DepthImage& depth, const Intrinsics& k) {
  if (depth.width != k.width || depth.height != k.height) {
    throw std::invalid_argument("depth image dimensions do not match intrinsics");
  }
  if (!(k.fx > 0.0 && k.fy > 0.0) || k.width <= 0 || k.height <= 0) {
    throw std::invalid_argument("invalid intrinsics");
  }
  OrganizedCloud cloud(k);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const double d = depth.at(u, v);
      if (!(d > 0.0) || !std::isfinite(d)) continue;
      const double z = d / k.depth_scale;
      cloud.set_point(cloud.index(u, v),
                      Eigen::Vector3d((u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z));
    }
  }
  return cloud;
}

}  // namespace qslam::perception
