#pragma once

#include <vector>

#include <Eigen/Core>

namespace qslam::perception {

struct Intrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  double depth_scale = 1.0;  // depth units per metre
};

/// Raw depth values in depth units (0 = invalid), row-major.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<double> data;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h, 0.0) {}

  double& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }
  double at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
};

/// Grid-organized point cloud in the camera frame, with optional per-pixel
/// unit normals oriented toward the camera.
class OrganizedCloud {
 public:
  OrganizedCloud() = default;
  OrganizedCloud(const Intrinsics& k);

  const Intrinsics& intrinsics() const { return k_; }
  int width() const { return k_.width; }
  int height() const { return k_.height; }
  size_t index(int u, int v) const { return static_cast<size_t>(v) * k_.width + u; }

  bool valid(int u, int v) const { return valid_[index(u, v)]; }
  bool valid(size_t i) const { return valid_[i]; }
  const Eigen::Vector3d& point(int u, int v) const { return points_[index(u, v)]; }
  const Eigen::Vector3d& point(size_t i) const { return points_[i]; }
  bool has_normal(int u, int v) const { return has_normal_[index(u, v)]; }
  bool has_normal(size_t i) const { return has_normal_[i]; }
  const Eigen::Vector3d& normal(int u, int v) const { return normals_[index(u, v)]; }
  const Eigen::Vector3d& normal(size_t i) const { return normals_[i]; }

  void set_point(size_t i, const Eigen::Vector3d& p) {
    points_[i] = p;
    valid_[i] = true;
  }
  void set_normal(size_t i, const Eigen::Vector3d& n) {
    normals_[i] = n;
    has_normal_[i] = true;
  }

  size_t size() const { return points_.size(); }
  size_t valid_count() const;

 private:
  Intrinsics k_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<uint8_t> valid_;
  std::vector<uint8_t> has_normal_;
};

/// Pixel (u,v) with depth d > 0 maps to ((u-cx) z / fx, (v-cy) z / fy, z)
/// with z = d / depth_scale; invalid depth leaves the cell absent.
OrganizedCloud backproject(const DepthImage& depth, const Intrinsics& k);

/// Per-pixel normal from PCA over the valid neighbours in a (2r+1)^2 window,
/// sign-flipped toward the camera. Cells with fewer than 6 valid neighbours
/// (or across a depth gap) get no normal.
void estimate_normals(OrganizedCloud& cloud, int radius_px, double max_depth_gap = 0.05);

}  // namespace qslam::perception
