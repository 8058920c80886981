#include "qslam/pipeline/exports.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qslam/core/text_io.hpp"
#include "qslam/pipeline/pipeline.hpp"

namespace qslam::pipeline {

void write_tum_trajectory(const std::string& path,
                          const std::vector<std::pair<double, RigidTransform>>& trajectory) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[384];
  for (const auto& [ts, pose] : trajectory) {
    const Eigen::Vector3d& t = pose.translation();
    const Eigen::Quaterniond q = pose.quaternion();
    std::snprintf(buf, sizeof(buf), "%.6f %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n", ts, t.x(), t.y(),
                  t.z(), q.x(), q.y(), q.z(), q.w());
    os << buf;
  }
}

std::vector<std::pair<double, RigidTransform>> read_tum_trajectory(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open trajectory " + path);
  std::vector<std::pair<double, RigidTransform>> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double v[8];
    bool ok = true;
    for (double& x : v) {
      if (!(ls >> x)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    out.emplace_back(v[0], RigidTransform::from_quaternion(Eigen::Quaterniond(v[7], v[4], v[5], v[6]),
                                                           Eigen::Vector3d(v[1], v[2], v[3])));
  }
  return out;
}

void Pipeline::export_trajectory(const std::string& path) const {
  write_tum_trajectory(path, trajectory());
}

void Pipeline::export_map(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& lm : landmarks_) {
    if (lm.pending) continue;
    os << quadric_to_line(lm.quadric) << '\n';
  }
}

void Pipeline::export_reconstruction(const std::string& path, ReconstructionColor mode) const {
  struct ColoredPoint {
    Eigen::Vector3d p;
    std::array<std::uint8_t, 3> rgb;
  };
  std::vector<ColoredPoint> points;

  bool any_promoted = false;
  for (const auto& lm : landmarks_) {
    if (lm.pending) continue;
    any_promoted = true;

    std::mt19937_64 rng(static_cast<std::uint64_t>(lm.key.index) + 0xc01ddeed);
    std::uniform_int_distribution<int> channel(40, 255);
    const std::array<std::uint8_t, 3> landmark_color = {static_cast<std::uint8_t>(channel(rng)),
                                                        static_cast<std::uint8_t>(channel(rng)),
                                                        static_cast<std::uint8_t>(channel(rng))};

    for (const auto& entry : lm.archive) {
      const RigidTransform& pose = estimate_.at_pose(graph::pose_key(entry.pose_index));
      for (size_t i = 0; i < entry.points_sensor.size(); ++i) {
        const Eigen::Vector3d world = pose * entry.points_sensor[i];
        ColoredPoint cp;
        try {
          cp.p = project_point(lm.quadric, world);
        } catch (const std::exception&) {
          continue;  // projection singularity (e.g. point on the axis)
        }
        cp.rgb = (mode == ReconstructionColor::Source && i < entry.colors.size())
                     ? entry.colors[i]
                     : landmark_color;
        points.push_back(cp);
      }
    }
  }
  if (!any_promoted) throw std::runtime_error("reconstruction export: map is empty");

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "ply\nformat ascii 1.0\nelement vertex " << points.size()
     << "\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nproperty uchar "
        "green\nproperty uchar blue\nend_header\n";
  char buf[128];
  for (const auto& cp : points) {
    std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d\n", cp.p.x(), cp.p.y(), cp.p.z(),
                  cp.rgb[0], cp.rgb[1], cp.rgb[2]);
    os << buf;
  }
}

}  // namespace qslam::pipeline
