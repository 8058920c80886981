#include "qslam/bench/scene.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qslam/core/text_io.hpp"

namespace qslam::bench {

RigidTransform look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up) {
  const Eigen::Vector3d z = (target - position).normalized();
  Eigen::Vector3d x = up.cross(z);
  if (x.norm() < 1e-9) x = Eigen::Vector3d::UnitX().cross(z);
  x.normalize();
  const Eigen::Vector3d y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return RigidTransform(r, position);
}

SceneSpec default_benchmark_scene(std::uint64_t seed) {
  SceneSpec spec;
  spec.seed = seed;

  const int n_poses = 20;
  for (int i = 0; i < n_poses; ++i) {
    const double angle = 2.0 * M_PI * i / n_poses;
    const Eigen::Vector3d pos(2.0 * std::cos(angle), 2.0 * std::sin(angle), 0.0);
    spec.trajectory.push_back(look_at(pos, Eigen::Vector3d::Zero()));
  }

  spec.quadrics.push_back({Quadric::plane(Eigen::Vector3d::UnitZ(), {0.0, 0.0, -1.0}), 4.0});
  spec.quadrics.push_back({Quadric::plane(Eigen::Vector3d::UnitX(), {-3.5, 0.0, 0.0}), 4.0});
  spec.quadrics.push_back({Quadric::sphere({0.5, 0.3, 0.2}, 0.5), 1.0});
  spec.quadrics.push_back({Quadric::sphere({-0.4, -0.6, 0.1}, 0.35), 1.0});
  spec.quadrics.push_back({Quadric::cylinder({0.8, -0.5, 0.0}, Eigen::Vector3d::UnitZ(), 0.3), 1.2});
  spec.quadrics.push_back(
      {Quadric::cone({-0.5, 0.8, -0.3}, Eigen::Vector3d::UnitZ(), 30.0 * M_PI / 180.0), 1.2});
  return spec;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_scene(const std::string& path, const SceneSpec& spec) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "# qslam scene spec\n";
  os << "seed " << spec.seed << '\n';
  os << "odom_sigma_t " << fmt(spec.noise.odom_sigma_t) << '\n';
  os << "odom_sigma_r " << fmt(spec.noise.odom_sigma_r) << '\n';
  os << "obs_sigma " << fmt(spec.noise.obs_sigma) << '\n';
  os << "depth_sigma " << fmt(spec.noise.depth_sigma) << '\n';
  os << "visibility_range " << fmt(spec.visibility_range) << '\n';
  for (const auto& pose : spec.trajectory) {
    const Eigen::Quaterniond q = pose.quaternion();
    os << "pose";
    for (double v : {pose.translation().x(), pose.translation().y(), pose.translation().z(), q.w(),
                     q.x(), q.y(), q.z()}) {
      os << ' ' << fmt(v);
    }
    os << '\n';
  }
  for (const auto& sq : spec.quadrics) {
    os << "quadric " << quadric_to_line(sq.quadric);
    if (std::isfinite(sq.extent)) os << " extent " << fmt(sq.extent);
    os << '\n';
  }
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scene spec " + path);
  SceneSpec spec;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "seed") {
      ls >> spec.seed;
    } else if (key == "odom_sigma_t") {
      ls >> spec.noise.odom_sigma_t;
    } else if (key == "odom_sigma_r") {
      ls >> spec.noise.odom_sigma_r;
    } else if (key == "obs_sigma") {
      ls >> spec.noise.obs_sigma;
    } else if (key == "depth_sigma") {
      ls >> spec.noise.depth_sigma;
    } else if (key == "visibility_range") {
      ls >> spec.visibility_range;
    } else if (key == "pose") {
      double v[7];
      for (double& x : v) {
        if (!(ls >> x)) throw std::invalid_argument("truncated pose line in scene spec");
      }
      spec.trajectory.push_back(RigidTransform::from_quaternion(
          Eigen::Quaterniond(v[3], v[4], v[5], v[6]), Eigen::Vector3d(v[0], v[1], v[2])));
    } else if (key == "quadric") {
      std::string rest;
      std::getline(ls, rest);
      SceneQuadric sq{quadric_from_line(rest), std::numeric_limits<double>::infinity()};
      const size_t at = rest.find(" extent ");
      if (at != std::string::npos) sq.extent = std::stod(rest.substr(at + 8));
      spec.quadrics.push_back(sq);
    } else {
      throw std::invalid_argument("unknown scene spec key: " + key);
    }
  }
  if (spec.trajectory.empty()) throw std::invalid_argument("scene spec needs at least one pose");
  return spec;
}

}  // namespace qslam::bench
