#include "qslam/core/text_io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qslam {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string quadric_to_line(const Quadric& q) {
  const Eigen::Vector3d& t = q.pose().translation();
  const Eigen::Quaterniond quat = q.pose().quaternion();
  std::ostringstream os;
  os << class_name(q.cls());
  for (double v : {t.x(), t.y(), t.z(), quat.w(), quat.x(), quat.y(), quat.z(), q.scale().x(),
                   q.scale().y(), q.scale().z()}) {
    os << ' ' << fmt(v);
  }
  if (q.cls() == QuadricClass::General) {
    os << " sig";
    for (int e : q.signature().entries) os << ' ' << e;
  }
  return os.str();
}

Quadric quadric_from_line(const std::string& line) {
  std::istringstream is(line);
  std::string name;
  if (!(is >> name)) throw std::invalid_argument("empty quadric line");
  const QuadricClass cls = class_from_name(name);
  double v[10];
  for (double& x : v) {
    if (!(is >> x)) throw std::invalid_argument("truncated quadric line: " + line);
  }
  const Eigen::Vector3d t(v[0], v[1], v[2]);
  const Eigen::Quaterniond quat(v[3], v[4], v[5], v[6]);
  const Eigen::Vector3d scale(v[7], v[8], v[9]);
  const RigidTransform pose = RigidTransform::from_quaternion(quat, t);
  if (cls == QuadricClass::General) {
    std::string tag;
    Signature sig;
    if (!(is >> tag) || tag != "sig") throw std::invalid_argument("general quadric line missing signature");
    for (int& e : sig.entries) {
      if (!(is >> e)) throw std::invalid_argument("truncated signature in quadric line");
    }
    return Quadric(sig, pose, scale);
  }
  return Quadric(cls, pose, scale);
}

}  // namespace qslam
