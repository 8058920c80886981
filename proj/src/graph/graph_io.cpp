#include "qslam/graph/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qslam/core/text_io.hpp"

namespace qslam::graph {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_pose_fields(std::ostream& os, const RigidTransform& t) {
  const Eigen::Quaterniond q = t.quaternion();
  for (double v : {t.translation().x(), t.translation().y(), t.translation().z(), q.w(), q.x(), q.y(),
                   q.z()}) {
    os << ' ' << fmt(v);
  }
}

RigidTransform read_pose_fields(std::istringstream& is) {
  double v[7];
  for (double& x : v) {
    if (!(is >> x)) throw std::invalid_argument("truncated pose fields in snapshot");
  }
  return RigidTransform::from_quaternion(Eigen::Quaterniond(v[3], v[4], v[5], v[6]),
                                         Eigen::Vector3d(v[0], v[1], v[2]));
}

void write_cov(std::ostream& os, const Eigen::MatrixXd& cov) {
  os << " cov";
  for (int i = 0; i < cov.rows(); ++i) {
    for (int j = i; j < cov.cols(); ++j) os << ' ' << fmt(cov(i, j));
  }
}

Eigen::MatrixXd read_cov(std::istringstream& is, int dim) {
  std::string tag;
  if (!(is >> tag) || tag != "cov") throw std::invalid_argument("snapshot factor missing covariance");
  Eigen::MatrixXd cov(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      double v;
      if (!(is >> v)) throw std::invalid_argument("truncated covariance in snapshot");
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return cov;
}

Eigen::MatrixXd information_to_cov(const Eigen::MatrixXd& info) {
  return info.llt().solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
}

}  // namespace

void write_snapshot(std::ostream& os, const FactorGraph& graph, const Values& values) {
  os << "# qslam factor graph snapshot v1\n";
  for (const auto& [key, value] : values.map()) {
    if (key.kind == VariableKey::Kind::Pose) {
      os << "pose " << key.index;
      write_pose_fields(os, std::get<RigidTransform>(value));
      os << '\n';
    } else {
      os << "quadric " << key.index << ' ' << quadric_to_line(std::get<Quadric>(value)) << '\n';
    }
  }
  for (const auto& f : graph.factors()) {
    if (const auto* prior = dynamic_cast<const PriorFactor*>(f.get())) {
      os << "prior " << prior->keys()[0].index;
      write_pose_fields(os, prior->measured());
      write_cov(os, information_to_cov(prior->information()));
      os << '\n';
    } else if (const auto* odom = dynamic_cast<const OdometryFactor*>(f.get())) {
      os << "odom " << odom->from().index << ' ' << odom->to().index;
      write_pose_fields(os, odom->measured());
      write_cov(os, information_to_cov(odom->information()));
      os << '\n';
    } else if (const auto* obs = dynamic_cast<const ObservationFactor*>(f.get())) {
      os << "obs " << obs->pose_key().index << ' ' << obs->quadric_key().index << ' '
         << quadric_to_line(obs->measured());
      write_cov(os, information_to_cov(obs->information()));
      os << '\n';
    } else {
      throw std::logic_error("unknown factor type in snapshot writer");
    }
  }
}

void read_snapshot(std::istream& is, FactorGraph& graph, Values& values) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "pose") {
      int id;
      ls >> id;
      values.insert_pose(id, read_pose_fields(ls));
    } else if (kind == "quadric") {
      int id;
      ls >> id;
      std::string rest;
      std::getline(ls, rest);
      values.insert_quadric(id, quadric_from_line(rest));
    } else if (kind == "prior") {
      int id;
      ls >> id;
      const RigidTransform meas = read_pose_fields(ls);
      graph.add_prior(pose_key(id), meas, read_cov(ls, 6));
    } else if (kind == "odom") {
      int from, to;
      ls >> from >> to;
      const RigidTransform meas = read_pose_fields(ls);
      graph.add_odometry(pose_key(from), pose_key(to), meas, read_cov(ls, 6));
    } else if (kind == "obs") {
      int p, q;
      ls >> p >> q;
      std::string rest;
      std::getline(ls, rest);
      const size_t cov_at = rest.find(" cov ");
      if (cov_at == std::string::npos) throw std::invalid_argument("obs line missing covariance");
      const Quadric meas = quadric_from_line(rest.substr(0, cov_at));
      std::istringstream cs(rest.substr(cov_at + 1));
      graph.add_observation(pose_key(p), quadric_key(q), meas, read_cov(cs, meas.dof()));
    } else {
      throw std::invalid_argument("unknown snapshot record: " + kind);
    }
  }
}

void save_snapshot(const std::string& path, const FactorGraph& graph, const Values& values) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_snapshot(os, graph, values);
}

void load_snapshot(const std::string& path, FactorGraph& graph, Values& values) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  read_snapshot(is, graph, values);
}

}  // namespace qslam::graph
