#include "qslam/bench/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace qslam::bench {

double evaluate_ate(const std::vector<RigidTransform>& estimated,
                    const std::vector<RigidTransform>& ground_truth) {
  if (estimated.size() != ground_truth.size()) {
    throw std::invalid_argument("trajectory length mismatch");
  }
  if (estimated.empty()) throw std::invalid_argument("empty trajectories");
  const int n = static_cast<int>(estimated.size());

  Eigen::Matrix3Xd src(3, n), dst(3, n);
  for (int i = 0; i < n; ++i) {
    src.col(i) = estimated[static_cast<size_t>(i)].translation();
    dst.col(i) = ground_truth[static_cast<size_t>(i)].translation();
  }
  const Eigen::Matrix4d align = Eigen::umeyama(src, dst, false);
  const Eigen::Matrix3d r = align.topLeftCorner<3, 3>();
  const Eigen::Vector3d t = align.topRightCorner<3, 1>();

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += (r * src.col(i) + t - dst.col(i)).squaredNorm();
  }
  return std::sqrt(sum / n);
}

double quadric_error(const Quadric& estimate, const Quadric& truth) {
  return boxminus(estimate, truth).norm();
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string RuntimeReport::table() const {
  char buf[256];
  std::ostringstream os;
  os << "System Component       Median Runtime (ms)\n";
  const std::pair<const char*, const std::vector<double>*> rows[] = {
      {"Normal Computation", &normal_ms},
      {"Quadric Segmentation", &segmentation_ms},
      {"Data Association", &association_ms},
      {"Graph Optimisation", &optimization_ms},
  };
  for (const auto& [name, values] : rows) {
    std::snprintf(buf, sizeof(buf), "%-22s %.2f\n", name, median(*values));
    os << buf;
  }
  return os.str();
}

std::string RuntimeReport::machine() const {
  std::ostringstream os;
  os << "normal_computation_ms " << median(normal_ms) << '\n'
     << "quadric_segmentation_ms " << median(segmentation_ms) << '\n'
     << "data_association_ms " << median(association_ms) << '\n'
     << "graph_optimisation_ms " << median(optimization_ms) << '\n';
  return os.str();
}

}  // namespace qslam::bench
