#include <stdexcept>
#include <vector>

#include "qslam/graph/solver.hpp"

namespace qslam::graph {

int VariableOrdering::offset_of(const VariableKey& key) const {
  const auto it = std::lower_bound(keys.begin(), keys.end(), key);
  if (it == keys.end() || *it != key) throw std::out_of_range("variable not in ordering: " + key_name(key));
  return offsets[static_cast<size_t>(it - keys.begin())];
}

VariableOrdering build_ordering(const Values& values) {
  VariableOrdering ord;
  int off = 0;
  for (const auto& [key, value] : values.map()) {
    ord.keys.push_back(key);
    ord.offsets.push_back(off);
    off += values.dim(key);
  }
  ord.total_dim = off;
  return ord;
}

LinearSystem linearize(const FactorGraph& graph, const Values& values) {
  LinearSystem sys;
  sys.ordering = build_ordering(values);
  sys.b = Eigen::VectorXd::Zero(sys.ordering.total_dim);

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& factor : graph.factors()) {
    const auto keys = factor->keys();
    const Eigen::VectorXd r = factor->residual(values);
    const auto jacs = factor->jacobians(values);
    const Eigen::MatrixXd info = factor->robust_weight(r) * factor->information();

    std::vector<Eigen::MatrixXd> whitened(jacs.size());
    for (size_t i = 0; i < jacs.size(); ++i) whitened[i] = info * jacs[i];

    for (size_t i = 0; i < keys.size(); ++i) {
      const int off_i = sys.ordering.offset_of(keys[i]);
      sys.b.segment(off_i, jacs[i].cols()) -= jacs[i].transpose() * (info * r);
      for (size_t j = 0; j < keys.size(); ++j) {
        const int off_j = sys.ordering.offset_of(keys[j]);
        const Eigen::MatrixXd block = jacs[i].transpose() * whitened[j];
        for (int a = 0; a < block.rows(); ++a) {
          for (int c = 0; c < block.cols(); ++c) {
            triplets.emplace_back(off_i + a, off_j + c, block(a, c));
          }
        }
      }
    }
  }

  sys.h.resize(sys.ordering.total_dim, sys.ordering.total_dim);
  sys.h.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

}  // namespace qslam::graph
