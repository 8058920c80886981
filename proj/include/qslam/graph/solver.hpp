#pragma once

#include <string>

#include <Eigen/SparseCore>

#include "qslam/graph/factors.hpp"

namespace qslam::graph {

/// Deterministic stacking of the tangent space: variables in key order.
struct VariableOrdering {
  std::vector<VariableKey> keys;
  std::vector<int> offsets;
  int total_dim = 0;

  int offset_of(const VariableKey& key) const;
};

VariableOrdering build_ordering(const Values& values);

/// Gauss-Newton normal equations H delta = b with H = sum J^T Sigma^-1 J and
/// b = -sum J^T Sigma^-1 r, block-sparse over the factor graph.
struct LinearSystem {
  Eigen::SparseMatrix<double> h;
  Eigen::VectorXd b;
  VariableOrdering ordering;
};

LinearSystem linearize(const FactorGraph& graph, const Values& values);

enum class SolveMethod { GaussNewton, DogLeg };

struct SolveOptions {
  SolveMethod method = SolveMethod::DogLeg;
  int max_iterations = 100;
  double relative_cost_tol = 1e-9;
  double step_tol = 1e-10;
  double trust_region_init = 1.0;
  // Below this variable count the linear solve uses a dense Cholesky.
  int dense_threshold = 200;
  bool verbose = false;
};

struct SolveReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  double trust_region_final = 0.0;
  std::string message;
};

/// Throws std::runtime_error naming the underdetermined variable blocks when
/// the normal matrix is rank deficient.
std::pair<Values, SolveReport> solve(const FactorGraph& graph, const Values& initial,
                                     const SolveOptions& options = {});

}  // namespace qslam::graph
