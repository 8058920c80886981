#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "qslam/graph/solver.hpp"

namespace qslam::graph {

namespace {

// Names the variable blocks with significant components in the null space.
[[noreturn]] void throw_rank_deficient(const Eigen::MatrixXd& h, const VariableOrdering& ord) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const double max_ev = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::ostringstream msg;
  msg << "normal matrix is rank deficient; underdetermined blocks:";
  std::vector<bool> flagged(ord.keys.size(), false);
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > 1e-10 * max_ev) continue;
    const Eigen::VectorXd v = eig.eigenvectors().col(i);
    for (size_t k = 0; k < ord.keys.size(); ++k) {
      const int dim = (k + 1 < ord.keys.size() ? ord.offsets[k + 1] : static_cast<int>(v.size())) -
                      ord.offsets[k];
      if (v.segment(ord.offsets[k], dim).norm() > 1e-3 && !flagged[k]) {
        flagged[k] = true;
        msg << ' ' << key_name(ord.keys[k]);
      }
    }
  }
  throw std::runtime_error(msg.str());
}

Eigen::VectorXd solve_normal_equations(const LinearSystem& sys, const SolveOptions& opts) {
  const int n = sys.ordering.total_dim;
  if (static_cast<int>(sys.ordering.keys.size()) < opts.dense_threshold) {
    const Eigen::MatrixXd h = Eigen::MatrixXd(sys.h);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) throw_rank_deficient(h, sys.ordering);
    return llt.solve(sys.b);
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(sys.h);
  if (llt.info() != Eigen::Success) {
    if (n <= 4000) throw_rank_deficient(Eigen::MatrixXd(sys.h), sys.ordering);
    throw std::runtime_error("normal matrix is rank deficient");
  }
  return llt.solve(sys.b);
}

double predicted_reduction(const LinearSystem& sys, const Eigen::VectorXd& delta) {
  return sys.b.dot(delta) - 0.5 * delta.dot(sys.h * delta);
}

std::pair<Values, SolveReport> solve_gauss_newton(const FactorGraph& graph, const Values& initial,
                                                  const SolveOptions& opts) {
  Values values = initial;
  SolveReport report;
  report.initial_cost = graph.cost(values);
  double cost = report.initial_cost;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    report.iterations = iter + 1;
    const LinearSystem sys = linearize(graph, values);
    const Eigen::VectorXd delta = solve_normal_equations(sys, opts);
    if (delta.norm() < opts.step_tol) {
      report.converged = true;
      break;
    }
    const Values candidate = values.retract(sys.ordering.keys, sys.ordering.offsets, delta);
    const double new_cost = graph.cost(candidate);
    if (new_cost > cost) {
      report.converged = false;
      report.message = "Gauss-Newton step increased the cost";
      break;
    }
    const double decrease = cost - new_cost;
    values = candidate;
    cost = new_cost;
    if (decrease < opts.relative_cost_tol * std::max(cost, 1e-300)) {
      report.converged = true;
      break;
    }
  }
  report.final_cost = cost;
  return {values, report};
}

std::pair<Values, SolveReport> solve_dogleg(const FactorGraph& graph, const Values& initial,
                                            const SolveOptions& opts) {
  Values values = initial;
  SolveReport report;
  report.initial_cost = graph.cost(values);
  double cost = report.initial_cost;
  double radius = opts.trust_region_init;

  LinearSystem sys = linearize(graph, values);
  bool relinearize = false;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    report.iterations = iter + 1;
    if (relinearize) {
      sys = linearize(graph, values);
      relinearize = false;
    }

    const Eigen::VectorXd gn = solve_normal_equations(sys, opts);
    if (gn.norm() < opts.step_tol) {
      report.converged = true;
      break;
    }

    // Steepest-descent (Cauchy) step along b.
    const double b_sqnorm = sys.b.squaredNorm();
    const double b_h_b = sys.b.dot(sys.h * sys.b);
    Eigen::VectorXd delta;
    if (gn.norm() <= radius) {
      delta = gn;
    } else {
      const Eigen::VectorXd sd = (b_h_b > 0.0 ? b_sqnorm / b_h_b : 0.0) * sys.b;
      if (sd.norm() >= radius) {
        delta = (radius / sd.norm()) * sd;
      } else {
        // Blend point on the segment sd -> gn hitting the trust-region edge.
        const Eigen::VectorXd diff = gn - sd;
        const double a = diff.squaredNorm();
        const double b2 = 2.0 * sd.dot(diff);
        const double c = sd.squaredNorm() - radius * radius;
        const double tau = (-b2 + std::sqrt(std::max(0.0, b2 * b2 - 4.0 * a * c))) / (2.0 * a);
        delta = sd + tau * diff;
      }
    }

    const double predicted = predicted_reduction(sys, delta);
    const Values candidate = values.retract(sys.ordering.keys, sys.ordering.offsets, delta);
    const double new_cost = graph.cost(candidate);
    const double actual = cost - new_cost;
    const double gain = predicted > 0.0 ? actual / predicted : -1.0;

    if (gain > 0.0) {
      values = candidate;
      const double decrease = cost - new_cost;
      cost = new_cost;
      relinearize = true;
      if (decrease < opts.relative_cost_tol * std::max(cost, 1e-300) ||
          delta.norm() < opts.step_tol) {
        report.converged = true;
        break;
      }
    }
    if (gain < 0.25) {
      radius *= 0.5;
    } else if (gain > 0.75) {
      radius *= 2.0;
    }
    if (radius < 1e-12) {
      report.converged = true;
      report.message = "trust region collapsed";
      break;
    }
  }
  report.final_cost = cost;
  report.trust_region_final = radius;
  return {values, report};
}

}  // namespace

std::pair<Values, SolveReport> solve(const FactorGraph& graph, const Values& initial,
                                     const SolveOptions& options) {
  if (options.method == SolveMethod::GaussNewton) return solve_gauss_newton(graph, initial, options);
  return solve_dogleg(graph, initial, options);
}

}  // namespace qslam::graph
