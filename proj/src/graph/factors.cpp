#include "qslam/graph/factors.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace qslam::graph {

std::string key_name(const VariableKey& key) {
  return (key.kind == VariableKey::Kind::Pose ? "x" : "q") + std::to_string(key.index);
}

void Values::insert_pose(int index, const RigidTransform& pose) {
  map_.insert_or_assign(pose_key(index), pose);
}

void Values::insert_quadric(int index, const Quadric& q) { map_.insert_or_assign(quadric_key(index), q); }

void Values::update(const VariableKey& key, const Value& v) { map_.insert_or_assign(key, v); }

const RigidTransform& Values::at_pose(const VariableKey& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw std::out_of_range("missing variable " + key_name(key));
  return std::get<RigidTransform>(it->second);
}

const Quadric& Values::at_quadric(const VariableKey& key) const {
  const auto it = map_.find(key);
  if (it == map_.end()) throw std::out_of_range("missing variable " + key_name(key));
  return std::get<Quadric>(it->second);
}

int Values::dim(const VariableKey& key) const {
  if (key.kind == VariableKey::Kind::Pose) return 6;
  return at_quadric(key).dof();
}

Values Values::retract(const std::vector<VariableKey>& order, const std::vector<int>& offsets,
                       const Eigen::VectorXd& delta) const {
  Values out = *this;
  for (size_t i = 0; i < order.size(); ++i) {
    const VariableKey& key = order[i];
    const int off = offsets[i];
    if (key.kind == VariableKey::Kind::Pose) {
      out.update(key, at_pose(key) * se3_exp(delta.segment<6>(off)));
    } else {
      const Quadric& q = at_quadric(key);
      out.update(key, boxplus(q, delta.segment(off, q.dof())));
    }
  }
  return out;
}

Factor::Factor(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols()) throw std::invalid_argument("covariance must be square");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, covariance.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("covariance must be positive definite");
  info_ = llt.solve(Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
  info_ = 0.5 * (info_ + info_.transpose().eval());
}

double Factor::cost(const Values& values) const {
  const Eigen::VectorXd r = residual(values);
  const double sq = r.dot(info_ * r);
  if (huber_delta_ <= 0.0) return 0.5 * sq;
  const double e = std::sqrt(sq);
  if (e <= huber_delta_) return 0.5 * sq;
  return huber_delta_ * e - 0.5 * huber_delta_ * huber_delta_;
}

double Factor::robust_weight(const Eigen::VectorXd& residual) const {
  if (huber_delta_ <= 0.0) return 1.0;
  const double e = std::sqrt(residual.dot(info_ * residual));
  return e <= huber_delta_ ? 1.0 : huber_delta_ / e;
}

PriorFactor::PriorFactor(const VariableKey& key, const RigidTransform& measured,
                         const Matrix6d& covariance)
    : Factor(covariance), key_(key), measured_(measured) {}

Eigen::VectorXd PriorFactor::residual(const Values& values) const {
  return prior_residual(values.at_pose(key_), measured_);
}

std::vector<Eigen::MatrixXd> PriorFactor::jacobians(const Values& values) const {
  const Vector6d r = prior_residual(values.at_pose(key_), measured_);
  return {se3_right_jacobian_inv(r)};
}

OdometryFactor::OdometryFactor(const VariableKey& from, const VariableKey& to,
                               const RigidTransform& measured, const Matrix6d& covariance)
    : Factor(covariance), from_(from), to_(to), measured_(measured) {}

Eigen::VectorXd OdometryFactor::residual(const Values& values) const {
  return odometry_residual(values.at_pose(from_), values.at_pose(to_), measured_);
}

std::vector<Eigen::MatrixXd> OdometryFactor::jacobians(const Values& values) const {
  const RigidTransform& t_from = values.at_pose(from_);
  const RigidTransform& t_to = values.at_pose(to_);
  const RigidTransform rel = t_from.inverse() * t_to;
  const Vector6d r = odometry_residual(t_from, t_to, measured_);
  const Matrix6d jri = se3_right_jacobian_inv(r);
  return {-jri * se3_adjoint(rel.inverse()), jri};
}

ObservationFactor::ObservationFactor(const VariableKey& pose, const VariableKey& quadric,
                                     const Quadric& measured, const Eigen::MatrixXd& covariance)
    : Factor(covariance), pose_(pose), quadric_(quadric), measured_(measured) {
  if (covariance.rows() != measured.dof()) {
    throw std::invalid_argument("observation covariance dimension must equal the class dof");
  }
}

Eigen::VectorXd ObservationFactor::residual(const Values& values) const {
  return observation_residual(values.at_pose(pose_), values.at_quadric(quadric_), measured_);
}

std::vector<Eigen::MatrixXd> ObservationFactor::jacobians(const Values& values) const {
  const RigidTransform& t_wc = values.at_pose(pose_);
  const Quadric& landmark = values.at_quadric(quadric_);
  const Quadric pred = transform(t_wc, landmark);

  const auto canon = detail::canonicalize(pred, measured_.pose(), measured_.scale());
  const QuadricClass cls = landmark.cls();
  const Matrix6d jri = se3_right_jacobian_inv(canon.xi);
  const Eigen::MatrixXd excl = excluded_pose_basis(cls);

  // Sensitivity of the canonical tangent to a body perturbation of the
  // prediction pose, with the implicit motion of the continuous symmetry
  // gauge folded in.
  Matrix6d m = jri;
  if (excl.cols() > 0) {
    const Eigen::MatrixXd a = excl.transpose() * jri * excl;
    m = jri - jri * excl * a.fullPivLu().solve(excl.transpose() * jri);
  }
  m = m * se3_adjoint(canon.group_element.inverse());

  const Eigen::MatrixXd lift = lifting_matrix(cls);
  const Eigen::MatrixXd reduce = lifting_pinv(cls);
  const int n = qslam::dof(cls);

  Eigen::MatrixXd d_full_q(9, n);
  d_full_q.topRows<6>() = m * lift.topRows<6>();
  d_full_q.bottomRows<3>() = canon.scale_perm * lift.bottomRows<3>();

  Eigen::MatrixXd d_full_x = Eigen::MatrixXd::Zero(9, 6);
  d_full_x.topRows<6>() = -m * se3_adjoint(pred.pose().inverse());

  return {reduce * d_full_x, reduce * d_full_q};
}

Eigen::VectorXd observation_residual(const RigidTransform& pose, const Quadric& quadric,
                                     const Quadric& measured) {
  if (quadric.cls() != measured.cls() || quadric.signature() != measured.signature()) {
    throw std::invalid_argument("observation class mismatch");
  }
  return boxminus(transform(pose, quadric), measured);
}

Vector6d odometry_residual(const RigidTransform& from, const RigidTransform& to,
                           const RigidTransform& measured_relative) {
  return se3_log(measured_relative.inverse() * (from.inverse() * to));
}

Vector6d prior_residual(const RigidTransform& pose, const RigidTransform& measured) {
  return se3_log(measured.inverse() * pose);
}

void FactorGraph::add_prior(const VariableKey& key, const RigidTransform& measured,
                            const Matrix6d& cov) {
  add(std::make_shared<PriorFactor>(key, measured, cov));
}

void FactorGraph::add_odometry(const VariableKey& from, const VariableKey& to,
                               const RigidTransform& measured, const Matrix6d& cov) {
  add(std::make_shared<OdometryFactor>(from, to, measured, cov));
}

void FactorGraph::add_observation(const VariableKey& pose, const VariableKey& quadric,
                                  const Quadric& measured, const Eigen::MatrixXd& cov) {
  add(std::make_shared<ObservationFactor>(pose, quadric, measured, cov));
}

double FactorGraph::cost(const Values& values) const {
  double total = 0.0;
  for (const auto& f : factors_) total += f->cost(values);
  return total;
}

}  // namespace qslam::graph
