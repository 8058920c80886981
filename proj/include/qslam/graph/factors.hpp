#pragma once

#include <memory>
#include <vector>

#include "qslam/graph/values.hpp"

namespace qslam::graph {

/// Measurement cost term 0.5 * r^T Sigma^-1 r with analytic Jacobians of r
/// with respect to the boxplus perturbation of each connected variable.
class Factor {
 public:
  virtual ~Factor() = default;

  virtual int dim() const = 0;
  virtual std::vector<VariableKey> keys() const = 0;
  virtual Eigen::VectorXd residual(const Values& values) const = 0;
  virtual std::vector<Eigen::MatrixXd> jacobians(const Values& values) const = 0;

  const Eigen::MatrixXd& information() const { return info_; }
  double cost(const Values& values) const;

  /// Enables a Huber kernel on this factor's whitened norm (0 disables).
  void set_robust_huber(double delta) { huber_delta_ = delta; }
  /// IRLS weight min(1, delta/|r|_Sigma); 1 when the kernel is disabled.
  double robust_weight(const Eigen::VectorXd& residual) const;

 protected:
  /// Validates that covariance is symmetric positive definite.
  explicit Factor(const Eigen::MatrixXd& covariance);

 private:
  Eigen::MatrixXd info_;
  double huber_delta_ = 0.0;
};

/// Anchors one pose to a measured pose; fixes the gauge freedom.
class PriorFactor final : public Factor {
 public:
  PriorFactor(const VariableKey& key, const RigidTransform& measured, const Matrix6d& covariance);

  int dim() const override { return 6; }
  std::vector<VariableKey> keys() const override { return {key_}; }
  Eigen::VectorXd residual(const Values& values) const override;
  std::vector<Eigen::MatrixXd> jacobians(const Values& values) const override;
  const RigidTransform& measured() const { return measured_; }

 private:
  VariableKey key_;
  RigidTransform measured_;
};

/// Relative pose constraint between two poses.
class OdometryFactor final : public Factor {
 public:
  OdometryFactor(const VariableKey& from, const VariableKey& to, const RigidTransform& measured,
                 const Matrix6d& covariance);

  int dim() const override { return 6; }
  std::vector<VariableKey> keys() const override { return {from_, to_}; }
  Eigen::VectorXd residual(const Values& values) const override;
  std::vector<Eigen::MatrixXd> jacobians(const Values& values) const override;
  const RigidTransform& measured() const { return measured_; }
  const VariableKey& from() const { return from_; }
  const VariableKey& to() const { return to_; }

 private:
  VariableKey from_, to_;
  RigidTransform measured_;
};

/// Quadric observed from a pose, measured in the sensor frame, with the
/// residual expressed in the class's reduced tangent coordinates.
class ObservationFactor final : public Factor {
 public:
  ObservationFactor(const VariableKey& pose, const VariableKey& quadric, const Quadric& measured,
                    const Eigen::MatrixXd& covariance);

  int dim() const override { return measured_.dof(); }
  std::vector<VariableKey> keys() const override { return {pose_, quadric_}; }
  Eigen::VectorXd residual(const Values& values) const override;
  std::vector<Eigen::MatrixXd> jacobians(const Values& values) const override;
  const Quadric& measured() const { return measured_; }
  const VariableKey& pose_key() const { return pose_; }
  const VariableKey& quadric_key() const { return quadric_; }

 private:
  VariableKey pose_, quadric_;
  Quadric measured_;
};

/// Residual of an observation without building a factor; used by association.
Eigen::VectorXd observation_residual(const RigidTransform& pose, const Quadric& quadric,
                                     const Quadric& measured);

Vector6d odometry_residual(const RigidTransform& from, const RigidTransform& to,
                           const RigidTransform& measured_relative);

Vector6d prior_residual(const RigidTransform& pose, const RigidTransform& measured);

class FactorGraph {
 public:
  void add(std::shared_ptr<const Factor> factor) { factors_.push_back(std::move(factor)); }
  void add_prior(const VariableKey& key, const RigidTransform& measured, const Matrix6d& cov);
  void add_odometry(const VariableKey& from, const VariableKey& to, const RigidTransform& measured,
                    const Matrix6d& cov);
  void add_observation(const VariableKey& pose, const VariableKey& quadric, const Quadric& measured,
                       const Eigen::MatrixXd& cov);

  const std::vector<std::shared_ptr<const Factor>>& factors() const { return factors_; }
  size_t size() const { return factors_.size(); }

  double cost(const Values& values) const;

 private:
  std::vector<std::shared_ptr<const Factor>> factors_;
};

}  // namespace qslam::graph
