#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace qslam {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Angle below which exp/log and the Jacobians switch to series expansions.
inline constexpr double kSmallAngle = 1e-8;

Eigen::Matrix3d skew(const Eigen::Vector3d& v);
Eigen::Vector3d unskew(const Eigen::Matrix3d& m);

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi);

/// Rotation angle of R in [0, pi]. Safe at the branch cut.
double rotation_angle(const Eigen::Matrix3d& R);

/// Principal logarithm. Throws std::domain_error for angles at/near pi.
Eigen::Vector3d so3_log(const Eigen::Matrix3d& R);

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi);
Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& phi);

/// Rigid transform in SE(3), stored as rotation matrix + translation.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
    return RigidTransform(q.normalized().toRotationMatrix(), t);
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }
  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation_); }

  RigidTransform inverse() const {
    Eigen::Matrix3d rt = rotation_.transpose();
    return RigidTransform(rt, -(rt * translation_));
  }

  RigidTransform operator*(const RigidTransform& other) const {
    return RigidTransform(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_);
  }

  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const { return rotation_ * p + translation_; }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
  }

  /// R orthonormal and det(R)=+1 within tol.
  bool is_valid(double tol = 1e-9) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

// Twist ordering throughout: translation block first, rotation block second.
Eigen::Matrix4d se3_hat(const Vector6d& xi);
Vector6d se3_vee(const Eigen::Matrix4d& m);

RigidTransform se3_exp(const Vector6d& xi);

/// Principal logarithm. Throws std::domain_error("log branch ambiguous") near angle pi.
Vector6d se3_log(const RigidTransform& T);

/// Adjoint of T: hat(Ad_T xi) = T hat(xi) T^-1.
Matrix6d se3_adjoint(const RigidTransform& T);

/// d/deta log(exp(hat(xi)) exp(hat(eta)))|_{eta=0}.
Matrix6d se3_right_jacobian_inv(const Vector6d& xi);
Matrix6d se3_left_jacobian_inv(const Vector6d& xi);

/// Geodesic angle between two rotations.
double rotation_geodesic(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace qslam
