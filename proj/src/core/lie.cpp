#include "qslam/core/lie.hpp"

#include <cmath>
#include <stdexcept>

namespace qslam {

namespace {

// Coefficients of the Rodrigues-family formulas with series fallbacks.
// a = sin(t)/t, b = (1-cos(t))/t^2, c = (t-sin(t))/t^3.
struct TrigCoeffs {
  double a, b, c;
};

// The closed forms cancel catastrophically well above the exp/log branch
// threshold, so the series kicks in earlier than kSmallAngle.
constexpr double kSeriesThreshold = 1e-4;

TrigCoeffs trig_coeffs(double theta) {
  TrigCoeffs k{};
  const double t2 = theta * theta;
  if (theta < kSeriesThreshold) {
    k.a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    k.b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    k.c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
  } else {
    k.a = std::sin(theta) / theta;
    k.b = (1.0 - std::cos(theta)) / t2;
    k.c = (theta - std::sin(theta)) / (t2 * theta);
  }
  return k;
}

// d = 1/t^2 - (1+cos(t))/(2 t sin(t)), the phi^2 coefficient of J^-1.
double jac_inv_coeff(double theta) {
  const double t2 = theta * theta;
  if (theta < kSeriesThreshold) return 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  return 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
}

// Q(rho, phi) block of the SE(3) left Jacobian; validated against the
// integral form of the Jacobian in the tests.
Eigen::Matrix3d barfoot_q(const Eigen::Vector3d& rho, const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const double t2 = theta * theta;
  const Eigen::Matrix3d rx = skew(rho);
  const Eigen::Matrix3d px = skew(phi);

  double e1, e2, e3;
  if (theta < 0.05) {
    const double t4 = t2 * t2;
    e1 = 1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0;
    e2 = -1.0 / 24.0 + t2 / 720.0 - t4 / 40320.0;
    e3 = -1.0 / 120.0 + t2 / 5040.0 - t4 / 362880.0;
  } else {
    const double t4 = t2 * t2;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    e1 = (theta - st) / (t2 * theta);
    e2 = (1.0 - t2 / 2.0 - ct) / t4;
    e3 = (theta - st - t2 * theta / 6.0) / (t4 * theta);
  }

  Eigen::Matrix3d q = 0.5 * rx;
  q += e1 * (px * rx + rx * px + px * rx * px);
  q += -e2 * (px * px * rx + rx * px * px - 3.0 * px * rx * px);
  q += -0.5 * (e2 - 3.0 * e3) * (px * rx * px * px + px * px * rx * px);
  return q;
}

}  // namespace

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Vector3d unskew(const Eigen::Matrix3d& m) { return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0)); }

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const TrigCoeffs k = trig_coeffs(theta);
  const Eigen::Matrix3d px = skew(phi);
  return Eigen::Matrix3d::Identity() + k.a * px + k.b * px * px;
}

double rotation_angle(const Eigen::Matrix3d& R) {
  const double c = std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const double theta = rotation_angle(R);
  if (theta >= M_PI - 1e-6) {
    throw std::domain_error("log branch ambiguous: rotation angle within 1e-6 of pi");
  }
  const Eigen::Vector3d w = unskew(R - R.transpose()) * 0.5;
  if (theta < kSmallAngle) {
    return w * (1.0 + theta * theta / 6.0);
  }
  return w * (theta / std::sin(theta));
}

Eigen::Matrix3d so3_left_jacobian(const Eigen::Vector3d& phi) {
  const TrigCoeffs k = trig_coeffs(phi.norm());
  const Eigen::Matrix3d px = skew(phi);
  return Eigen::Matrix3d::Identity() + k.b * px + k.c * px * px;
}

Eigen::Matrix3d so3_left_jacobian_inv(const Eigen::Vector3d& phi) {
  const double d = jac_inv_coeff(phi.norm());
  const Eigen::Matrix3d px = skew(phi);
  return Eigen::Matrix3d::Identity() - 0.5 * px + d * px * px;
}

bool RigidTransform::is_valid(double tol) const {
  const Eigen::Matrix3d err = rotation_ * rotation_.transpose() - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rotation_.determinant() - 1.0) > tol) return false;
  return translation_.allFinite();
}

Eigen::Matrix4d se3_hat(const Vector6d& xi) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = skew(xi.tail<3>());
  m.topRightCorner<3, 1>() = xi.head<3>();
  return m;
}

Vector6d se3_vee(const Eigen::Matrix4d& m) {
  Vector6d xi;
  xi.head<3>() = m.topRightCorner<3, 1>();
  xi.tail<3>() = unskew(m.topLeftCorner<3, 3>());
  return xi;
}

RigidTransform se3_exp(const Vector6d& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d phi = xi.tail<3>();
  return RigidTransform(so3_exp(phi), so3_left_jacobian(phi) * rho);
}

Vector6d se3_log(const RigidTransform& T) {
  const Eigen::Vector3d phi = so3_log(T.rotation());
  Vector6d xi;
  xi.head<3>() = so3_left_jacobian_inv(phi) * T.translation();
  xi.tail<3>() = phi;
  return xi;
}

Matrix6d se3_adjoint(const RigidTransform& T) {
  Matrix6d ad = Matrix6d::Zero();
  ad.topLeftCorner<3, 3>() = T.rotation();
  ad.bottomRightCorner<3, 3>() = T.rotation();
  ad.topRightCorner<3, 3>() = skew(T.translation()) * T.rotation();
  return ad;
}

Matrix6d se3_left_jacobian_inv(const Vector6d& xi) {
  const Eigen::Vector3d rho = xi.head<3>();
  const Eigen::Vector3d phi = xi.tail<3>();
  const Eigen::Matrix3d jinv = so3_left_jacobian_inv(phi);
  const Eigen::Matrix3d q = barfoot_q(rho, phi);
  Matrix6d out = Matrix6d::Zero();
  out.topLeftCorner<3, 3>() = jinv;
  out.bottomRightCorner<3, 3>() = jinv;
  out.topRightCorner<3, 3>() = -jinv * q * jinv;
  return out;
}

Matrix6d se3_right_jacobian_inv(const Vector6d& xi) { return se3_left_jacobian_inv(-xi); }

double rotation_geodesic(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return rotation_angle(a.transpose() * b);
}

}  // namespace qslam
