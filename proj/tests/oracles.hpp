// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <functional>
#include <random>

#include <Eigen/Dense>

#include "qslam/core/quadric.hpp"

namespace qslam::test {

/// Matrix exponential by scaling-and-squaring with a plain Taylor series.
inline Eigen::MatrixXd expm_oracle(Eigen::MatrixXd a) {
  int squarings = 0;
  while (a.cwiseAbs().maxCoeff() > 0.25 && squarings < 60) {
    a *= 0.5;
    ++squarings;
  }
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd term = result;
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

/// Central-difference Jacobian of a vector map defined on a tangent space.
inline Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        int in_dim, double step = 1e-6) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(in_dim);
  const Eigen::VectorXd f0 = f(zero);
  Eigen::MatrixXd jac(f0.size(), in_dim);
  for (int i = 0; i < in_dim; ++i) {
    Eigen::VectorXd plus = zero, minus = zero;
    plus(i) += step;
    minus(i) -= step;
    jac.col(i) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return jac;
}

/// Worst entrywise violation measure for "relative rel_tol with an absolute
/// abs_floor": compare the result against rel_tol. The denominator floor
/// abs_floor/rel_tol makes discrepancies below abs_floor pass outright.
inline double max_relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 double rel_tol = 1e-5, double abs_floor = 1e-8) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double denom = std::max({std::abs(a(i, j)), std::abs(b(i, j)), abs_floor / rel_tol});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / denom);
    }
  }
  return worst;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  while (q.norm() < 1e-6) q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

inline RigidTransform random_transform(std::mt19937_64& rng, double translation_range = 2.0) {
  std::uniform_real_distribution<double> u(-translation_range, translation_range);
  return RigidTransform(random_rotation(rng), Eigen::Vector3d(u(rng), u(rng), u(rng)));
}

inline Quadric random_quadric(QuadricClass cls, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.6, 1.8);
  const RigidTransform pose = random_transform(rng);
  switch (cls) {
    case QuadricClass::Plane:
      return Quadric(cls, pose, Eigen::Vector3d::Ones());
    case QuadricClass::Sphere: {
      const double a = u(rng);
      return Quadric(cls, pose, Eigen::Vector3d(a, a, a));
    }
    case QuadricClass::CircularCylinder:
    case QuadricClass::CircularCone: {
      const double a = u(rng);
      return Quadric(cls, pose, Eigen::Vector3d(a, a, 1.0));
    }
    case QuadricClass::General: {
      // Pairwise-distinct scales keep the symmetry group at the four flips.
      Eigen::Vector3d s(u(rng), u(rng), u(rng));
      s(1) += 0.25;
      s(2) += 0.55;
      return Quadric(Signature{{+1, +1, +1, -1}}, pose, s);
    }
  }
  throw std::logic_error("unreachable");
}

/// Uniform-ish random point on the quadric surface (world frame).
inline Eigen::Vector3d random_surface_point(const Quadric& q, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Eigen::Vector3d s = q.scale();
  Eigen::Vector3d local;
  switch (q.cls()) {
    case QuadricClass::Plane:
      local = Eigen::Vector3d(0.0, 2.0 * u(rng), 2.0 * u(rng));
      break;
    case QuadricClass::Sphere: {
      Eigen::Vector3d d(n(rng), n(rng), n(rng));
      d.normalize();
      local = d / s.x();
      break;
    }
    case QuadricClass::CircularCylinder: {
      const double theta = M_PI * u(rng);
      local = Eigen::Vector3d(std::cos(theta) / s.x(), std::sin(theta) / s.x(), 2.0 * u(rng));
      break;
    }
    case QuadricClass::CircularCone: {
      const double theta = M_PI * u(rng);
      double z = 2.0 * u(rng);
      if (std::abs(z) < 0.2) z = z < 0.0 ? z - 0.2 : z + 0.2;  // stay off the apex
      const double rho = std::abs(z) / s.x();
      local = Eigen::Vector3d(rho * std::cos(theta), rho * std::sin(theta), z);
      break;
    }
    case QuadricClass::General: {
      // Ellipsoid signature (+1,+1,+1,-1).
      Eigen::Vector3d d(n(rng), n(rng), n(rng));
      d.normalize();
      local = Eigen::Vector3d(d.x() / s.x(), d.y() / s.y(), d.z() / s.z());
      break;
    }
  }
  return q.pose() * local;
}

}  // namespace qslam::test
