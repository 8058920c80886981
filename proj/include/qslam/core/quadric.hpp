#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "qslam/core/lie.hpp"

namespace qslam {

using Vector9d = Eigen::Matrix<double, 9, 1>;

/// Diagonal sign pattern of the canonical quadric matrix (Sylvester signature).
struct Signature {
  std::array<int, 4> entries{};

  bool operator==(const Signature& other) const { return entries == other.entries; }
  bool operator!=(const Signature& other) const { return !(*this == other); }
};

enum class QuadricClass { General, Plane, Sphere, CircularCylinder, CircularCone };

/// Dimension of the class's minimal parameterization.
int dof(QuadricClass cls);

const char* class_name(QuadricClass cls);
QuadricClass class_from_name(const std::string& name);

/// Canonical signature of a constrained class. Throws for General, which
/// carries its own signature supplied by the front-end.
Signature class_signature(QuadricClass cls);

/// True iff sig is one of the supported class signatures or a valid
/// sorted (+1s, -1s, 0s) pattern for the general fallback.
bool is_supported_signature(const Signature& sig);

Eigen::Matrix4d canonical_matrix(const Signature& sig);

/// Symmetrizes and normalizes a homogeneous quadric matrix so comparisons are
/// well defined: largest-magnitude entry has absolute value 1 and the first
/// nonzero entry in row-major order is positive.
Eigen::Matrix4d normalize_quadric_matrix(Eigen::Matrix4d q);

/// Quadric surface landmark: class/signature, pose of the quadric frame in the
/// world, and diagonal scale (entries are inverse semi-axis lengths).
class Quadric {
 public:
  /// Unit sphere at the origin.
  Quadric() : Quadric(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones()) {}

  /// Validates the class's scale constraints (throws std::invalid_argument):
  /// Sphere a=b=c; Cylinder/Cone a=b, c=1; Plane (1,1,1); all entries > 0.
  Quadric(QuadricClass cls, const RigidTransform& pose, const Eigen::Vector3d& scale);

  /// General quadric with an explicit signature.
  Quadric(const Signature& sig, const RigidTransform& pose, const Eigen::Vector3d& scale);

  static Quadric sphere(const Eigen::Vector3d& centre, double radius);
  /// Plane through `point` with unit normal `normal`; in-plane gauge is fixed
  /// deterministically from the normal.
  static Quadric plane(const Eigen::Vector3d& normal, const Eigen::Vector3d& point);
  static Quadric cylinder(const Eigen::Vector3d& axis_point, const Eigen::Vector3d& axis, double radius);
  static Quadric cone(const Eigen::Vector3d& apex, const Eigen::Vector3d& axis, double half_angle);

  QuadricClass cls() const { return cls_; }
  const Signature& signature() const { return sig_; }
  const RigidTransform& pose() const { return pose_; }
  const Eigen::Vector3d& scale() const { return scale_; }
  int dof() const { return qslam::dof(cls_); }

 private:
  QuadricClass cls_;
  Signature sig_;
  RigidTransform pose_;
  Eigen::Vector3d scale_;
};

/// Homogeneous 4x4 matrix of the quadric, normalized.
Eigen::Matrix4d to_matrix(const Quadric& q);

/// Algebraic value h^T Q h of the homogenized point (zero iff on the surface).
double evaluate(const Quadric& q, const Eigen::Vector3d& p);

/// 9 x dof matrix mapping the reduced tangent to the full tangent
/// (rho1,rho2,rho3, phi1,phi2,phi3, s_a,s_b,s_c).
Eigen::MatrixXd lifting_matrix(QuadricClass cls);

/// Moore-Penrose pseudoinverse of the lifting matrix (dof x 9); equals the
/// transpose on the selection rows and averages tied scale rows.
Eigen::MatrixXd lifting_pinv(QuadricClass cls);

/// 6 x k basis of the excluded pose directions (the symmetry algebra of the
/// canonical surface); k = 6 - pose dof of the class.
Eigen::MatrixXd excluded_pose_basis(QuadricClass cls);

/// Retraction with the class's reduced tangent (delta.size() == dof).
/// Pose moves by a body-frame twist, scale additively. Throws if a scale
/// entry would leave the positive domain.
Quadric boxplus(const Quadric& q, const Eigen::VectorXd& delta);

/// Raw 9-vector retraction without lifting; used by invariance probes.
Quadric boxplus_full(const Quadric& q, const Vector9d& delta);

/// Reduced tangent difference satisfying boxplus(q_ref, result) == q up to the
/// class's discrete/continuous surface symmetries, which are quotiented out
/// before the difference is taken.
Eigen::VectorXd boxminus(const Quadric& q, const Quadric& q_ref);

/// Expresses q in the frame of sensor pose T (world -> sensor); scale untouched.
Quadric transform(const RigidTransform& T_world_sensor, const Quadric& q);

/// Nearest point on the surface. Closed-form for the constrained classes,
/// Newton on the first-order optimality conditions for General.
Eigen::Vector3d project_point(const Quadric& q, const Eigen::Vector3d& p);

/// Result of quotienting q's representation over its class symmetry group so
/// its pose is the group representative nearest q_ref's pose.
Quadric canonicalize_against(const Quadric& q, const Quadric& q_ref);

namespace detail {
/// Canonicalization with the pieces the observation-factor Jacobians need:
/// the总 applied group element g (pose part) and the scale permutation.
struct Canonicalized {
  RigidTransform pose;          // q.pose * g
  Eigen::Vector3d scale;        // permuted scale
  Eigen::Matrix3d scale_perm;   // permutation applied to the scale vector
  RigidTransform group_element; // g
  Vector6d xi;                  // log(ref_pose^-1 * pose)
};
Canonicalized canonicalize(const Quadric& q, const RigidTransform& ref_pose,
                           const Eigen::Vector3d& ref_scale);
}  // namespace detail

}  // namespace qslam
