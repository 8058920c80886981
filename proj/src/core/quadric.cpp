#include "qslam/core/quadric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace qslam {

namespace {

constexpr double kScaleEqualTol = 1e-6;   // "scales coincide" gate for permutations
constexpr double kBranchMargin = 1e-3;    // candidates this close to pi are skipped
constexpr double kMatrixZeroTol = 1e-12;

Eigen::Vector3d normalized_or_throw(const Eigen::Vector3d& v, const char* what) {
  const double n = v.norm();
  if (n < 1e-12) throw std::invalid_argument(std::string("degenerate primitive: zero ") + what);
  return v / n;
}

// Right-handed rotation whose third column is the unit vector a.
Eigen::Matrix3d frame_with_z(const Eigen::Vector3d& a) {
  const Eigen::Vector3d helper = std::abs(a.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d u = helper.cross(a).normalized();
  const Eigen::Vector3d v = a.cross(u);
  Eigen::Matrix3d r;
  r.col(0) = u;
  r.col(1) = v;
  r.col(2) = a;
  return r;
}

// Right-handed rotation whose first column is the unit vector n.
Eigen::Matrix3d frame_with_x(const Eigen::Vector3d& n) {
  const Eigen::Vector3d helper = std::abs(n.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  const Eigen::Vector3d u = helper.cross(n).normalized();
  const Eigen::Vector3d v = n.cross(u);
  Eigen::Matrix3d r;
  r.col(0) = n;
  r.col(1) = u;
  r.col(2) = v;
  return r;
}

void validate_scale(QuadricClass cls, const Eigen::Vector3d& s) {
  if (!(s.x() > 0.0 && s.y() > 0.0 && s.z() > 0.0)) {
    throw std::invalid_argument("quadric scale entries must be positive");
  }
  switch (cls) {
    case QuadricClass::Sphere:
      if (s.x() != s.y() || s.y() != s.z()) {
        throw std::invalid_argument("sphere scale must satisfy a = b = c");
      }
      break;
    case QuadricClass::CircularCylinder:
    case QuadricClass::CircularCone:
      if (s.x() != s.y() || s.z() != 1.0) {
        throw std::invalid_argument("cylinder/cone scale must satisfy a = b, c = 1");
      }
      break;
    case QuadricClass::Plane:
      if (s.x() != 1.0 || s.y() != 1.0 || s.z() != 1.0) {
        throw std::invalid_argument("plane scale must be (1, 1, 1)");
      }
      break;
    case QuadricClass::General:
      break;
  }
}

bool sorted_signature(const Signature& sig) {
  // +1 entries first, then -1, then 0; at least one nonzero.
  int state = 0;  // 0: in +1 run, 1: in -1 run, 2: in 0 run
  bool any_nonzero = false;
  for (int e : sig.entries) {
    if (e != 1 && e != -1 && e != 0) return false;
    if (e != 0) any_nonzero = true;
    const int want = e == 1 ? 0 : (e == -1 ? 1 : 2);
    if (want < state) return false;
    state = want;
  }
  return any_nonzero;
}

// Construct preserving class and (for General) signature.
Quadric make_like(const Quadric& q, const RigidTransform& pose, const Eigen::Vector3d& scale) {
  if (q.cls() == QuadricClass::General) return Quadric(q.signature(), pose, scale);
  return Quadric(q.cls(), pose, scale);
}

}  // namespace

int dof(QuadricClass cls) {
  switch (cls) {
    case QuadricClass::General: return 9;
    case QuadricClass::Plane: return 3;
    case QuadricClass::Sphere: return 4;
    case QuadricClass::CircularCylinder: return 5;
    case QuadricClass::CircularCone: return 6;
  }
  throw std::invalid_argument("unknown quadric class");
}

const char* class_name(QuadricClass cls) {
  switch (cls) {
    case QuadricClass::General: return "general";
    case QuadricClass::Plane: return "plane";
    case QuadricClass::Sphere: return "sphere";
    case QuadricClass::CircularCylinder: return "circular_cylinder";
    case QuadricClass::CircularCone: return "circular_cone";
  }
  throw std::invalid_argument("unknown quadric class");
}

QuadricClass class_from_name(const std::string& name) {
  if (name == "general") return QuadricClass::General;
  if (name == "plane") return QuadricClass::Plane;
  if (name == "sphere") return QuadricClass::Sphere;
  if (name == "circular_cylinder") return QuadricClass::CircularCylinder;
  if (name == "circular_cone") return QuadricClass::CircularCone;
  throw std::invalid_argument("unknown quadric class name: " + name);
}

Signature class_signature(QuadricClass cls) {
  switch (cls) {
    case QuadricClass::Plane: return Signature{{+1, 0, 0, 0}};
    case QuadricClass::Sphere: return Signature{{+1, +1, +1, -1}};
    // Permuted on purpose: the canonical right cylinder needs the zero in the
    // third slot so its axis is the quadric-frame z-axis.
    case QuadricClass::CircularCylinder: return Signature{{+1, +1, 0, -1}};
    case QuadricClass::CircularCone: return Signature{{+1, +1, -1, 0}};
    case QuadricClass::General:
      throw std::invalid_argument("signature must be supplied for the general class");
  }
  throw std::invalid_argument("unknown quadric class");
}

bool is_supported_signature(const Signature& sig) {
  if (sig == class_signature(QuadricClass::CircularCylinder)) return true;
  return sorted_signature(sig);
}

Eigen::Matrix4d canonical_matrix(const Signature& sig) {
  if (!is_supported_signature(sig)) throw std::invalid_argument("unsupported quadric signature");
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) d(i, i) = static_cast<double>(sig.entries[i]);
  return d;
}

Eigen::Matrix4d normalize_quadric_matrix(Eigen::Matrix4d q) {
  q = 0.5 * (q + q.transpose().eval());
  const double m = q.cwiseAbs().maxCoeff();
  if (m <= 0.0) throw std::invalid_argument("zero quadric matrix");
  q /= m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (std::abs(q(i, j)) > kMatrixZeroTol) {
        if (q(i, j) < 0.0) q = -q;
        return q;
      }
    }
  }
  return q;
}

Quadric::Quadric(QuadricClass cls, const RigidTransform& pose, const Eigen::Vector3d& scale)
    : cls_(cls), pose_(pose), scale_(scale) {
  if (cls == QuadricClass::General) {
    throw std::invalid_argument("general quadric requires an explicit signature");
  }
  sig_ = class_signature(cls);
  validate_scale(cls, scale);
}

Quadric::Quadric(const Signature& sig, const RigidTransform& pose, const Eigen::Vector3d& scale)
    : cls_(QuadricClass::General), sig_(sig), pose_(pose), scale_(scale) {
  if (!is_supported_signature(sig)) throw std::invalid_argument("unsupported quadric signature");
  validate_scale(cls_, scale);
}

Quadric Quadric::sphere(const Eigen::Vector3d& centre, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("degenerate primitive: zero radius");
  const double a = 1.0 / radius;
  return Quadric(QuadricClass::Sphere, RigidTransform(Eigen::Matrix3d::Identity(), centre),
                 Eigen::Vector3d(a, a, a));
}

Quadric Quadric::plane(const Eigen::Vector3d& normal, const Eigen::Vector3d& point) {
  const Eigen::Vector3d n = normalized_or_throw(normal, "normal");
  const Eigen::Vector3d anchor = n * n.dot(point);  // plane point closest to the origin
  return Quadric(QuadricClass::Plane, RigidTransform(frame_with_x(n), anchor), Eigen::Vector3d::Ones());
}

Quadric Quadric::cylinder(const Eigen::Vector3d& axis_point, const Eigen::Vector3d& axis, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("degenerate primitive: zero radius");
  const Eigen::Vector3d a = normalized_or_throw(axis, "axis");
  const double s = 1.0 / radius;
  return Quadric(QuadricClass::CircularCylinder, RigidTransform(frame_with_z(a), axis_point),
                 Eigen::Vector3d(s, s, 1.0));
}

Quadric Quadric::cone(const Eigen::Vector3d& apex, const Eigen::Vector3d& axis, double half_angle) {
  if (!(half_angle > 0.0 && half_angle < M_PI / 2.0)) {
    throw std::invalid_argument("cone half-angle must lie in (0, pi/2)");
  }
  const Eigen::Vector3d a = normalized_or_throw(axis, "axis");
  const double s = 1.0 / std::tan(half_angle);
  return Quadric(QuadricClass::CircularCone, RigidTransform(frame_with_z(a), apex),
                 Eigen::Vector3d(s, s, 1.0));
}

Eigen::Matrix4d to_matrix(const Quadric& q) {
  const Eigen::Matrix4d d = canonical_matrix(q.signature());
  Eigen::Matrix4d s_hom = Eigen::Matrix4d::Identity();
  s_hom(0, 0) = q.scale().x();
  s_hom(1, 1) = q.scale().y();
  s_hom(2, 2) = q.scale().z();
  const Eigen::Matrix4d c = s_hom.transpose() * d * s_hom;
  const Eigen::Matrix4d t_inv = q.pose().inverse().matrix();
  return normalize_quadric_matrix(t_inv.transpose() * c * t_inv);
}

double evaluate(const Quadric& q, const Eigen::Vector3d& p) {
  Eigen::Vector4d h;
  h << p, 1.0;
  return h.dot(to_matrix(q) * h);
}

Eigen::MatrixXd lifting_matrix(QuadricClass cls) {
  const int n = dof(cls);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(9, n);
  switch (cls) {
    case QuadricClass::General:
      l.setIdentity();
      break;
    case QuadricClass::Plane:  // (rho1, phi2, phi3)
      l(0, 0) = 1.0;
      l(4, 1) = 1.0;
      l(5, 2) = 1.0;
      break;
    case QuadricClass::Sphere:  // (rho1, rho2, rho3, a)
      l(0, 0) = 1.0;
      l(1, 1) = 1.0;
      l(2, 2) = 1.0;
      l(6, 3) = l(7, 3) = l(8, 3) = 1.0;
      break;
    case QuadricClass::CircularCylinder:  // (rho1, rho2, phi1, phi2, a)
      l(0, 0) = 1.0;
      l(1, 1) = 1.0;
      l(3, 2) = 1.0;
      l(4, 3) = 1.0;
      l(6, 4) = l(7, 4) = 1.0;
      break;
    case QuadricClass::CircularCone:  // (rho1, rho2, rho3, phi1, phi2, a)
      l(0, 0) = 1.0;
      l(1, 1) = 1.0;
      l(2, 2) = 1.0;
      l(3, 3) = 1.0;
      l(4, 4) = 1.0;
      l(6, 5) = l(7, 5) = 1.0;
      break;
  }
  return l;
}

Eigen::MatrixXd lifting_pinv(QuadricClass cls) {
  const Eigen::MatrixXd l = lifting_matrix(cls);
  // Columns are mutually orthogonal, so the pseudoinverse is a row rescaling.
  Eigen::MatrixXd p = l.transpose();
  for (int i = 0; i < p.rows(); ++i) p.row(i) /= l.col(i).squaredNorm();
  return p;
}

Eigen::MatrixXd excluded_pose_basis(QuadricClass cls) {
  auto basis = [](std::initializer_list<int> idx) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(idx.size()));
    int c = 0;
    for (int i : idx) e(i, c++) = 1.0;
    return e;
  };
  switch (cls) {
    case QuadricClass::General: return Eigen::MatrixXd::Zero(6, 0);
    case QuadricClass::Plane: return basis({1, 2, 3});             // rho2, rho3, phi1
    case QuadricClass::Sphere: return basis({3, 4, 5});            // all rotations
    case QuadricClass::CircularCylinder: return basis({2, 5});     // slide, spin
    case QuadricClass::CircularCone: return basis({5});            // spin
  }
  throw std::invalid_argument("unknown quadric class");
}

Quadric boxplus(const Quadric& q, const Eigen::VectorXd& delta) {
  if (delta.size() != q.dof()) {
    throw std::invalid_argument("tangent dimension does not match quadric class dof");
  }
  const Vector9d full = lifting_matrix(q.cls()) * delta;
  const RigidTransform pose = q.pose() * se3_exp(full.head<6>());
  const Eigen::Vector3d scale = q.scale() + full.tail<3>();
  if (!(scale.x() > 0.0 && scale.y() > 0.0 && scale.z() > 0.0)) {
    throw std::domain_error("scale left positive domain");
  }
  return make_like(q, pose, scale);
}

Quadric boxplus_full(const Quadric& q, const Vector9d& delta) {
  const RigidTransform pose = q.pose() * se3_exp(delta.head<6>());
  const Eigen::Vector3d scale = q.scale() + delta.tail<3>();
  if (!(scale.x() > 0.0 && scale.y() > 0.0 && scale.z() > 0.0)) {
    throw std::domain_error("scale left positive domain");
  }
  // The raw update may break class constraints; the result is the same surface
  // family member expressed as a general quadric with the class signature.
  return Quadric(q.signature(), pose, scale);
}

namespace detail {

namespace {

struct GroupElement {
  Eigen::Matrix3d rot;
  Eigen::Matrix3d scale_perm;
};

std::vector<GroupElement> discrete_candidates(const Quadric& q) {
  std::vector<GroupElement> out;
  const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
  auto flip = [](int axis) {
    Eigen::Vector3d d = -Eigen::Vector3d::Ones();
    d(axis) = 1.0;
    return Eigen::Matrix3d(d.asDiagonal());
  };
  out.push_back({i3, i3});
  out.push_back({flip(0), i3});
  out.push_back({flip(1), i3});
  out.push_back({flip(2), i3});

  if (q.cls() != QuadricClass::General) return out;

  // Axis permutations are admissible symmetries only when the scales tied by
  // the permutation coincide numerically.
  const Eigen::Vector3d s = q.scale();
  auto rot90 = [](int axis) {
    Eigen::Matrix3d r = Eigen::Matrix3d::Zero();
    const int a = (axis + 1) % 3;
    const int b = (axis + 2) % 3;
    r(axis, axis) = 1.0;
    r(b, a) = 1.0;
    r(a, b) = -1.0;
    return r;
  };
  std::vector<Eigen::Matrix3d> gens;
  if (std::abs(s.x() - s.y()) < kScaleEqualTol) gens.push_back(rot90(2));
  if (std::abs(s.y() - s.z()) < kScaleEqualTol) gens.push_back(rot90(0));
  if (std::abs(s.x() - s.z()) < kScaleEqualTol) gens.push_back(rot90(1));
  if (gens.empty()) return out;

  // Closure of the flips and admissible 90-degree turns (at most the 24
  // rotations of the octahedral group).
  std::vector<Eigen::Matrix3d> group;
  for (const auto& e : out) group.push_back(e.rot);
  for (const auto& g : gens) group.push_back(g);
  bool grew = true;
  while (grew && group.size() < 24) {
    grew = false;
    const size_t n = group.size();
    for (size_t i = 0; i < n && group.size() < 24; ++i) {
      for (size_t j = 0; j < n && group.size() < 24; ++j) {
        const Eigen::Matrix3d cand = group[i] * group[j];
        bool known = false;
        for (const auto& g : group) {
          if ((g - cand).cwiseAbs().maxCoeff() < 1e-9) {
            known = true;
            break;
          }
        }
        if (!known) {
          group.push_back(cand);
          grew = true;
        }
      }
    }
  }

  out.clear();
  for (const auto& g : group) {
    // Permutation induced by g: new axis i lies along old axis j. Admissible
    // only if it ties equal scales and equal signature slots.
    Eigen::Matrix3d perm = Eigen::Matrix3d::Zero();
    Eigen::Vector3d permuted;
    bool sig_ok = true;
    for (int i = 0; i < 3; ++i) {
      int j = 0;
      g.col(i).cwiseAbs().maxCoeff(&j);
      perm(i, j) = 1.0;
      permuted(i) = s(j);
      if (q.signature().entries[static_cast<size_t>(i)] !=
          q.signature().entries[static_cast<size_t>(j)]) {
        sig_ok = false;
      }
    }
    if (sig_ok && (permuted - s).cwiseAbs().maxCoeff() < kScaleEqualTol) out.push_back({g, perm});
  }
  return out;
}

// Multiplies T_c on the right by symmetry-subalgebra elements until the
// excluded components of log(T_ref^-1 T_c) vanish.
bool refine_to_slice(const RigidTransform& t_ref, const Eigen::MatrixXd& excluded, RigidTransform& t_c,
                     Vector6d& xi_out) {
  const int k = static_cast<int>(excluded.cols());
  for (int iter = 0; iter < 40; ++iter) {
    const RigidTransform x = t_ref.inverse() * t_c;
    if (rotation_angle(x.rotation()) >= M_PI - kBranchMargin) return false;
    const Vector6d xi = se3_log(x);
    if (k == 0) {
      xi_out = xi;
      return true;
    }
    const Eigen::VectorXd xe = excluded.transpose() * xi;
    if (xe.cwiseAbs().maxCoeff() < 1e-14) {
      xi_out = xi;
      return true;
    }
    const Matrix6d jri = se3_right_jacobian_inv(xi);
    const Eigen::MatrixXd a = excluded.transpose() * jri * excluded;
    const Eigen::VectorXd w = a.fullPivLu().solve(xe);
    t_c = t_c * se3_exp(-(excluded * w));
  }
  return false;
}

}  // namespace

Canonicalized canonicalize(const Quadric& q, const RigidTransform& ref_pose,
                           const Eigen::Vector3d& ref_scale) {
  const Eigen::MatrixXd excluded = excluded_pose_basis(q.cls());
  const auto candidates = discrete_candidates(q);

  bool found = false;
  Canonicalized best{};
  double best_score = 0.0;

  for (const auto& cand : candidates) {
    RigidTransform t_c = q.pose() * RigidTransform(cand.rot, Eigen::Vector3d::Zero());
    Vector6d xi;
    if (!refine_to_slice(ref_pose, excluded, t_c, xi)) continue;
    const Eigen::Vector3d s_c = cand.scale_perm * q.scale();
    const double score = xi.squaredNorm() + (s_c - ref_scale).squaredNorm();
    if (!found || score < best_score) {
      found = true;
      best_score = score;
      best.pose = t_c;
      best.scale = s_c;
      best.scale_perm = cand.scale_perm;
      best.group_element = q.pose().inverse() * t_c;
      best.xi = xi;
    }
  }
  if (!found) throw std::domain_error("quadric pose difference at log branch cut");
  return best;
}

}  // namespace detail

Quadric canonicalize_against(const Quadric& q, const Quadric& q_ref) {
  const auto c = detail::canonicalize(q, q_ref.pose(), q_ref.scale());
  return make_like(q, c.pose, c.scale);
}

Eigen::VectorXd boxminus(const Quadric& q, const Quadric& q_ref) {
  if (q.cls() != q_ref.cls() || q.signature() != q_ref.signature()) {
    throw std::invalid_argument("boxminus requires quadrics of the same class and signature");
  }
  const auto c = detail::canonicalize(q, q_ref.pose(), q_ref.scale());
  Vector9d full;
  full.head<6>() = c.xi;
  full.tail<3>() = c.scale - q_ref.scale();
  return lifting_pinv(q.cls()) * full;
}

Quadric transform(const RigidTransform& T_world_sensor, const Quadric& q) {
  return make_like(q, T_world_sensor.inverse() * q.pose(), q.scale());
}

namespace {

// Nearest point on the double cone z = +/- slope * sqrt(x^2 + y^2), worked in
// the (radial, axial) half-plane.
Eigen::Vector2d project_cone_profile(double rho, double z, double slope) {
  Eigen::Vector2d best = Eigen::Vector2d::Zero();  // apex
  double best_d2 = rho * rho + z * z;
  for (const double sgn : {+1.0, -1.0}) {
    const Eigen::Vector2d dir = Eigen::Vector2d(1.0, sgn * slope).normalized();
    const double s = rho * dir.x() + z * dir.y();
    if (s <= 0.0) continue;  // projects behind the apex on this nappe
    const Eigen::Vector2d cand = s * dir;
    const double d2 = (Eigen::Vector2d(rho, z) - cand).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = cand;
    }
  }
  return best;
}

Eigen::Vector3d project_general(const Quadric& q, const Eigen::Vector3d& p) {
  const Eigen::Matrix4d qm = to_matrix(q);
  const Eigen::Matrix3d a = qm.topLeftCorner<3, 3>();
  const Eigen::Vector3d b = qm.topRightCorner<3, 1>();
  const double c = qm(3, 3);
  auto value = [&](const Eigen::Vector3d& x) { return x.dot(a * x) + 2.0 * b.dot(x) + c; };
  auto half_grad = [&](const Eigen::Vector3d& x) { return Eigen::Vector3d(a * x + b); };

  // Initial guess: walk to the surface along the gradient ray (the restriction
  // of the quadric to a line is a scalar quadratic, solvable in closed form).
  Eigen::Vector3d x = p;
  {
    const Eigen::Vector3d d = half_grad(p);
    const double qa = d.dot(a * d);
    const double qb = 2.0 * d.dot(half_grad(p));
    const double qc = value(p);
    double t = 0.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (std::abs(qa) < 1e-14) {
      if (std::abs(qb) > 1e-14) t = -qc / qb;
    } else if (disc >= 0.0) {
      const double r1 = (-qb + std::sqrt(disc)) / (2.0 * qa);
      const double r2 = (-qb - std::sqrt(disc)) / (2.0 * qa);
      t = std::abs(r1) < std::abs(r2) ? r1 : r2;
    }
    x = p + t * d;
  }

  double lambda;
  {
    const Eigen::Vector3d h = half_grad(x);
    const double hh = h.squaredNorm();
    if (hh < 1e-18) throw std::domain_error("projection singular: vanishing quadric gradient");
    lambda = -(x - p).dot(h) / hh;
  }

  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::Vector3d h = half_grad(x);
    const double f = value(x);
    const Eigen::Vector3d station = x - p + lambda * h;
    if (std::abs(f) < 1e-10 && station.cwiseAbs().maxCoeff() < 1e-9) return x;

    Eigen::Matrix4d jac;
    jac.topLeftCorner<3, 3>() = Eigen::Matrix3d::Identity() + lambda * a;
    jac.topRightCorner<3, 1>() = h;
    jac.bottomLeftCorner<1, 3>() = 2.0 * h.transpose();
    jac(3, 3) = 0.0;
    Eigen::Vector4d rhs;
    rhs << station, f;
    const Eigen::Vector4d step = jac.fullPivLu().solve(rhs);
    x -= step.head<3>();
    lambda -= step(3);
  }
  throw std::runtime_error("projection Newton did not converge; constraint residual " +
                           std::to_string(value(x)));
}

}  // namespace

Eigen::Vector3d project_point(const Quadric& q, const Eigen::Vector3d& p) {
  if (q.cls() == QuadricClass::General) return project_general(q, p);

  const Eigen::Vector3d u = q.pose().inverse() * p;
  Eigen::Vector3d v;
  switch (q.cls()) {
    case QuadricClass::Plane:
      v = Eigen::Vector3d(0.0, u.y(), u.z());
      break;
    case QuadricClass::Sphere: {
      const double n = u.norm();
      if (n < 1e-12) throw std::domain_error("projection singular: sphere centre");
      v = u * (1.0 / q.scale().x() / n);
      break;
    }
    case QuadricClass::CircularCylinder: {
      const double rho = std::hypot(u.x(), u.y());
      if (rho < 1e-12) throw std::domain_error("projection singular: cylinder axis");
      const double r = 1.0 / q.scale().x();
      v = Eigen::Vector3d(u.x() * r / rho, u.y() * r / rho, u.z());
      break;
    }
    case QuadricClass::CircularCone: {
      const double rho = std::hypot(u.x(), u.y());
      if (rho < 1e-12) {
        if (std::abs(u.z()) < 1e-12) return q.pose() * Eigen::Vector3d::Zero();  // apex
        throw std::domain_error("projection singular: cone axis");
      }
      const Eigen::Vector2d prof = project_cone_profile(rho, u.z(), q.scale().x());
      v = Eigen::Vector3d(u.x() * prof.x() / rho, u.y() * prof.x() / rho, prof.y());
      break;
    }
    default:
      throw std::logic_error("unreachable");
  }
  return q.pose() * v;
}

}  // namespace qslam
