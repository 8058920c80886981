#include "qslam/perception/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace qslam::perception {

namespace {

constexpr double kParallelTol = 5e-3;

struct Candidate {
  QuadricClass cls = QuadricClass::Plane;
  PrimitiveParams params;
  int min_sample = 1;
  double est_inliers = 0.0;
};

int min_sample_size(QuadricClass cls) {
  switch (cls) {
    case QuadricClass::Plane: return 1;
    case QuadricClass::Sphere: return 2;
    case QuadricClass::CircularCylinder: return 2;
    case QuadricClass::CircularCone: return 3;
    default: return 3;
  }
}

std::optional<PlaneParams> fit_plane(const Eigen::Vector3d& p, const Eigen::Vector3d& n) {
  PlaneParams out;
  out.normal = n;
  out.offset = n.dot(p);
  return out;
}

std::optional<SphereParams> fit_sphere(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1,
                                       const Eigen::Vector3d& p2, const Eigen::Vector3d& n2) {
  if (n1.cross(n2).norm() < kParallelTol) return std::nullopt;
  // Closest points of the two normal lines p_i + t_i n_i.
  const Eigen::Vector3d d = p2 - p1;
  const double a = n1.dot(n2);
  const double det = 1.0 - a * a;
  const double t1 = (d.dot(n1) - a * d.dot(n2)) / det;
  const double t2 = (a * d.dot(n1) - d.dot(n2)) / det;
  SphereParams out;
  out.centre = 0.5 * ((p1 + t1 * n1) + (p2 + t2 * n2));
  const double r1 = (out.centre - p1).norm();
  const double r2 = (out.centre - p2).norm();
  out.radius = 0.5 * (r1 + r2);
  if (!(out.radius > 1e-3 && out.radius < 50.0)) return std::nullopt;
  if (std::abs(r1 - r2) > 0.2 * out.radius + 0.02) return std::nullopt;
  return out;
}

std::optional<CylinderParams> fit_cylinder(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1,
                                           const Eigen::Vector3d& p2, const Eigen::Vector3d& n2) {
  Eigen::Vector3d axis = n1.cross(n2);
  if (axis.norm() < kParallelTol) return std::nullopt;
  axis.normalize();

  // Intersect the two normal lines in the plane orthogonal to the axis.
  const Eigen::Vector3d e1 = (std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX())
                                 .cross(axis)
                                 .normalized();
  const Eigen::Vector3d e2 = axis.cross(e1);
  auto to2d = [&](const Eigen::Vector3d& v) { return Eigen::Vector2d(e1.dot(v), e2.dot(v)); };
  const Eigen::Vector2d q1 = to2d(p1), q2 = to2d(p2);
  const Eigen::Vector2d d1 = to2d(n1), d2 = to2d(n2);
  const double det = d1.x() * d2.y() - d1.y() * d2.x();
  if (std::abs(det) < 1e-8) return std::nullopt;
  const Eigen::Vector2d rhs = q2 - q1;
  const double t1 = (rhs.x() * d2.y() - rhs.y() * d2.x()) / det;
  const Eigen::Vector2d c2 = q1 + t1 * d1;

  CylinderParams out;
  out.axis = axis;
  out.axis_point = c2.x() * e1 + c2.y() * e2;
  const double r1 = (q1 - c2).norm();
  const double r2 = (q2 - c2).norm();
  out.radius = 0.5 * (r1 + r2);
  if (!(out.radius > 1e-3 && out.radius < 10.0)) return std::nullopt;
  if (std::abs(r1 - r2) > 0.2 * out.radius + 0.02) return std::nullopt;
  return out;
}

std::optional<ConeParams> fit_cone(const Eigen::Vector3d& p1, const Eigen::Vector3d& n1,
                                   const Eigen::Vector3d& p2, const Eigen::Vector3d& n2,
                                   const Eigen::Vector3d& p3, const Eigen::Vector3d& n3) {
  Eigen::Matrix3d a;
  a.row(0) = n1.transpose();
  a.row(1) = n2.transpose();
  a.row(2) = n3.transpose();
  const Eigen::Vector3d rhs(n1.dot(p1), n2.dot(p2), n3.dot(p3));
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Vector3d apex = lu.solve(rhs);

  Eigen::Vector3d m1 = p1 - apex, m2 = p2 - apex, m3 = p3 - apex;
  if (m1.norm() < 1e-4 || m2.norm() < 1e-4 || m3.norm() < 1e-4) return std::nullopt;
  m1.normalize();
  m2.normalize();
  m3.normalize();
  Eigen::Vector3d axis = (m2 - m1).cross(m3 - m1);
  if (axis.norm() < 1e-6) return std::nullopt;
  axis.normalize();
  if (axis.dot(m1 + m2 + m3) < 0.0) axis = -axis;

  ConeParams out;
  out.apex = apex;
  out.axis = axis;
  const double c = (axis.dot(m1) + axis.dot(m2) + axis.dot(m3)) / 3.0;
  out.half_angle = std::acos(std::clamp(c, -1.0, 1.0));
  if (!(out.half_angle > 0.02 && out.half_angle < M_PI / 2.0 - 0.02)) return std::nullopt;
  return out;
}

struct ConeFrame {
  double rho = 0.0, z = 0.0;
  Eigen::Vector3d radial = Eigen::Vector3d::Zero();
};

ConeFrame cone_frame(const ConeParams& cone, const Eigen::Vector3d& p) {
  ConeFrame f;
  const Eigen::Vector3d v = p - cone.apex;
  f.z = v.dot(cone.axis);
  const Eigen::Vector3d rvec = v - f.z * cone.axis;
  f.rho = rvec.norm();
  if (f.rho > 1e-12) f.radial = rvec / f.rho;
  return f;
}

}  // namespace

double primitive_distance(const PrimitiveParams& prim, const Eigen::Vector3d& p) {
  if (const auto* plane = std::get_if<PlaneParams>(&prim)) {
    return std::abs(plane->normal.dot(p) - plane->offset);
  }
  if (const auto* sphere = std::get_if<SphereParams>(&prim)) {
    return std::abs((p - sphere->centre).norm() - sphere->radius);
  }
  if (const auto* cyl = std::get_if<CylinderParams>(&prim)) {
    const Eigen::Vector3d v = p - cyl->axis_point;
    return std::abs((v - v.dot(cyl->axis) * cyl->axis).norm() - cyl->radius);
  }
  const auto& cone = std::get<ConeParams>(prim);
  const ConeFrame f = cone_frame(cone, p);
  const double st = std::sin(cone.half_angle);
  const double ct = std::cos(cone.half_angle);
  // Distance to the nearer nappe in the (radial, axial) half-plane, clamped
  // to the apex when the foot falls behind it.
  double best = std::hypot(f.rho, f.z);
  for (const double sgn : {+1.0, -1.0}) {
    if (f.rho * st + sgn * f.z * ct <= 0.0) continue;
    best = std::min(best, std::abs(f.rho * ct - sgn * f.z * st));
  }
  return best;
}

bool primitive_inlier(const PrimitiveParams& prim, const Eigen::Vector3d& p, const Eigen::Vector3d& n,
                      double epsilon, double cos_normal_threshold) {
  if (primitive_distance(prim, p) > epsilon) return false;
  Eigen::Vector3d expected;
  if (const auto* plane = std::get_if<PlaneParams>(&prim)) {
    expected = plane->normal;
  } else if (const auto* sphere = std::get_if<SphereParams>(&prim)) {
    const Eigen::Vector3d v = p - sphere->centre;
    const double len = v.norm();
    if (len < 1e-9) return false;
    expected = v / len;
  } else if (const auto* cyl = std::get_if<CylinderParams>(&prim)) {
    const Eigen::Vector3d v = p - cyl->axis_point;
    const Eigen::Vector3d r = v - v.dot(cyl->axis) * cyl->axis;
    const double len = r.norm();
    if (len < 1e-9) return false;
    expected = r / len;
  } else {
    const auto& cone = std::get<ConeParams>(prim);
    const ConeFrame f = cone_frame(cone, p);
    if (f.rho < 1e-9) return false;
    const double sgn = f.z >= 0.0 ? 1.0 : -1.0;
    expected = std::cos(cone.half_angle) * f.radial - sgn * std::sin(cone.half_angle) * cone.axis;
  }
  return std::abs(expected.dot(n)) >= cos_normal_threshold;
}

namespace {

// ---- least-squares refinement on the extracted inliers ----

PlaneParams refine_plane(const std::vector<Eigen::Vector3d>& pts, const PlaneParams& init) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
  eig.computeDirect(cov);
  Eigen::Vector3d n = eig.eigenvectors().col(0).normalized();
  if (n.dot(init.normal) < 0.0) n = -n;
  return {n, n.dot(mean)};
}

SphereParams refine_sphere(const std::vector<Eigen::Vector3d>& pts, SphereParams s) {
  for (int iter = 0; iter < 12; ++iter) {
    Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
    Eigen::Vector4d g = Eigen::Vector4d::Zero();
    for (const auto& p : pts) {
      const Eigen::Vector3d v = p - s.centre;
      const double len = v.norm();
      if (len < 1e-9) continue;
      Eigen::Vector4d jac;
      jac.head<3>() = -v / len;
      jac(3) = -1.0;
      const double r = len - s.radius;
      h += jac * jac.transpose();
      g += jac * r;
    }
    const Eigen::Vector4d step = h.ldlt().solve(-g);
    if (!step.allFinite()) break;
    s.centre += step.head<3>();
    s.radius += step(3);
    if (step.norm() < 1e-12) break;
  }
  return s;
}

// Generic numeric Gauss-Newton over a small parameter vector.
template <typename Model>
Eigen::VectorXd refine_numeric(const std::vector<Eigen::Vector3d>& pts, Eigen::VectorXd x,
                               const Model& distance_at) {
  const int n = static_cast<int>(x.size());
  for (int iter = 0; iter < 12; ++iter) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (const auto& p : pts) {
      const double r0 = distance_at(x, p);
      Eigen::VectorXd jac(n);
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x;
        const double step = 1e-6;
        xp(i) += step;
        jac(i) = (distance_at(xp, p) - r0) / step;
      }
      h += jac * jac.transpose();
      g += jac * r0;
    }
    h.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = h.ldlt().solve(-g);
    if (!step.allFinite()) break;
    x += step;
    if (step.norm() < 1e-12) break;
  }
  return x;
}

CylinderParams refine_cylinder(const std::vector<Eigen::Vector3d>& pts, const CylinderParams& init) {
  // Parameters: axis point in the plane orthogonal to the initial axis (2),
  // axis tangent coordinates (2), radius (1).
  const Eigen::Vector3d a0 = init.axis;
  const Eigen::Vector3d e1 =
      (std::abs(a0.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX()).cross(a0).normalized();
  const Eigen::Vector3d e2 = a0.cross(e1);
  const Eigen::Vector3d c0 = init.axis_point - init.axis_point.dot(a0) * a0;

  auto unpack = [&](const Eigen::VectorXd& x) {
    CylinderParams c;
    c.axis = (a0 + x(2) * e1 + x(3) * e2).normalized();
    c.axis_point = c0 + x(0) * e1 + x(1) * e2;
    c.radius = x(4);
    return c;
  };
  auto dist = [&](const Eigen::VectorXd& x, const Eigen::Vector3d& p) {
    const CylinderParams c = unpack(x);
    const Eigen::Vector3d v = p - c.axis_point;
    return (v - v.dot(c.axis) * c.axis).norm() - c.radius;
  };
  Eigen::VectorXd x(5);
  x << 0.0, 0.0, 0.0, 0.0, init.radius;
  x = refine_numeric(pts, x, dist);
  CylinderParams out = unpack(x);
  if (!(out.radius > 1e-4)) return init;

  // Anchor the axis point at the projection of the inlier centroid.
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  out.axis_point += (mean - out.axis_point).dot(out.axis) * out.axis;
  return out;
}

ConeParams refine_cone(const std::vector<Eigen::Vector3d>& pts, const ConeParams& init) {
  const Eigen::Vector3d a0 = init.axis;
  const Eigen::Vector3d e1 =
      (std::abs(a0.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX()).cross(a0).normalized();
  const Eigen::Vector3d e2 = a0.cross(e1);

  auto unpack = [&](const Eigen::VectorXd& x) {
    ConeParams c;
    c.apex = init.apex + x.head<3>();
    c.axis = (a0 + x(3) * e1 + x(4) * e2).normalized();
    c.half_angle = x(5);
    return c;
  };
  auto dist = [&](const Eigen::VectorXd& x, const Eigen::Vector3d& p) {
    const ConeParams c = unpack(x);
    if (!(c.half_angle > 0.01 && c.half_angle < M_PI / 2.0 - 0.01)) return 1e3;
    return primitive_distance(PrimitiveParams(c), p);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
  x(5) = init.half_angle;
  x = refine_numeric(pts, x, dist);
  const ConeParams out = unpack(x);
  if (!(out.half_angle > 0.01 && out.half_angle < M_PI / 2.0 - 0.01)) return init;
  return out;
}

PrimitiveParams refine_primitive(const ShapeDetection& det, const OrganizedCloud& cloud,
                                 int max_points) {
  std::vector<Eigen::Vector3d> pts;
  const size_t stride = std::max<size_t>(1, det.inliers.size() / static_cast<size_t>(max_points));
  for (size_t i = 0; i < det.inliers.size(); i += stride) {
    pts.push_back(cloud.point(static_cast<size_t>(det.inliers[i])));
  }
  switch (det.cls) {
    case QuadricClass::Plane: return refine_plane(pts, std::get<PlaneParams>(det.primitive));
    case QuadricClass::Sphere: return refine_sphere(pts, std::get<SphereParams>(det.primitive));
    case QuadricClass::CircularCylinder:
      return refine_cylinder(pts, std::get<CylinderParams>(det.primitive));
    case QuadricClass::CircularCone: return refine_cone(pts, std::get<ConeParams>(det.primitive));
    default: return det.primitive;
  }
}

// Largest 8-connected component of the inlier set on the pixel grid.
std::vector<int> largest_component(const std::vector<int>& inliers, int width, int height) {
  if (inliers.empty()) return {};
  std::vector<int> label(static_cast<size_t>(width) * height, -1);
  for (int idx : inliers) label[static_cast<size_t>(idx)] = 0;

  std::vector<int> best;
  std::vector<int> component;
  std::vector<int> stack;
  for (int seed : inliers) {
    if (label[static_cast<size_t>(seed)] != 0) continue;
    component.clear();
    stack.push_back(seed);
    label[static_cast<size_t>(seed)] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      component.push_back(idx);
      const int u = idx % width;
      const int v = idx / width;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          if (du == 0 && dv == 0) continue;
          const int uu = u + du, vv = v + dv;
          if (uu < 0 || uu >= width || vv < 0 || vv >= height) continue;
          const int nidx = vv * width + uu;
          if (label[static_cast<size_t>(nidx)] == 0) {
            label[static_cast<size_t>(nidx)] = 1;
            stack.push_back(nidx);
          }
        }
      }
    }
    if (component.size() > best.size()) best.swap(component);
  }
  std::sort(best.begin(), best.end());
  return best;
}

}  // namespace

std::vector<ShapeDetection> detect_shapes(const OrganizedCloud& cloud, const RansacParams& params) {
  if (cloud.size() == 0 || cloud.valid_count() == 0) {
    throw std::invalid_argument("detect_shapes: empty cloud");
  }
  const double cos_thresh = std::cos(params.normal_threshold_deg * M_PI / 180.0);
  std::mt19937_64 rng(params.seed);

  std::vector<uint8_t> removed(cloud.size(), 0);
  std::vector<ShapeDetection> detections;

  auto full_inliers = [&](const PrimitiveParams& prim) {
    std::vector<int> out;
    for (size_t i = 0; i < cloud.size(); ++i) {
      if (removed[i] || !cloud.valid(i) || !cloud.has_normal(i)) continue;
      if (primitive_inlier(prim, cloud.point(i), cloud.normal(i), params.epsilon, cos_thresh)) {
        out.push_back(static_cast<int>(i));
      }
    }
    return out;
  };

  while (true) {
    std::vector<int> remaining;
    for (size_t i = 0; i < cloud.size(); ++i) {
      if (!removed[i] && cloud.valid(i) && cloud.has_normal(i)) remaining.push_back(static_cast<int>(i));
    }
    const double n_total = static_cast<double>(remaining.size());
    if (remaining.size() < static_cast<size_t>(params.min_inliers)) break;

    // Deterministic scoring subset.
    const size_t sub_stride = std::max<size_t>(1, remaining.size() / 8192);
    std::vector<int> subset;
    for (size_t i = 0; i < remaining.size(); i += sub_stride) subset.push_back(remaining[i]);
    const double subset_factor = n_total / static_cast<double>(subset.size());

    auto score_subset = [&](const PrimitiveParams& prim) {
      int count = 0;
      for (int idx : subset) {
        if (primitive_inlier(prim, cloud.point(static_cast<size_t>(idx)),
                             cloud.normal(static_cast<size_t>(idx)), params.epsilon, cos_thresh)) {
          ++count;
        }
      }
      return count * subset_factor;
    };

    std::uniform_int_distribution<size_t> pick(0, remaining.size() - 1);
    auto sample_near = [&](int around) -> int {
      const int u0 = around % cloud.width();
      const int v0 = around / cloud.width();
      std::uniform_int_distribution<int> off(-params.sample_window_px, params.sample_window_px);
      for (int attempt = 0; attempt < 16; ++attempt) {
        const int u = u0 + off(rng);
        const int v = v0 + off(rng);
        if (u < 0 || u >= cloud.width() || v < 0 || v >= cloud.height()) continue;
        const int idx = v * cloud.width() + u;
        if (idx == around || removed[static_cast<size_t>(idx)]) continue;
        if (!cloud.valid(static_cast<size_t>(idx)) || !cloud.has_normal(static_cast<size_t>(idx))) continue;
        return idx;
      }
      return remaining[pick(rng)];
    };

    bool have_best = false;
    Candidate best;
    int samples = 0;
    bool extracted = false;

    auto missed_probability = [&](double est, int k) {
      const double frac = std::clamp(est / n_total, 0.0, 1.0);
      return std::pow(1.0 - std::pow(frac, k), samples);
    };

    while (samples < params.max_samples) {
      for (int b = 0; b < params.batch_size; ++b, ++samples) {
        const int i0 = remaining[pick(rng)];
        const int i1 = sample_near(i0);
        const int i2 = sample_near(i0);
        const auto p0 = cloud.point(static_cast<size_t>(i0));
        const auto n0 = cloud.normal(static_cast<size_t>(i0));
        const auto p1 = cloud.point(static_cast<size_t>(i1));
        const auto n1 = cloud.normal(static_cast<size_t>(i1));
        const auto p2 = cloud.point(static_cast<size_t>(i2));
        const auto n2 = cloud.normal(static_cast<size_t>(i2));

        auto consider = [&](QuadricClass cls, const PrimitiveParams& prim) {
          const double est = score_subset(prim);
          if (!have_best || est > best.est_inliers) {
            have_best = true;
            best = {cls, prim, min_sample_size(cls), est};
          }
        };
        if (const auto plane = fit_plane(p0, n0)) consider(QuadricClass::Plane, *plane);
        if (i1 != i0) {
          if (const auto sphere = fit_sphere(p0, n0, p1, n1)) consider(QuadricClass::Sphere, *sphere);
          if (const auto cyl = fit_cylinder(p0, n0, p1, n1)) {
            consider(QuadricClass::CircularCylinder, *cyl);
          }
          if (i2 != i0 && i2 != i1) {
            if (const auto cone = fit_cone(p0, n0, p1, n1, p2, n2)) {
              consider(QuadricClass::CircularCone, *cone);
            }
          }
        }
      }

      if (have_best && best.est_inliers >= params.min_inliers &&
          missed_probability(best.est_inliers, best.min_sample) < params.probability) {
        ShapeDetection det;
        det.cls = best.cls;
        det.primitive = best.params;
        det.inliers = largest_component(full_inliers(best.params), cloud.width(), cloud.height());
        if (det.inliers.size() < static_cast<size_t>(params.min_inliers)) {
          have_best = false;  // connectivity rejected this candidate; keep searching
          continue;
        }
        det.primitive = refine_primitive(det, cloud, params.refine_max_points);
        det.inliers = largest_component(full_inliers(det.primitive), cloud.width(), cloud.height());
        if (det.inliers.size() < static_cast<size_t>(params.min_inliers)) {
          have_best = false;
          continue;
        }
        det.score = static_cast<int>(det.inliers.size());
        for (int idx : det.inliers) removed[static_cast<size_t>(idx)] = 1;
        detections.push_back(std::move(det));
        extracted = true;
        break;
      }

      // No shape of even minimal size is likely hiding once this drops low.
      if (missed_probability(params.min_inliers, 3) < params.probability) break;
    }

    if (!extracted) break;
  }
  return detections;
}

Quadric primitive_to_quadric(const ShapeDetection& det) {
  switch (det.cls) {
    case QuadricClass::Plane: {
      const auto& p = std::get<PlaneParams>(det.primitive);
      return Quadric::plane(p.normal, p.normal * p.offset);
    }
    case QuadricClass::Sphere: {
      const auto& s = std::get<SphereParams>(det.primitive);
      return Quadric::sphere(s.centre, s.radius);
    }
    case QuadricClass::CircularCylinder: {
      const auto& c = std::get<CylinderParams>(det.primitive);
      return Quadric::cylinder(c.axis_point, c.axis, c.radius);
    }
    case QuadricClass::CircularCone: {
      const auto& c = std::get<ConeParams>(det.primitive);
      return Quadric::cone(c.apex, c.axis, c.half_angle);
    }
    default:
      throw std::invalid_argument("unsupported detection class");
  }
}

}  // namespace qslam::perception
