#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qslam/core/quadric.hpp"
#include "qslam/core/text_io.hpp"

using namespace qslam;

namespace {

const QuadricClass kConstrained[] = {QuadricClass::Plane, QuadricClass::Sphere,
                                     QuadricClass::CircularCylinder, QuadricClass::CircularCone};
const QuadricClass kAll[] = {QuadricClass::Plane, QuadricClass::Sphere,
                             QuadricClass::CircularCylinder, QuadricClass::CircularCone,
                             QuadricClass::General};

Eigen::VectorXd random_tangent(int n, double max_norm, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  const double norm = v.norm();
  if (norm > max_norm) v *= max_norm / norm * 0.99;
  return v;
}

}  // namespace

TEST_CASE("class signatures match the published table") {
  CHECK(class_signature(QuadricClass::Sphere) == Signature{{+1, +1, +1, -1}});
  CHECK(class_signature(QuadricClass::Plane) == Signature{{+1, 0, 0, 0}});
  CHECK(class_signature(QuadricClass::CircularCylinder) == Signature{{+1, +1, 0, -1}});
  CHECK(class_signature(QuadricClass::CircularCone) == Signature{{+1, +1, -1, 0}});
  CHECK_THROWS_WITH_AS(class_signature(QuadricClass::General),
                       doctest::Contains("signature must be supplied"), std::invalid_argument);
}

TEST_CASE("class dof") {
  CHECK(dof(QuadricClass::General) == 9);
  CHECK(dof(QuadricClass::Plane) == 3);
  CHECK(dof(QuadricClass::Sphere) == 4);
  CHECK(dof(QuadricClass::CircularCylinder) == 5);
  CHECK(dof(QuadricClass::CircularCone) == 6);
}

TEST_CASE("canonical matrices") {
  CHECK(canonical_matrix(Signature{{+1, +1, +1, -1}}).diagonal().transpose() ==
        Eigen::RowVector4d(1, 1, 1, -1));
  CHECK(canonical_matrix(Signature{{+1, 0, 0, 0}}).diagonal().transpose() ==
        Eigen::RowVector4d(1, 0, 0, 0));
  CHECK(canonical_matrix(Signature{{+1, +1, -1, 0}}).diagonal().transpose() ==
        Eigen::RowVector4d(1, 1, -1, 0));
  CHECK_THROWS_AS(canonical_matrix(Signature{{0, +1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("to_matrix of the canonical unit sphere") {
  const Quadric q(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  const Eigen::Matrix4d m = to_matrix(q);
  CHECK((m - Eigen::Vector4d(1, 1, 1, -1).asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("to_matrix of the axis-aligned ellipsoid row of the canonical table") {
  const Quadric q(Signature{{+1, +1, +1, -1}}, RigidTransform(), Eigen::Vector3d(1.0, 0.5, 2.0));
  // x^2 + y^2/4 + 4 z^2 = 1, normalized so the largest entry is 1.
  for (const Eigen::Vector3d& p :
       {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 2, 0), Eigen::Vector3d(0, 0, 0.5)}) {
    CHECK(std::abs(evaluate(q, p)) < 1e-12);
  }
  CHECK(evaluate(q, {0, 0, 0}) < 0.0);
}

TEST_CASE("to_matrix of a posed ellipsoid via surface sampling") {
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, 0, 1, 0, -1, 0;
  const RigidTransform pose(r, Eigen::Vector3d(0, 3, 0));
  const Quadric q(Signature{{+1, +1, +1, -1}}, pose, Eigen::Vector3d(1.0, 0.5, 2.0));
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 64; ++i) {
    Eigen::Vector3d d(n(rng), n(rng), n(rng));
    d.normalize();
    const Eigen::Vector3d local(d.x() / 1.0, d.y() / 0.5, d.z() / 2.0);
    CHECK(std::abs(evaluate(q, pose * local)) < 1e-12);
  }
}

TEST_CASE("sphere with centre and radius from the spec example") {
  const Quadric q = Quadric::sphere({1, 2, 3}, 2.0);
  CHECK(q.scale().isApprox(Eigen::Vector3d(0.5, 0.5, 0.5)));
  CHECK(std::abs(evaluate(q, {3, 2, 3})) < 1e-14);
}

TEST_CASE("evaluate on the canonical plane and sphere") {
  const Quadric sphere(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK(evaluate(sphere, {1, 0, 0}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(evaluate(sphere, {0, 0, 0}) == doctest::Approx(-1.0));
  const Quadric plane(QuadricClass::Plane, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK(evaluate(plane, {2, 5, -1}) == doctest::Approx(4.0));
}

TEST_CASE("to_matrix output is symmetric and deterministically normalized") {
  std::mt19937_64 rng(29);
  for (QuadricClass cls : kAll) {
    for (int i = 0; i < 10; ++i) {
      const Eigen::Matrix4d m = to_matrix(test::random_quadric(cls, rng));
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(m.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
      bool found_first = false;
      for (int a = 0; a < 4 && !found_first; ++a) {
        for (int b = 0; b < 4 && !found_first; ++b) {
          if (std::abs(m(a, b)) > 1e-12) {
            CHECK(m(a, b) > 0.0);
            found_first = true;
          }
        }
      }
    }
  }
}

TEST_CASE("lifting matrices select the published parameterizations") {
  const Eigen::MatrixXd sphere = lifting_matrix(QuadricClass::Sphere);
  REQUIRE(sphere.cols() == 4);
  // Position block matches the sphere chain matrix [I3; 03].
  CHECK((sphere.topLeftCorner<3, 3>() - Eigen::Matrix3d::Identity()).norm() == 0.0);
  CHECK(sphere.block<3, 3>(3, 0).norm() == 0.0);
  CHECK(sphere.col(3).tail<3>().isApprox(Eigen::Vector3d::Ones()));

  const Eigen::MatrixXd plane = lifting_matrix(QuadricClass::Plane);
  REQUIRE(plane.cols() == 3);
  CHECK(plane(0, 0) == 1.0);
  CHECK(plane(4, 1) == 1.0);
  CHECK(plane(5, 2) == 1.0);
  CHECK(plane.sum() == 3.0);

  CHECK(lifting_matrix(QuadricClass::General).isIdentity());

  const Eigen::MatrixXd cyl = lifting_matrix(QuadricClass::CircularCylinder);
  CHECK(cyl.col(4).tail<3>().isApprox(Eigen::Vector3d(1, 1, 0)));
  const Eigen::MatrixXd cone = lifting_matrix(QuadricClass::CircularCone);
  CHECK(cone.col(5).tail<3>().isApprox(Eigen::Vector3d(1, 1, 0)));

  for (QuadricClass cls : kAll) {
    const Eigen::MatrixXd l = lifting_matrix(cls);
    const Eigen::MatrixXd p = lifting_pinv(cls);
    CHECK((p * l - Eigen::MatrixXd::Identity(l.cols(), l.cols())).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("boxplus with a zero tangent is exact") {
  std::mt19937_64 rng(31);
  for (QuadricClass cls : kAll) {
    const Quadric q = test::random_quadric(cls, rng);
    const Quadric r = boxplus(q, Eigen::VectorXd::Zero(q.dof()));
    CHECK((r.pose().rotation() - q.pose().rotation()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.pose().translation() - q.pose().translation()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.scale() == q.scale());
  }
}

TEST_CASE("boxplus applies the additive diagonal scale update") {
  const Quadric q(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(4);
  delta(3) = 0.5;
  const Quadric r = boxplus(q, delta);
  CHECK(r.scale().isApprox(Eigen::Vector3d(1.5, 1.5, 1.5)));
  CHECK((r.pose().translation() - q.pose().translation()).norm() == 0.0);
}

TEST_CASE("boxplus rejects scale leaving the positive domain") {
  const Quadric q(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(4);
  delta(3) = -1.0;
  CHECK_THROWS_WITH_AS(boxplus(q, delta), doctest::Contains("scale left positive domain"),
                       std::domain_error);
}

TEST_CASE("boxminus of a quadric with itself vanishes") {
  std::mt19937_64 rng(37);
  for (QuadricClass cls : kAll) {
    const Quadric q = test::random_quadric(cls, rng);
    CHECK(boxminus(q, q).norm() < 1e-12);
  }
}

TEST_CASE("boxminus recovers the sphere translation difference") {
  const Quadric a = Quadric::sphere({1, 2, 3}, 1.0);
  const Quadric b = Quadric::sphere({1, 2, 3.5}, 1.0);
  const Eigen::VectorXd d = boxminus(a, b);
  CHECK((d - (Eigen::VectorXd(4) << 0, 0, -0.5, 0).finished()).cwiseAbs().maxCoeff() < 1e-12);
  // Convention check: boxplus(reference, difference) reproduces the operand.
  const Quadric back = boxplus(b, d);
  CHECK((back.pose().translation() - a.pose().translation()).norm() < 1e-12);
}

TEST_CASE("boxplus/boxminus round-trip across all classes") {
  std::mt19937_64 rng(41);
  for (QuadricClass cls : kAll) {
    for (int i = 0; i < 200; ++i) {
      const Quadric q = test::random_quadric(cls, rng);
      const Eigen::VectorXd delta = random_tangent(q.dof(), 0.5, rng);
      const Quadric moved = boxplus(q, delta);
      const Eigen::VectorXd recovered = boxminus(moved, q);
      CHECK((recovered - delta).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("boxminus rejects class mismatch") {
  const Quadric sphere = Quadric::sphere({0, 0, 0}, 1.0);
  const Quadric plane(QuadricClass::Plane, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK_THROWS_AS(boxminus(sphere, plane), std::invalid_argument);
}

TEST_CASE("ellipsoid flipped about its own axis is the same surface and has zero difference") {
  std::mt19937_64 rng(43);
  const Quadric q = test::random_quadric(QuadricClass::General, rng);
  const Eigen::Matrix3d flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  const Quadric flipped(q.signature(),
                        RigidTransform(q.pose().rotation() * flip, q.pose().translation()),
                        q.scale());
  CHECK((to_matrix(q) - to_matrix(flipped)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(boxminus(flipped, q).norm() < 1e-9);
}

TEST_CASE("cylinder with reversed axis is the same surface and has zero difference") {
  const Quadric q = Quadric::cylinder({0.5, -0.2, 0.1}, Eigen::Vector3d(0.3, 0.4, 0.9).normalized(),
                                      0.4);
  const Eigen::Matrix3d flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  const Quadric reversed(QuadricClass::CircularCylinder,
                         RigidTransform(q.pose().rotation() * flip, q.pose().translation()),
                         q.scale());
  CHECK((to_matrix(q) - to_matrix(reversed)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(boxminus(reversed, q).norm() < 1e-9);
}

TEST_CASE("plane gauge freedom does not leak into the difference") {
  // Same plane, different in-plane gauge: slide along the surface and spin
  // about the normal.
  const Quadric a = Quadric::plane(Eigen::Vector3d(0.2, -0.4, 0.89).normalized(), {0.3, 0.7, -0.2});
  Vector6d gauge = Vector6d::Zero();
  gauge(1) = 0.4;   // in-plane translation
  gauge(2) = -0.3;  // in-plane translation
  gauge(3) = 0.7;   // spin about the normal
  const Quadric b(QuadricClass::Plane, a.pose() * se3_exp(gauge), a.scale());
  CHECK((to_matrix(a) - to_matrix(b)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(boxminus(b, a).norm() < 1e-9);
}

TEST_CASE("sphere rotation gauge does not leak into the difference") {
  std::mt19937_64 rng(47);
  const Quadric a = Quadric::sphere({0.4, -0.1, 1.2}, 0.8);
  const Quadric b(QuadricClass::Sphere,
                  RigidTransform(test::random_rotation(rng), a.pose().translation()), a.scale());
  CHECK(boxminus(b, a).norm() < 1e-9);
}

TEST_CASE("transform by the identity leaves the quadric unchanged") {
  std::mt19937_64 rng(53);
  const Quadric q = test::random_quadric(QuadricClass::CircularCone, rng);
  const Quadric t = transform(RigidTransform(), q);
  CHECK((t.pose().matrix() - q.pose().matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transform moves a sphere into the sensor frame") {
  const Quadric q = Quadric::sphere({1, 0, 0}, 1.0);
  const RigidTransform sensor(Eigen::Matrix3d::Identity(), {1, 0, 0});
  CHECK(transform(sensor, q).pose().translation().norm() < 1e-15);
}

TEST_CASE("transform preserves the surface under the frame change") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 20; ++i) {
    const Quadric q = test::random_quadric(QuadricClass::General, rng);
    const RigidTransform t = test::random_transform(rng);
    const Quadric moved = transform(t, q);
    for (int k = 0; k < 10; ++k) {
      const Eigen::Vector3d p = test::random_surface_point(q, rng);
      CHECK(std::abs(evaluate(moved, t.inverse() * p)) < 1e-10);
    }
    // Off-surface values agree up to the positive normalization factor.
    const Eigen::Vector3d off = q.pose() * Eigen::Vector3d(0.05, -0.03, 0.08);
    const double v1 = evaluate(q, off);
    const double v2 = evaluate(moved, t.inverse() * off);
    CHECK(v1 * v2 > 0.0);
  }
}

TEST_CASE("project_point closed forms") {
  const Quadric sphere(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK((project_point(sphere, {2, 0, 0}) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-14);

  const Quadric plane(QuadricClass::Plane, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK((project_point(plane, {3, 1, 4}) - Eigen::Vector3d(0, 1, 4)).norm() < 1e-14);

  const Quadric cyl(QuadricClass::CircularCylinder, RigidTransform(), Eigen::Vector3d(1, 1, 1));
  CHECK((project_point(cyl, {2, 0, 5}) - Eigen::Vector3d(1, 0, 5)).norm() < 1e-14);
}

TEST_CASE("projection singularities raise errors") {
  const Quadric sphere(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  CHECK_THROWS_WITH_AS(project_point(sphere, {0, 0, 0}), doctest::Contains("singular"),
                       std::domain_error);
  const Quadric cyl(QuadricClass::CircularCylinder, RigidTransform(), Eigen::Vector3d(1, 1, 1));
  CHECK_THROWS_WITH_AS(project_point(cyl, {0, 0, 3}), doctest::Contains("singular"),
                       std::domain_error);
}

TEST_CASE("project_point lands on the surface and beats random surface samples") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (QuadricClass cls : kAll) {
    for (int i = 0; i < 10; ++i) {
      const Quadric q = test::random_quadric(cls, rng);
      const Eigen::Vector3d p =
          test::random_surface_point(q, rng) + Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.2;
      Eigen::Vector3d proj;
      try {
        proj = project_point(q, p);
      } catch (const std::domain_error&) {
        continue;  // hit a singular locus by chance
      }
      CHECK(std::abs(evaluate(q, proj)) < 1e-8);
      const double d = (proj - p).norm();
      for (int s = 0; s < 100; ++s) {
        CHECK(d <= (test::random_surface_point(q, rng) - p).norm() + 1e-7);
      }
    }
  }
}

TEST_CASE("general-class Newton projection agrees with the sphere closed form") {
  const Quadric as_general(Signature{{+1, +1, +1, -1}},
                           RigidTransform(Eigen::Matrix3d::Identity(), {0.5, -0.3, 1.0}),
                           Eigen::Vector3d(0.8, 0.8, 0.8));
  const Quadric as_sphere = Quadric::sphere({0.5, -0.3, 1.0}, 1.0 / 0.8);
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d p(u(rng), u(rng), u(rng));
    if ((p - Eigen::Vector3d(0.5, -0.3, 1.0)).norm() < 0.1) continue;
    CHECK((project_point(as_general, p) - project_point(as_sphere, p)).norm() < 1e-7);
  }
}

TEST_CASE("surface invariance of the symmetry directions, pointwise") {
  // Directions in the complement of the lifting column space that are true
  // symmetries of the canonical surface must leave evaluate() unchanged to
  // first order at every surface point. The scale-difference complement
  // directions of the tied-scale classes are *constraint* directions, not
  // symmetries; they provably change the surface (checked below).
  std::mt19937_64 rng(71);
  const double step = 1e-6;

  auto derivative = [&](const Quadric& q, const Vector9d& dir, const Eigen::Vector3d& p) {
    return (evaluate(boxplus_full(q, step * dir), p) - evaluate(boxplus_full(q, -step * dir), p)) /
           (2.0 * step);
  };

  auto pose_dir = [](int idx) {
    Vector9d v = Vector9d::Zero();
    v(idx) = 1.0;
    return v;
  };
  auto scale_dir = [](const Eigen::Vector3d& s) {
    Vector9d v = Vector9d::Zero();
    v.tail<3>() = s;
    return v;
  };

  for (QuadricClass cls : kConstrained) {
    const Quadric q = test::random_quadric(cls, rng);
    std::vector<Vector9d> symmetric;
    switch (cls) {
      case QuadricClass::Plane:
        symmetric = {pose_dir(1), pose_dir(2), pose_dir(3), scale_dir({1, 0, 0}),
                     scale_dir({0, 1, 0}), scale_dir({0, 0, 1})};
        break;
      case QuadricClass::Sphere:
        symmetric = {pose_dir(3), pose_dir(4), pose_dir(5)};
        break;
      case QuadricClass::CircularCylinder:
        symmetric = {pose_dir(2), pose_dir(5), scale_dir({0, 0, 1})};
        break;
      case QuadricClass::CircularCone:
        // Spin, plus the projective direction scaling all three entries.
        symmetric = {pose_dir(5), scale_dir(q.scale())};
        break;
      default:
        break;
    }
    for (const auto& dir : symmetric) {
      for (int s = 0; s < 25; ++s) {
        const Eigen::Vector3d p = test::random_surface_point(q, rng);
        CHECK(std::abs(derivative(q, dir, p)) < 1e-7);
      }
    }

    // Included (estimable) directions must move the surface somewhere. The
    // doubled plane's algebraic form is a perfect square, so its first
    // derivative vanishes identically on the surface; probe its second
    // derivative instead.
    const Eigen::MatrixXd lift = lifting_matrix(cls);
    const double t2 = 1e-4;
    auto second_derivative = [&](const Quadric& qq, const Vector9d& dir, const Eigen::Vector3d& p) {
      return (evaluate(boxplus_full(qq, t2 * dir), p) + evaluate(boxplus_full(qq, -t2 * dir), p) -
              2.0 * evaluate(qq, p)) /
             (t2 * t2);
    };
    for (int c = 0; c < lift.cols(); ++c) {
      double max_deriv = 0.0;
      for (int s = 0; s < 25; ++s) {
        const Eigen::Vector3d p = test::random_surface_point(q, rng);
        const double d = cls == QuadricClass::Plane ? second_derivative(q, lift.col(c), p)
                                                    : derivative(q, lift.col(c), p);
        max_deriv = std::max(max_deriv, std::abs(d));
      }
      CHECK(max_deriv > 1e-4);
    }
  }

  // The documented non-symmetry: a scale-difference perturbation turns the
  // sphere into an ellipsoid, so the derivative is nonzero on the surface.
  const Quadric sphere(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d::Ones());
  const Eigen::Vector3d p = sphere.pose() * Eigen::Vector3d(1, 0, 0);
  CHECK(std::abs(derivative(sphere, scale_dir({1, -1, 0}), p)) > 1.0);
}

TEST_CASE("quadric text line round-trips exactly") {
  std::mt19937_64 rng(73);
  for (QuadricClass cls : kAll) {
    const Quadric q = test::random_quadric(cls, rng);
    const Quadric back = quadric_from_line(quadric_to_line(q));
    CHECK(back.cls() == q.cls());
    CHECK(back.signature() == q.signature());
    CHECK((back.pose().matrix() - q.pose().matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((back.scale() - q.scale()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(quadric_from_line("sphere 1 2"), std::invalid_argument);
  CHECK_THROWS_AS(quadric_from_line("banana 0 0 0 1 0 0 0 1 1 1"), std::invalid_argument);
}

TEST_CASE("scale constraint validation") {
  CHECK_THROWS_AS(Quadric(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d(1.0, 1.0, 1.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      Quadric(QuadricClass::CircularCylinder, RigidTransform(), Eigen::Vector3d(1.0, 1.0, 2.0)),
      std::invalid_argument);
  CHECK_THROWS_AS(Quadric(QuadricClass::Plane, RigidTransform(), Eigen::Vector3d(2.0, 1.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      Quadric(QuadricClass::Sphere, RigidTransform(), Eigen::Vector3d(-1.0, -1.0, -1.0)),
      std::invalid_argument);
}

TEST_CASE("cone factory and surface") {
  const Quadric cone = Quadric::cone(Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(), M_PI / 4.0);
  CHECK(cone.scale().isApprox(Eigen::Vector3d(1, 1, 1)));
  CHECK(std::abs(evaluate(cone, {1, 0, 1})) < 1e-12);
  CHECK(std::abs(evaluate(cone, {0, 1, -1})) < 1e-12);  // double cone
}
