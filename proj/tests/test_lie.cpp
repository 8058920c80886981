#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qslam/core/lie.hpp"

using namespace qslam;

TEST_CASE("hat and vee invert each other") {
  Vector6d xi;
  xi << 1.0, -2.0, 3.0, 0.4, -0.5, 0.6;
  CHECK((se3_vee(se3_hat(xi)) - xi).norm() == 0.0);
}

TEST_CASE("exp of zero twist is the identity") {
  const RigidTransform t = se3_exp(Vector6d::Zero());
  CHECK((t.rotation() - Eigen::Matrix3d::Identity()).norm() == 0.0);
  CHECK(t.translation().norm() == 0.0);
}

TEST_CASE("pure translation twist") {
  Vector6d xi = Vector6d::Zero();
  xi.head<3>() = Eigen::Vector3d(1.0, 2.0, 3.0);
  const RigidTransform t = se3_exp(xi);
  CHECK((t.rotation() - Eigen::Matrix3d::Identity()).norm() < 1e-15);
  CHECK((t.translation() - Eigen::Vector3d(1.0, 2.0, 3.0)).norm() < 1e-15);
}

TEST_CASE("quarter-turn about z matches the matrix exponential oracle") {
  Vector6d xi = Vector6d::Zero();
  xi(5) = M_PI / 2.0;
  const RigidTransform t = se3_exp(xi);
  const Eigen::Matrix4d expected = test::expm_oracle(se3_hat(xi));
  CHECK((t.matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::Matrix3d r_expected;
  r_expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((t.rotation() - r_expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.translation().norm() < 1e-12);
}

TEST_CASE("exp agrees with the matrix exponential oracle on random twists") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Vector6d xi;
    for (int k = 0; k < 6; ++k) xi(k) = u(rng);
    const Eigen::Matrix4d expected = test::expm_oracle(se3_hat(xi));
    CHECK((se3_exp(xi).matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("log inverts exp away from the branch cut") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vector6d xi;
    for (int k = 0; k < 6; ++k) xi(k) = u(rng);
    xi.tail<3>() *= (M_PI - 0.1) / std::sqrt(3.0);
    CHECK((se3_log(se3_exp(xi)) - xi).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("round-trip for the spec's sample twist") {
  Vector6d xi;
  xi << 0.1, -0.2, 0.3, 0.05, 0.1, -0.15;
  CHECK((se3_log(se3_exp(xi)) - xi).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("log of identity and of a pure translation") {
  CHECK(se3_log(RigidTransform()).norm() == 0.0);
  const RigidTransform t(Eigen::Matrix3d::Identity(), {1.0, 2.0, 3.0});
  Vector6d expected = Vector6d::Zero();
  expected.head<3>() = Eigen::Vector3d(1.0, 2.0, 3.0);
  CHECK((se3_log(t) - expected).norm() < 1e-15);
}

TEST_CASE("log throws at the branch cut") {
  const Eigen::Matrix3d r = so3_exp(Eigen::Vector3d(M_PI, 0.0, 0.0));
  CHECK_THROWS_WITH_AS(se3_log(RigidTransform(r, Eigen::Vector3d::Zero())),
                       doctest::Contains("log branch ambiguous"), std::domain_error);
}

TEST_CASE("small-angle branch is continuous") {
  for (double mag : {1e-12, 1e-9, 5e-9, 2e-8, 1e-6}) {
    Vector6d xi;
    xi << 0.3, -0.1, 0.2, mag, mag * 0.5, -mag;
    const Eigen::Matrix4d expected = test::expm_oracle(se3_hat(xi));
    CHECK((se3_exp(xi).matrix() - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((se3_log(se3_exp(xi)) - xi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("adjoint moves twists across conjugation") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = test::random_transform(rng);
    Vector6d xi;
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 6; ++k) xi(k) = u(rng);
    const RigidTransform lhs = t * se3_exp(xi) * t.inverse();
    const RigidTransform rhs = se3_exp(se3_adjoint(t) * xi);
    CHECK((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("inverse right Jacobian matches finite differences of the composed log") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int i = 0; i < 40; ++i) {
    Vector6d xi;
    for (int k = 0; k < 6; ++k) xi(k) = u(rng);
    const RigidTransform base = se3_exp(xi);
    const auto f = [&](const Eigen::VectorXd& eta) -> Eigen::VectorXd {
      Vector6d e = eta;
      return se3_log(base * se3_exp(e));
    };
    const Eigen::MatrixXd fd = test::numeric_jacobian(f, 6);
    const Matrix6d analytic = se3_right_jacobian_inv(xi);
    CHECK(test::max_relative_error(analytic, fd) < 1e-5);
  }
}

TEST_CASE("left Jacobian inverse matches the integral form of the Jacobian") {
  // Jl(xi) = \int_0^1 Ad(exp(s xi)) ds; the closed form must invert it.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    Vector6d xi;
    for (int k = 0; k < 6; ++k) xi(k) = u(rng);
    Matrix6d integral = Matrix6d::Zero();
    const int n = 5000;
    for (int i = 0; i < n; ++i) integral += se3_adjoint(se3_exp(((i + 0.5) / n) * xi));
    integral /= n;
    const Matrix6d prod = se3_left_jacobian_inv(xi) * integral;
    CHECK((prod - Matrix6d::Identity()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("so3 Jacobian pairs invert each other") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Vector3d phi(u(rng), u(rng), u(rng));
    const Eigen::Matrix3d prod = so3_left_jacobian(phi) * so3_left_jacobian_inv(phi);
    CHECK((prod - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rotation geodesic distance") {
  const Eigen::Matrix3d a = so3_exp({0.0, 0.0, 0.3});
  const Eigen::Matrix3d b = so3_exp({0.0, 0.0, -0.4});
  CHECK(rotation_geodesic(a, b) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rotation_geodesic(a, a) == doctest::Approx(0.0));
}

TEST_CASE("rigid transform validity check") {
  CHECK(RigidTransform().is_valid());
  Eigen::Matrix3d bad = Eigen::Matrix3d::Identity();
  bad(0, 0) = 1.5;
  CHECK_FALSE(RigidTransform(bad, Eigen::Vector3d::Zero()).is_valid());
  const Eigen::Matrix3d reflect = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
  CHECK_FALSE(RigidTransform(reflect, Eigen::Vector3d::Zero()).is_valid());
}
