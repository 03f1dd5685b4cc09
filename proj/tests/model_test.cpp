#include "drsafe/model.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "drsafe/error.hpp"

namespace drsafe::model {
namespace {

// Constant-field model and certificate reproducing the hand-worked case:
// F(x0) = [[2,0],[0,3]], W1(x0) = [[1,0],[0,0]], grad h = (1,1), alpha(h) = 0.5.
struct HandCase {
  UncertainAffineModel model;
  CertificateFunction cert;
};

HandCase hand_case(bool zero_perturbation) {
  Eigen::MatrixXd f(2, 2);
  f << 2, 0, 0, 3;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  if (!zero_perturbation) w(0, 0) = 1.0;
  UncertainAffineModel model(2, 1, [f](const StateVec&) { return f; },
                             {[w](const StateVec&) { return w; }});
  CertificateFunction cert{CertificateKind::Barrier,
                           [](const StateVec&) { return 0.5; },
                           [](const StateVec&) { return Eigen::VectorXd(Eigen::Vector2d(1, 1)); },
                           linear_class_k(1.0), "h"};
  return {std::move(model), std::move(cert)};
}

TEST(AssembleConstraint, HandWorkedBarrier) {
  const auto hc = hand_case(false);
  const auto c = assemble_constraint(hc.model, hc.cert, Eigen::Vector2d(0, 0));
  EXPECT_DOUBLE_EQ(c.q(0), -2.5);
  EXPECT_DOUBLE_EQ(c.q(1), -3.0);
  ASSERT_EQ(c.R.rows(), 2);
  ASSERT_EQ(c.R.cols(), 1);
  EXPECT_DOUBLE_EQ(c.R(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c.R(1, 0), 0.0);

  // eval_G on the same data: u = (1, 1), xi = 2.
  const auto u = ExtControl::from_input(Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_DOUBLE_EQ(eval_G(c, u, Eigen::VectorXd::Constant(1, 2.0)), -7.5);
}

TEST(AssembleConstraint, ZeroPerturbationGivesZeroR) {
  const auto hc = hand_case(true);
  const auto c = assemble_constraint(hc.model, hc.cert, Eigen::Vector2d(0, 0));
  EXPECT_TRUE(c.R.isZero(0.0));
}

TEST(AssembleConstraint, LyapunovAtEquilibrium) {
  const auto model = unicycle_model(0.05);
  const auto clf = goal_lyapunov(Eigen::Vector2d(0, 0), 1.0, 3);
  const auto c = assemble_constraint(model, clf, Eigen::Vector3d(0, 0, 0.3));
  EXPECT_TRUE(c.q.isZero(0.0));
  EXPECT_TRUE(c.R.isZero(0.0));
}

TEST(AssembleConstraint, RejectsWrongGradientLength) {
  auto hc = hand_case(false);
  hc.cert.gradient = [](const StateVec&) { return Eigen::VectorXd::Ones(3); };
  try {
    assemble_constraint(hc.model, hc.cert, Eigen::Vector2d(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(EvalG, Examples) {
  ConstraintData zero{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 1), "z"};
  const auto u = ExtControl::from_input(Eigen::VectorXd::Constant(1, 3.0));
  EXPECT_EQ(eval_G(zero, u, Eigen::VectorXd::Constant(1, 4.0)), 0.0);
  ConstraintData lin{Eigen::Vector2d(1, 2), Eigen::MatrixXd::Zero(2, 1), "l"};
  EXPECT_EQ(eval_G(lin, u, Eigen::VectorXd::Constant(1, 4.0)), 7.0);
  EXPECT_THROW(eval_G(lin, u, Eigen::VectorXd::Zero(2)), Error);
}

TEST(ExtControl, LeadingOneEnforced) {
  EXPECT_THROW(ExtControl::from_full(Eigen::Vector3d(0.5, 1, 2)), Error);
  const auto u = ExtControl::from_full(Eigen::Vector3d(1, 4, 5));
  EXPECT_EQ(u.m(), 2);
  EXPECT_EQ(u.input(), Eigen::Vector2d(4, 5));
}

TEST(UnicycleModel, PrintedMatricesAtZeroHeading) {
  const auto model = unicycle_model(0.05);
  EXPECT_EQ(model.n(), 3);
  EXPECT_EQ(model.m(), 2);
  EXPECT_EQ(model.k(), 3);
  const Eigen::Vector3d x(1.0, -2.0, 0.0);
  Eigen::Matrix3d f;
  f << 0, 1, 0, 0, 0, 0.05, 0, 0, 1;
  EXPECT_TRUE(model.nominal(x).isApprox(f, 1e-15));
  Eigen::Matrix3d w3;
  w3 << 0, 0.02, 0, 0, 0, 0.001, 0, 0, 0;
  EXPECT_TRUE((model.perturbation(2, x) - w3).isZero(1e-15));
  Eigen::Matrix3d w2 = Eigen::Matrix3d::Zero();
  w2(2, 2) = -0.02;
  EXPECT_EQ(model.perturbation(1, x), Eigen::MatrixXd(w2));
}

TEST(UnicycleModel, DriftPerturbationIsConstant) {
  const auto model = unicycle_model(0.3);
  Eigen::Matrix3d w1 = Eigen::Matrix3d::Zero();
  w1.col(0) << 0.02, 0.02, 0.01;
  for (double th : {-3.0, -0.4, 0.0, 1.2, 2.9}) {
    EXPECT_EQ(model.perturbation(0, Eigen::Vector3d(5, 6, th)), Eigen::MatrixXd(w1));
  }
  EXPECT_THROW(unicycle_model(0.0), Error);
}

// G <= 0 encodes hdot >= -alpha(h) for barriers and Vdot <= -gamma(V) for
// Lyapunov functions, at random (x, u, xi).
TEST(AssembleConstraint, EncodesCertificateDerivative) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto model = unicycle_model(0.05);
  const auto cbf = disk_barrier(Eigen::Vector2d(3, 2), 1.0, 0.7, 3);
  const auto clf = goal_lyapunov(Eigen::Vector2d(7, 7), 1.3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector3d x(u(rng), u(rng), u(rng));
    const auto uc = ExtControl::from_input(Eigen::Vector2d(u(rng), u(rng)));
    const Eigen::Vector3d xi(u(rng), u(rng), u(rng));
    const Eigen::VectorXd xdot = model.realized(x, xi) * uc.full();

    const auto gb = assemble_constraint(model, cbf, x);
    const double hdot = cbf.gradient(x).dot(xdot);
    EXPECT_NEAR(eval_G(gb, uc, xi), -(hdot + cbf.class_k(cbf.value(x))), 1e-12 * (1 + std::abs(hdot)));

    const auto gl = assemble_constraint(model, clf, x);
    const double vdot = clf.gradient(x).dot(xdot);
    EXPECT_NEAR(eval_G(gl, uc, xi), vdot + clf.class_k(clf.value(x)), 1e-11 * (1 + std::abs(vdot)));
  }
}

TEST(EvalG, SuperpositionInXiAndControl) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    ConstraintData c{Eigen::Vector3d(g(rng), g(rng), g(rng)), Eigen::MatrixXd(3, 2), "r"};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) c.R(i, j) = g(rng);
    const auto u = ExtControl::from_input(Eigen::Vector2d(g(rng), g(rng)));
    const Eigen::Vector2d a(g(rng), g(rng)), b(g(rng), g(rng));
    const double s = g(rng);
    // Affine in xi: G(a + s b) - G(0) = (G(a) - G(0)) + s (G(b) - G(0)).
    const double g0 = eval_G(c, u, Eigen::Vector2d::Zero());
    EXPECT_NEAR(eval_G(c, u, a + s * b) - g0,
                (eval_G(c, u, a) - g0) + s * (eval_G(c, u, b) - g0), 1e-12);
    // Linear in the extended control: G(u1 + s u2) = G(u1) + s G(u2), with the
    // leading component treated as an ordinary coordinate.
    const Eigen::Vector3d u1 = u.full();
    const Eigen::Vector3d u2(g(rng), g(rng), g(rng));
    auto g_raw = [&](const Eigen::Vector3d& uu) { return uu.dot(c.q) + uu.dot(c.R * a); };
    EXPECT_NEAR(g_raw(u1 + s * u2), g_raw(u1) + s * g_raw(u2), 1e-12);
    EXPECT_NEAR(g_raw(u1), eval_G(c, u, a), 1e-14);
  }
}

TEST(CertificateFunction, ClassKAndLyapunovPositivity) {
  const auto clf = goal_lyapunov(Eigen::Vector2d(0, 0), 2.0, 3);
  EXPECT_EQ(clf.class_k(0.0), 0.0);
  double prev = -1.0;
  for (double s = 0.0; s <= 5.0; s += 0.25) {
    EXPECT_GT(clf.class_k(s), prev);
    prev = clf.class_k(s);
  }
  EXPECT_EQ(clf.value(Eigen::Vector3d(0, 0, 1.0)), 0.0);
  EXPECT_GT(clf.value(Eigen::Vector3d(0.1, -0.2, 0.0)), 0.0);
  EXPECT_THROW(linear_class_k(0.0), Error);
}

}  // namespace
}  // namespace drsafe::model
