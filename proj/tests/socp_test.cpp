#include "drsafe/socp.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "drsafe/error.hpp"

namespace drsafe::socp {
namespace {

ConeProgram one_var(double c, std::vector<double> a_col, std::vector<double> b,
                    std::vector<Cone> cones) {
  ConeProgram p;
  p.c = Eigen::VectorXd::Constant(1, c);
  p.A = Eigen::Map<Eigen::VectorXd>(a_col.data(), static_cast<Eigen::Index>(a_col.size()));
  p.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  p.cones = std::move(cones);
  return p;
}

TEST(Solve, OneDimensionalLp) {
  // min -x  s.t.  1 - x >= 0
  const auto p = one_var(-1.0, {1.0}, {1.0}, {{ConeKind::NonNegative, 1}});
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.primal(0), 1.0, 1e-7);
  EXPECT_NEAR(sol.objective, -1.0, 1e-7);
}

TEST(Solve, ConstantInsideSecondOrderCone) {
  // min t  s.t.  (t, 3, 4) in Q3
  const auto p = one_var(1.0, {-1.0, 0.0, 0.0}, {0.0, 3.0, 4.0}, {{ConeKind::SecondOrder, 3}});
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.primal(0), 5.0, 1e-7);
}

TEST(Solve, EmptyPolytopeIsInfeasible) {
  // x <= -1 and x >= 0
  const auto p = one_var(0.0, {1.0, -1.0}, {-1.0, 0.0}, {{ConeKind::NonNegative, 2}});
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Infeasible);
  // Certificate: z in K, A^T z = 0, b^T z < 0 (normalized to -1).
  EXPECT_LE(sol.certificate_residual, 1e-7);
  EXPECT_LE((p.A.transpose() * sol.dual).norm(), 1e-7);
  EXPECT_NEAR(p.b.dot(sol.dual), -1.0, 1e-9);
  EXPECT_GE(sol.dual.minCoeff(), 0.0);
}

TEST(Solve, UnboundedLp) {
  // min -x  s.t.  x >= 0
  const auto p = one_var(-1.0, {-1.0}, {0.0}, {{ConeKind::NonNegative, 1}});
  EXPECT_EQ(solve(p).status, SolveStatus::Unbounded);
}

TEST(Solve, RejectsMalformedProgram) {
  auto p = one_var(1.0, {1.0, 2.0}, {1.0, 2.0}, {{ConeKind::NonNegative, 1}});
  EXPECT_THROW(solve(p), Error);
}

TEST(Solve, MinimumNormPointOnHalfspace) {
  // min t s.t. |x| <= t, x1 + x2 >= 2  -> x = (1,1), t = sqrt(2)
  ConeProgram p;
  p.c = Eigen::Vector3d(0, 0, 1);
  p.A = Eigen::MatrixXd::Zero(4, 3);
  p.b = Eigen::VectorXd::Zero(4);
  // b - A x = (x1 + x2 - 2, t, x1, x2)
  p.b(0) = -2.0;
  p.A.row(0) << -1, -1, 0;
  p.A.row(1) << 0, 0, -1;
  p.A.row(2) << -1, 0, 0;
  p.A.row(3) << 0, -1, 0;
  p.cones = {{ConeKind::NonNegative, 1}, {ConeKind::SecondOrder, 3}};
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.primal(0), 1.0, 1e-7);
  EXPECT_NEAR(sol.primal(1), 1.0, 1e-7);
  EXPECT_NEAR(sol.objective, std::sqrt(2.0), 1e-7);
}

// Random feasible, bounded programs: build a strictly feasible primal point
// and a strictly feasible dual point, then derive c from the dual.
ConeProgram random_bounded(std::mt19937_64& rng, int n, int lp_rows, std::vector<int> soc_dims) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  ConeProgram p;
  for (int i = 0; i < lp_rows; ++i) p.cones.push_back({ConeKind::NonNegative, 1});
  for (int d : soc_dims) p.cones.push_back({ConeKind::SecondOrder, d});
  int rows = lp_rows;
  for (int d : soc_dims) rows += d;
  p.A.resize(rows, n);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < n; ++j) p.A(i, j) = g(rng);
  Eigen::VectorXd x0(n), s0(rows), z0(rows);
  for (int j = 0; j < n; ++j) x0(j) = g(rng);
  int off = 0;
  for (const auto& cone : p.cones) {
    for (auto* v : {&s0, &z0}) {
      auto seg = v->segment(off, cone.dim);
      if (cone.kind == ConeKind::NonNegative) {
        for (int i = 0; i < cone.dim; ++i) seg(i) = pos(rng);
      } else {
        for (int i = 1; i < cone.dim; ++i) seg(i) = g(rng);
        seg(0) = seg.tail(cone.dim - 1).norm() + pos(rng);
      }
    }
    off += cone.dim;
  }
  p.b = p.A * x0 + s0;
  p.c = -p.A.transpose() * z0;
  return p;
}

TEST(Solve, RandomProgramsSatisfyKkt) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 6;
    const auto p = random_bounded(rng, n, 2 + trial % 5, {3, 1 + trial % 4, 2});
    const auto sol = solve(p);
    ASSERT_EQ(sol.status, SolveStatus::Optimal) << "trial " << trial;
    const auto kkt = kkt_report(p, sol);
    EXPECT_LE(kkt.primal_residual, 1e-8);
    EXPECT_LE(kkt.dual_residual, 1e-8);
    EXPECT_LE(kkt.max_block_complementarity, 1e-7);
    EXPECT_GE(kkt.min_cone_margin, -1e-9);
    EXPECT_LE(sol.gap, 1e-8 * (1.0 + std::abs(sol.objective)));
    EXPECT_LT(sol.iterations, 60);
  }
}

TEST(Solve, Deterministic) {
  std::mt19937_64 rng(5);
  const auto p = random_bounded(rng, 4, 3, {3, 4});
  const auto a = solve(p);
  const auto b = solve(p);
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  EXPECT_EQ(a.iterations, b.iterations);
  for (Eigen::Index i = 0; i < a.primal.size(); ++i) EXPECT_EQ(a.primal(i), b.primal(i));
}

TEST(ProgramText, RoundTripsExactly) {
  std::mt19937_64 rng(8);
  const auto p = random_bounded(rng, 3, 2, {3});
  std::stringstream ss;
  write_program(ss, p);
  const auto q = read_program(ss);
  EXPECT_EQ(q.A, p.A);
  EXPECT_EQ(q.b, p.b);
  EXPECT_EQ(q.c, p.c);
  ASSERT_EQ(q.cones.size(), p.cones.size());
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    EXPECT_EQ(q.cones[i].kind, p.cones[i].kind);
    EXPECT_EQ(q.cones[i].dim, p.cones[i].dim);
  }
}

TEST(ProgramText, RejectsGarbage) {
  std::stringstream bad("drsafe-socp 1\nvars 1 rows 1 cones 1\nX 1\n");
  EXPECT_THROW(read_program(bad), Error);
  std::stringstream truncated("drsafe-socp 1\nvars 1 rows 1 cones 1\nL 1\nA\n1\nb\n");
  EXPECT_THROW(read_program(truncated), Error);
}

}  // namespace
}  // namespace drsafe::socp
