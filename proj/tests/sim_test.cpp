#include "drsafe/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "drsafe/error.hpp"

namespace drsafe::sim {
namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;
using model::ExtControl;

TEST(Sampler, MatchesGoldenFile) {
  std::ifstream in(std::string(DRSAFE_TEST_DATA) + "/samples_seed42.csv");
  ASSERT_TRUE(in) << "missing golden file";
  const auto golden = dro::read_samples_csv(in);
  const auto drawn = sample_uncertainty({}, 3, 42);
  EXPECT_EQ(drawn.rows(), golden.rows());
}

TEST(Sampler, MomentsAndSupport) {
  UncertaintySampler sampler({}, 5);
  constexpr int kDraws = 1000000;
  Vector3d sum = Vector3d::Zero();
  double beta_min = 1.0, beta_max = 0.0, uniform_min = 1.0, uniform_max = -1.0;
  for (int i = 0; i < kDraws; ++i) {
    const Vector3d xi = sampler.draw();
    sum += xi;
    beta_min = std::min(beta_min, xi(2));
    beta_max = std::max(beta_max, xi(2));
    uniform_min = std::min(uniform_min, xi(1));
    uniform_max = std::max(uniform_max, xi(1));
  }
  const Vector3d mean = sum / kDraws;
  EXPECT_NEAR(mean(0), 0.5, 0.01);
  EXPECT_NEAR(mean(1), 0.0, 0.01);
  EXPECT_NEAR(mean(2), 2.0 / 2.2, 0.01);
  EXPECT_GT(beta_min, 0.0);
  EXPECT_LT(beta_max, 1.0);
  EXPECT_GE(uniform_min, -1.0);
  EXPECT_LT(uniform_max, 1.0);
}

TEST(Sampler, RejectsBadSpec) {
  EXPECT_THROW(UncertaintySampler(SamplerSpec{.normal_stddev = 0.0}, 1), Error);
  EXPECT_THROW(UncertaintySampler(SamplerSpec{.beta_beta = -1.0}, 1), Error);
  EXPECT_THROW(sample_uncertainty({}, 0, 1), Error);
}

const auto kModel = model::unicycle_model(0.05);

TEST(Step, DriftOnlyMovesLinearly) {
  const double dt = 0.1;
  const auto x = step(kModel, Vector3d::Zero(), ExtControl::from_input(Vector2d::Zero()), dt,
                      Vector3d(1, 0, 0));
  EXPECT_NEAR(x(0), dt * 0.02, 1e-15);
  EXPECT_NEAR(x(1), dt * 0.02, 1e-15);
  EXPECT_NEAR(x(2), dt * 0.01, 1e-15);
}

TEST(Step, NominalUnicycleDrivesStraight) {
  const auto x = step(kModel, Vector3d::Zero(), ExtControl::from_input(Vector2d(1, 0)), 0.02,
                      Vector3d::Zero());
  EXPECT_NEAR(x(0), 0.02, 1e-15);
  EXPECT_NEAR(x(1), 0.0, 1e-15);
  EXPECT_NEAR(x(2), 0.0, 1e-15);
}

// Off-axis point under constant (v, omega): closed-form arc.
Vector3d arc(const Vector3d& x0, double v, double omega, double t) {
  const double th0 = x0(2), th = th0 + omega * t;
  const double a = 0.05;
  return {x0(0) + v / omega * (std::sin(th) - std::sin(th0)) + a * (std::cos(th) - std::cos(th0)),
          x0(1) - v / omega * (std::cos(th) - std::cos(th0)) + a * (std::sin(th) - std::sin(th0)), th};
}

double integration_error(double dt) {
  const Vector3d x0(0.3, -0.2, 0.4);
  const auto u = ExtControl::from_input(Vector2d(1.5, 2.0));
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  VectorXd x = x0;
  for (int i = 0; i < steps; ++i) x = step(kModel, x, u, dt, Vector3d::Zero());
  return (x - arc(x0, 1.5, 2.0, steps * dt)).norm();
}

TEST(Step, FourthOrderConvergence) {
  const double ratio = integration_error(0.1) / integration_error(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Step, RejectsWrongSizes) {
  EXPECT_THROW(step(kModel, Vector2d::Zero(), ExtControl::from_input(Vector2d::Zero()), 0.1,
                    Vector3d::Zero()),
               Error);
}

TEST(ScenarioConfig, Validation) {
  auto cfg = reference_scenario(false);
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = reference_scenario(false);
  cfg.eps = 0.5;  // N0 = 3
  try {
    cfg.validate();
    FAIL() << "expected ConfigError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

TEST(NominalControl, PointsAtGoal) {
  auto cfg = reference_scenario(false);
  const auto u = nominal_control(cfg, Vector3d(0, 0, 0));
  EXPECT_NEAR(u.input()(0), 7.0, 1e-12);
  EXPECT_NEAR(u.input()(1), std::atan2(7.0, 7.0), 1e-12);
  // Heading wraps into (-pi, pi].
  const auto back = nominal_control(cfg, Vector3d(0, 0, 2 * std::numbers::pi + 0.1));
  EXPECT_NEAR(back.input()(1), std::numbers::pi / 4 - 0.1, 1e-12);
}

TEST(RunClosedLoop, ZeroHorizonLogsInitialState) {
  auto cfg = reference_scenario(false);
  cfg.horizon = 0;
  const auto log = run_closed_loop(cfg);
  ASSERT_EQ(log.records.size(), 1u);
  EXPECT_FALSE(log.records[0].status.has_value());
  EXPECT_EQ(log.records[0].x, cfg.initial);
}

void expect_log_invariants(const TrajectoryLog& log, double r0) {
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& rec = log.records[i];
    EXPECT_LE(rec.r, r0);
    EXPECT_LE(rec.eps * rec.N, 1.0 + 1e-12);
    if (i == 0) continue;
    const auto& prev = log.records[i - 1];
    EXPECT_GT(rec.t, prev.t);
    EXPECT_GE(rec.N, prev.N);
    EXPECT_LE(rec.r, prev.r);
  }
}

TEST(RunClosedLoop, GoalScenarioReachesGoal) {
  const auto cfg = reference_scenario(false);
  const auto log = run_closed_loop(cfg);
  ASSERT_EQ(log.records.size(), static_cast<std::size_t>(cfg.horizon) + 1);
  expect_log_invariants(log, cfg.r0);
  EXPECT_LT((log.records.back().x.head<2>() - cfg.goal).norm(), 0.3);
}

TEST(RunClosedLoop, ObstacleScenarioStaysSafe) {
  const auto cfg = reference_scenario(true);
  const auto log = run_closed_loop(cfg);
  expect_log_invariants(log, cfg.r0);
  for (const auto& rec : log.records) {
    ASSERT_TRUE(rec.h.has_value());
    EXPECT_GE(*rec.h, 0.0) << "step " << rec.step;
    if (rec.necessary == feasibility::VerdictKind::CertifiedInfeasible)
      EXPECT_EQ(rec.status, socp::SolveStatus::Infeasible);
  }
  EXPECT_LT((log.records.back().x.head<2>() - cfg.goal).norm(), 0.3);
}

TEST(RunClosedLoop, Deterministic) {
  auto cfg = reference_scenario(true);
  cfg.horizon = 60;
  const auto a = run_closed_loop(cfg);
  const auto b = run_closed_loop(cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].x, b.records[i].x);
    EXPECT_EQ(a.records[i].u, b.records[i].u);
    EXPECT_EQ(a.records[i].N, b.records[i].N);
    EXPECT_EQ(a.records[i].r, b.records[i].r);
    EXPECT_EQ(a.records[i].status, b.records[i].status);
    EXPECT_EQ(a.records[i].necessary, b.records[i].necessary);
  }
}

TEST(TrajectoryLog, CsvLayout) {
  auto cfg = reference_scenario(true);
  cfg.horizon = 2;
  std::ostringstream out;
  run_closed_loop(cfg).write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,t,x1,x2,theta,status,v,omega,N,r,eps,solve_time_s,necessary,"
                  "necessary_time_s,sufficient,sufficient_time_s,slack,slack_time_s,V,h");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 19) << line;
  }
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace drsafe::sim
