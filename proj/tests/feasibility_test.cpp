#include "drsafe/feasibility.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "drsafe/synthesis.hpp"

namespace drsafe::feasibility {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using dro::AmbiguityConfig;
using dro::ProblemInstance;
using dro::SampleSet;
using model::ConstraintData;
using model::ExtControl;

ProblemInstance make(std::vector<ConstraintData> cons, int m, double r, double eps,
                     const MatrixXd& samples) {
  return ProblemInstance{std::move(cons), ExtControl::from_input(VectorXd::Zero(m)),
                         AmbiguityConfig{.r = r, .eps = eps, .k = static_cast<int>(samples.cols())},
                         std::make_shared<const SampleSet>(samples)};
}

// |u| <= 10 (q0 = -10) or |u| + 10 <= 0 (q0 = 10) at one zero sample.
ProblemInstance absolute_value(double q0, double xi) {
  return make({ConstraintData{Eigen::Vector2d(q0, 0), MatrixXd(Eigen::Vector2d(0, 1)), "abs"}}, 1,
              1.0, 1.0, MatrixXd::Constant(1, 1, xi));
}

TEST(CheckNecessary, FeasibleAbsoluteValueIsInconclusive) {
  const auto v = check_necessary(absolute_value(-10, 0));
  EXPECT_EQ(v.kind, VerdictKind::Inconclusive);
  ASSERT_EQ(v.detail.size(), 1u);
  EXPECT_TRUE(v.detail[0].h_not_pd);
  EXPECT_EQ(v.detail[0].sign_case, SignCase::PosEig);
  EXPECT_TRUE(v.detail[0].passes);
}

TEST(CheckNecessary, ShiftedAbsoluteValueIsInfeasible) {
  const auto v = check_necessary(absolute_value(10, 0));
  EXPECT_EQ(v.kind, VerdictKind::CertifiedInfeasible);
  ASSERT_EQ(v.detail.size(), 1u);
  EXPECT_TRUE(v.detail[0].h_not_pd);
  EXPECT_FALSE(v.detail[0].passes);
}

TEST(CheckNecessary, SingularGramIsNotApplicable) {
  const auto inst = make({ConstraintData{Eigen::Vector2d(-1, 0), MatrixXd(Eigen::Vector2d(1, 0)), "c"}},
                         1, 1.0, 1.0, MatrixXd::Zero(1, 1));
  const auto v = check_necessary(inst);
  EXPECT_EQ(v.kind, VerdictKind::NotApplicable);
  ASSERT_TRUE(v.violated.has_value());
  EXPECT_EQ(*v.violated, ErrorCode::QQTSingular);
}

TEST(CheckNecessary, RejectsLargeEps) {
  auto inst = absolute_value(-10, 0);
  inst.samples = std::make_shared<const SampleSet>(MatrixXd::Zero(2, 1));
  try {
    check_necessary(inst);
    FAIL() << "expected EpsTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsTooLarge);
  }
}

TEST(CheckSufficientSingle, InflatedAbsoluteValue) {
  const auto v = check_sufficient_single(absolute_value(-10, 1));
  EXPECT_EQ(v.kind, VerdictKind::CertifiedFeasible);
  ASSERT_EQ(v.detail.size(), 1u);
  EXPECT_EQ(v.detail[0].sign_case, SignCase::PosEig);

  EXPECT_EQ(check_sufficient_single(absolute_value(10, 1)).kind, VerdictKind::Inconclusive);
}

TEST(CheckSufficientSingle, ZeroSamplesMatchPerSampleTest) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd q(3);
    MatrixXd rm(3, 2);
    for (int i = 0; i < 3; ++i) {
      q(i) = g(rng);
      for (int j = 0; j < 2; ++j) rm(i, j) = g(rng);
    }
    const auto inst = make({ConstraintData{q, rm, "c"}}, 2, 0.5, 0.25, MatrixXd::Zero(4, 2));
    const auto nec = check_necessary(inst);
    const auto suf = check_sufficient_single(inst);
    EXPECT_EQ(nec.detail[0].passes, suf.detail[0].passes);
    EXPECT_EQ(nec.detail[0].sign_case, suf.detail[0].sign_case);
  }
}

TEST(CheckSufficientSingle, RejectsTwoConstraints) {
  auto inst = absolute_value(-10, 0);
  inst.constraints.push_back(inst.constraints[0]);
  try {
    check_sufficient_single(inst);
    FAIL() << "expected WrongM";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WrongM);
  }
}

// Radius schedule sqrt(1/N): dimension constant 2, and c1 = e * eps_bar makes
// the log term 1.
ProblemInstance slack_instance(int n, double eps) {
  auto inst = make({ConstraintData{Eigen::Vector2d(-1, 0), MatrixXd(Eigen::Vector2d(0, 1)), "c"}}, 1,
                   0.0, eps, MatrixXd::Zero(n, 1));
  inst.ambiguity.k = 2;
  inst.ambiguity.eps_bar = 0.1;
  inst.ambiguity.c1 = std::exp(1.0) * 0.1;
  inst.ambiguity.c2 = 1.0;
  return inst;
}

TEST(CheckSufficientSlack, ThresholdArithmetic) {
  const SlackCertificate cert{{1.0}, 2.0};
  EXPECT_NEAR(slack_threshold(slack_instance(1, 0.1), cert), 0.025, 1e-15);

  auto fine = slack_instance(10000, 0.1);
  EXPECT_NEAR(dro::radius_schedule(10000, fine.ambiguity), 0.01, 1e-15);
  EXPECT_EQ(check_sufficient_slack(fine, cert).kind, VerdictKind::CertifiedFeasible);

  auto coarse = slack_instance(400, 0.1);
  EXPECT_NEAR(dro::radius_schedule(400, coarse.ambiguity), 0.05, 1e-15);
  EXPECT_EQ(check_sufficient_slack(coarse, cert).kind, VerdictKind::Inconclusive);

  EXPECT_EQ(check_sufficient_slack(fine, SlackCertificate{{0.0}, 2.0}).kind,
            VerdictKind::Inconclusive);
}

TEST(CheckSufficientSlack, Errors) {
  auto zero = slack_instance(10, 0.1);
  zero.constraints[0].R.setZero();
  try {
    check_sufficient_slack(zero, SlackCertificate{{1.0}, 2.0});
    FAIL() << "expected ZeroRNorm";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroRNorm);
  }

  auto wide = slack_instance(100, 0.01);
  wide.ambiguity.r = 0.2;  // schedule gives 0.1
  try {
    check_sufficient_slack(wide, SlackCertificate{{1.0}, 2.0});
    FAIL() << "expected RadiusMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RadiusMismatch);
  }

  EXPECT_THROW(check_sufficient_slack(slack_instance(10, 0.1), SlackCertificate{{1.0}, 0.5}), Error);
  EXPECT_THROW(check_sufficient_slack(slack_instance(10, 0.1), SlackCertificate{{-1.0}, 2.0}), Error);
}

// Random instances whose constant term is shifted across the feasibility
// boundary, so both verdicts occur.
ProblemInstance random_instance(std::mt19937_64& rng, int m, int k, int big_m, int n) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  MatrixXd samples(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) samples(i, j) = g(rng);
  std::vector<ConstraintData> cons;
  for (int l = 0; l < big_m; ++l) {
    VectorXd q(m + 1);
    MatrixXd rm(m + 1, k);
    for (int i = 0; i <= m; ++i) {
      q(i) = g(rng);
      for (int j = 0; j < k; ++j) rm(i, j) = g(rng);
    }
    q(0) = shift(rng);
    cons.push_back(ConstraintData{q, rm, "c"});
  }
  return make(std::move(cons), m, std::uniform_real_distribution<double>(0.1, 1.0)(rng), 1.0 / n,
              samples);
}

TEST(Soundness, NecessaryNeverRejectsSolvableInstances) {
  std::mt19937_64 rng(11);
  int infeasible_verdicts = 0, optimal = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + trial % 3, k = m + rng() % 2, big_m = 1 + trial % 2, n = 1 + rng() % 10;
    const auto inst = random_instance(rng, m, k, big_m, n);
    const auto v = check_necessary(inst);
    if (v.kind == VerdictKind::NotApplicable) continue;
    const auto res = socp::synthesize(inst);
    optimal += res.optimal();
    infeasible_verdicts += v.kind == VerdictKind::CertifiedInfeasible;
    if (res.optimal()) EXPECT_NE(v.kind, VerdictKind::CertifiedInfeasible) << "trial " << trial;
  }
  EXPECT_GT(infeasible_verdicts, 10);
  EXPECT_GT(optimal, 10);
}

TEST(Soundness, SufficientNeverAcceptsUnsolvableInstances) {
  std::mt19937_64 rng(13);
  int feasible_verdicts = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 1 + trial % 3, k = m + rng() % 2, n = 1 + rng() % 10;
    const auto inst = random_instance(rng, m, k, 1, n);
    const auto v = check_sufficient_single(inst);
    if (v.kind == VerdictKind::NotApplicable) continue;
    const auto res = socp::synthesize(inst);
    infeasible += res.status == socp::SolveStatus::Infeasible;
    feasible_verdicts += v.kind == VerdictKind::CertifiedFeasible;
    if (v.kind == VerdictKind::CertifiedFeasible) EXPECT_TRUE(res.optimal()) << "trial " << trial;
  }
  EXPECT_GT(feasible_verdicts, 10);
  EXPECT_GT(infeasible, 10);
}

TEST(Monotonicity, PassingPairsPersistWhenSamplesAreAppended) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    auto base = random_instance(rng, 2, 2, 2, 4);
    base.ambiguity.eps = 1.0 / 8;
    MatrixXd extra(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) extra(i, j) = g(rng);
    auto grown = base;
    grown.samples = std::make_shared<const SampleSet>(base.samples->appended(SampleSet(extra)));

    const auto before = check_necessary(base);
    const auto after = check_necessary(grown);
    if (before.kind == VerdictKind::NotApplicable) continue;
    for (const auto& rec : before.detail) {
      if (!rec.passes) continue;
      const auto& later = after.detail[rec.constraint * 8 + rec.sample];
      EXPECT_EQ(later.sample, rec.sample);
      EXPECT_TRUE(later.passes);
    }
    if (before.kind == VerdictKind::Inconclusive)
      EXPECT_EQ(after.kind, VerdictKind::Inconclusive);
  }
}

TEST(Complexity, NecessaryCheckScalesLinearlyInSamples) {
  std::mt19937_64 rng(19);
  std::vector<double> logs_n, logs_t;
  for (int n : {100, 1000, 10000}) {
    const auto inst = random_instance(rng, 2, 2, 1, n);
    std::vector<double> times;
    for (int rep = 0; rep < 5; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      check_necessary(inst);
      times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    std::nth_element(times.begin(), times.begin() + 2, times.end());
    logs_n.push_back(std::log(n));
    logs_t.push_back(std::log(times[2]));
  }
  const double slope = (logs_t.back() - logs_t.front()) / (logs_n.back() - logs_n.front());
  EXPECT_LE(slope, 1.2);
}

}  // namespace
}  // namespace drsafe::feasibility
