#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "drsafe/dro.hpp"
#include "drsafe/feasibility.hpp"
#include "drsafe/model.hpp"
#include "drsafe/socp.hpp"

namespace drsafe::sim {

/// Marginals of the three independent perturbation coordinates: normal,
/// uniform and beta.
struct SamplerSpec {
  double normal_mean = 0.5;
  double normal_stddev = 1.0;
  double uniform_low = -1.0;
  double uniform_high = 1.0;
  double beta_alpha = 2.0;
  double beta_beta = 0.2;

  void validate() const;
};

/// Seeded stream of perturbation triples.
class UncertaintySampler {
 public:
  UncertaintySampler(SamplerSpec spec, std::uint64_t seed);

  Eigen::Vector3d draw();
  // `count` draws, one per row.
  dro::SampleSet draw_set(int count);

 private:
  SamplerSpec spec_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  std::gamma_distribution<double> gamma_a_;
  std::gamma_distribution<double> gamma_b_;
};

dro::SampleSet sample_uncertainty(const SamplerSpec& spec, int count, std::uint64_t seed);

/// One classical RK4 step of xdot = (F(x) + sum_j W_j(x) xi_j) [1; u] with
/// xi held constant.
StateVec step(const model::UncertainAffineModel& model, const StateVec& x,
              const model::ExtControl& u, double dt, const Eigen::VectorXd& xi);

struct Obstacle {
  Eigen::Vector2d center;
  double radius = 1.0;
};

struct ScenarioConfig {
  double offset = 0.05;  // unicycle look-ahead distance
  Eigen::Vector2d goal{7.0, 7.0};
  std::optional<Obstacle> obstacle;  // adds the barrier constraint (M = 2)
  StateVec initial = Eigen::Vector3d::Zero();
  double dt = 0.02;
  int horizon = 1000;

  double eps = 0.01;
  double r0 = 0.5;
  int n0 = 3;
  int batch = 1;  // samples drawn after each infeasible solve
  // Tail constants of the radius schedule; eps_bar, c1, c2, a, k as in
  // AmbiguityConfig (r and eps are taken from the fields above).
  dro::AmbiguityConfig schedule{.eps_bar = 0.1, .c2 = 100.0, .k = 3};

  SamplerSpec sampler;
  std::uint64_t seed = 1;
  int redraw_period = 1;  // steps between fresh draws of the true perturbation

  double gain_v = 1.0;
  double gain_omega = 1.0;
  double clf_rate = 1.0;
  double cbf_rate = 1.0;

  bool run_necessary = true;
  bool run_sufficient = true;  // single-constraint check when M = 1
  std::optional<feasibility::SlackCertificate> slack;  // enables the slack check

  int M() const { return obstacle ? 2 : 1; }
  // Throws ConfigError.
  void validate() const;
};

/// Goal (7, 7) from the origin, or with `with_obstacle` goal (5, 5) past
/// the disk of radius 1 at (3, 2).
ScenarioConfig reference_scenario(bool with_obstacle);

model::ExtControl nominal_control(const ScenarioConfig& cfg, const StateVec& x);

/// The scenario's DRO problem for a given sample set, radius and risk level.
dro::SynthesisProblem scenario_problem(const ScenarioConfig& cfg,
                                       std::shared_ptr<const dro::SampleSet> samples, double r,
                                       double eps);

struct StepRecord {
  int step = 0;
  double t = 0.0;
  StateVec x;
  // Absent on the final record, which only carries the state.
  std::optional<socp::SolveStatus> status;
  Eigen::VectorXd u;  // applied input; zero unless status is Optimal
  int N = 0;
  double r = 0.0;
  double eps = 0.0;
  double solve_time = 0.0;
  std::optional<feasibility::VerdictKind> necessary;
  double necessary_time = 0.0;
  std::optional<feasibility::VerdictKind> sufficient;
  double sufficient_time = 0.0;
  std::optional<feasibility::VerdictKind> slack;
  double slack_time = 0.0;
  double V = 0.0;
  std::optional<double> h;
};

struct TrajectoryLog {
  std::vector<StepRecord> records;

  // Columns: step,t,x1,x2,theta,status,v,omega,N,r,eps,solve_time_s,
  // necessary,necessary_time_s,sufficient,sufficient_time_s,slack,
  // slack_time_s,V,h. Missing values are empty fields.
  void write_csv(std::ostream& out) const;
};

TrajectoryLog run_closed_loop(const ScenarioConfig& cfg);

}  // namespace drsafe::sim
