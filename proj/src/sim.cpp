#include "drsafe/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "drsafe/error.hpp"
#include "drsafe/synthesis.hpp"

namespace drsafe::sim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SamplerSpec::validate() const {
  if (!(normal_stddev > 0.0)) throw Error(ErrorCode::ConfigError, "normal stddev must be positive");
  if (!(uniform_low < uniform_high)) throw Error(ErrorCode::ConfigError, "uniform needs low < high");
  if (!(beta_alpha > 0.0 && beta_beta > 0.0))
    throw Error(ErrorCode::ConfigError, "beta parameters must be positive");
}

UncertaintySampler::UncertaintySampler(SamplerSpec spec, std::uint64_t seed)
    : spec_(spec),
      rng_(seed),
      normal_(spec.normal_mean, spec.normal_stddev),
      uniform_(spec.uniform_low, spec.uniform_high),
      gamma_a_(spec.beta_alpha),
      gamma_b_(spec.beta_beta) {
  spec_.validate();
}

Eigen::Vector3d UncertaintySampler::draw() {
  const double n = normal_(rng_);
  const double u = uniform_(rng_);
  const double ga = gamma_a_(rng_);
  const double gb = gamma_b_(rng_);
  // Small shape parameters underflow the gamma draw to 0, so the ratio can
  // land on 0 or 1 exactly; keep it inside the open unit interval.
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  const double b = std::clamp(ga / (ga + gb), kLow, kHigh);
  return {n, u, std::isnan(b) ? 0.5 : b};
}

dro::SampleSet UncertaintySampler::draw_set(int count) {
  if (count < 1) throw Error(ErrorCode::InvalidConfig, "sample count must be >= 1");
  MatrixXd rows(count, 3);
  for (int i = 0; i < count; ++i) rows.row(i) = draw().transpose();
  return dro::SampleSet(std::move(rows));
}

dro::SampleSet sample_uncertainty(const SamplerSpec& spec, int count, std::uint64_t seed) {
  return UncertaintySampler(spec, seed).draw_set(count);
}

StateVec step(const model::UncertainAffineModel& model, const StateVec& x,
              const model::ExtControl& u, double dt, const VectorXd& xi) {
  if (x.size() != model.n() || u.m() != model.m() || xi.size() != model.k())
    throw Error(ErrorCode::DimensionMismatch, "step: state, input or perturbation size");
  auto f = [&](const StateVec& s) -> VectorXd { return model.realized(s, xi) * u.full(); };
  const VectorXd k1 = f(x);
  const VectorXd k2 = f(x + 0.5 * dt * k1);
  const VectorXd k3 = f(x + 0.5 * dt * k2);
  const VectorXd k4 = f(x + dt * k3);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (!(offset > 0.0)) fail("offset must be positive");
  if (!(dt > 0.0)) fail("dt must be positive");
  if (horizon < 0) fail("horizon must be >= 0");
  if (initial.size() != 3 || !initial.allFinite()) fail("initial state must have 3 finite entries");
  if (n0 < 1) fail("N0 must be >= 1");
  if (batch < 1) fail("batch must be >= 1");
  if (redraw_period < 1) fail("redraw period must be >= 1");
  if (!(eps > 0.0 && eps * n0 <= 1.0 + 1e-12)) fail("need 0 < eps <= 1/N0");
  if (!(r0 >= 0.0)) fail("r0 must be >= 0");
  if (obstacle && !(obstacle->radius > 0.0)) fail("obstacle radius must be positive");
  try {
    sampler.validate();
    dro::radius_schedule(n0, schedule);
    if (slack) slack->validate(M());
  } catch (const Error& e) {
    fail(e.what());
  }
}

ScenarioConfig reference_scenario(bool with_obstacle) {
  ScenarioConfig cfg;
  if (with_obstacle) {
    cfg.goal = {5.0, 5.0};
    cfg.obstacle = Obstacle{{3.0, 2.0}, 1.0};
  }
  return cfg;
}

model::ExtControl nominal_control(const ScenarioConfig& cfg, const StateVec& x) {
  const Eigen::Vector2d heading(std::cos(x(2)), std::sin(x(2)));
  const Eigen::Vector2d to_goal = cfg.goal - x.head<2>();
  double turn = std::atan2(to_goal.y(), to_goal.x()) - x(2);
  turn = std::remainder(turn, 2.0 * std::numbers::pi);
  return model::ExtControl::from_input(
      Eigen::Vector2d(cfg.gain_v * heading.dot(to_goal), cfg.gain_omega * turn));
}

dro::SynthesisProblem scenario_problem(const ScenarioConfig& cfg,
                                       std::shared_ptr<const dro::SampleSet> samples, double r,
                                       double eps) {
  const auto model = std::make_shared<const model::UncertainAffineModel>(model::unicycle_model(cfg.offset));
  std::vector<model::CertificateFunction> certs{model::goal_lyapunov(cfg.goal, cfg.clf_rate, 3)};
  if (cfg.obstacle)
    certs.push_back(model::disk_barrier(cfg.obstacle->center, cfg.obstacle->radius, cfg.cbf_rate, 3));

  dro::SynthesisProblem p;
  for (auto& cert : certs)
    p.constraints.push_back([model, cert](const StateVec& x) {
      return model::assemble_constraint(*model, cert, x);
    });
  p.nominal = [cfg](const StateVec& x) { return nominal_control(cfg, x); };
  p.ambiguity = cfg.schedule;
  p.ambiguity.r = r;
  p.ambiguity.eps = eps;
  p.samples = std::move(samples);
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto timed(double& seconds, F&& f) {
  const auto start = Clock::now();
  auto result = f();
  seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

// Checker verdicts are advisory: a violated precondition leaves the field
// empty instead of stopping the run.
template <class F>
std::optional<feasibility::VerdictKind> try_check(double& seconds, F&& f) {
  try {
    return timed(seconds, f).kind;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

TrajectoryLog run_closed_loop(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto model = model::unicycle_model(cfg.offset);
  const auto lyapunov = model::goal_lyapunov(cfg.goal, cfg.clf_rate, 3);
  std::optional<model::CertificateFunction> barrier;
  if (cfg.obstacle)
    barrier = model::disk_barrier(cfg.obstacle->center, cfg.obstacle->radius, cfg.cbf_rate, 3);

  UncertaintySampler data(cfg.sampler, cfg.seed);
  UncertaintySampler truth(cfg.sampler, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  auto samples = std::make_shared<const dro::SampleSet>(data.draw_set(cfg.n0));
  double r = cfg.r0;
  double eps = cfg.eps;
  VectorXd xi_true = truth.draw();

  TrajectoryLog log;
  StateVec x = cfg.initial;
  for (int k = 0;; ++k) {
    StepRecord rec;
    rec.step = k;
    rec.t = k * cfg.dt;
    rec.x = x;
    rec.N = samples->size();
    rec.r = r;
    rec.eps = eps;
    rec.V = lyapunov.value(x);
    if (barrier) rec.h = barrier->value(x);
    if (k == cfg.horizon) {
      log.records.push_back(std::move(rec));
      break;
    }

    const auto problem = scenario_problem(cfg, samples, r, eps);
    const auto inst = problem.at(x);
    if (cfg.run_necessary)
      rec.necessary = try_check(rec.necessary_time, [&] { return feasibility::check_necessary(inst); });
    if (cfg.run_sufficient && cfg.M() == 1)
      rec.sufficient =
          try_check(rec.sufficient_time, [&] { return feasibility::check_sufficient_single(inst); });
    if (cfg.slack)
      rec.slack = try_check(rec.slack_time,
                            [&] { return feasibility::check_sufficient_slack(inst, *cfg.slack); });

    const auto res = timed(rec.solve_time, [&] { return socp::synthesize(inst); });
    rec.status = res.status;
    rec.u = res.optimal() ? res.u : VectorXd::Zero(model.m());
    log.records.push_back(rec);

    if (res.status == socp::SolveStatus::Infeasible) {
      samples = std::make_shared<const dro::SampleSet>(samples->appended(data.draw_set(cfg.batch)));
      r = std::min(r, dro::radius_schedule(samples->size(), cfg.schedule));
      eps = std::min(eps, 1.0 / samples->size());
    }
    if ((k + 1) % cfg.redraw_period == 0) xi_true = truth.draw();
    x = step(model, x, model::ExtControl::from_input(rec.u), cfg.dt, xi_true);
  }
  return log;
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << "step,t,x1,x2,theta,status,v,omega,N,r,eps,solve_time_s,necessary,necessary_time_s,"
         "sufficient,sufficient_time_s,slack,slack_time_s,V,h\n";
  const auto old = out.precision(17);
  auto verdict = [&](const std::optional<feasibility::VerdictKind>& v, double seconds) {
    if (v) out << feasibility::to_string(*v) << ',' << seconds;
    else out << ',';
  };
  for (const auto& rec : records) {
    out << rec.step << ',' << rec.t << ',' << rec.x(0) << ',' << rec.x(1) << ',' << rec.x(2) << ',';
    if (rec.status) {
      out << socp::to_string(*rec.status) << ',' << rec.u(0) << ',' << rec.u(1) << ',';
    } else {
      out << ",,,";
    }
    out << rec.N << ',' << rec.r << ',' << rec.eps << ',';
    if (rec.status) out << rec.solve_time;
    out << ',';
    verdict(rec.necessary, rec.necessary_time);
    out << ',';
    verdict(rec.sufficient, rec.sufficient_time);
    out << ',';
    verdict(rec.slack, rec.slack_time);
    out << ',' << rec.V << ',';
    if (rec.h) out << *rec.h;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace drsafe::sim
