#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "config.hpp"
#include "drsafe/bench.hpp"
#include "drsafe/error.hpp"
#include "drsafe/feasibility.hpp"
#include "drsafe/plot.hpp"
#include "drsafe/regularity.hpp"
#include "drsafe/sim.hpp"
#include "drsafe/synthesis.hpp"

namespace drsafe::cli {

namespace {

RunConfig load(const CommandOptions& opts) {
  RunConfig cfg = load_config(opts.config);
  if (opts.seed) cfg.set_seed(*opts.seed);
  if (opts.out) cfg.out_dir = *opts.out;
  return cfg;
}

StateVec parse_state(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos)
      throw Error(ErrorCode::ParseError, "--x: cannot read '" + cell + "' as a number");
    values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::ParseError, "--x: no values");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

StateVec state(const RunConfig& cfg, const CommandOptions& opts) {
  const int n = cfg.model == ModelKind::Unicycle ? 3 : -1;
  if (!opts.x) return n == 3 ? cfg.scenario.initial : StateVec::Zero(1);
  StateVec x = parse_state(*opts.x);
  if (n > 0 && x.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("--x has {} values, the unicycle state has {}", x.size(), n));
  return x;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  const auto path = cfg.out_dir / name;
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return f;
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt::format("{:#.9g}", v(i));
  return out;
}

void write_path_svg(std::ostream& out, const RunConfig& cfg, const sim::TrajectoryLog& log) {
  std::vector<plot::Series> series(1);
  series[0].label = "path";
  for (const auto& r : log.records) {
    series[0].x.push_back(r.x(0));
    series[0].y.push_back(r.x(1));
  }
  plot::Series goal{"goal", {cfg.scenario.goal.x()}, {cfg.scenario.goal.y()}};
  for (double d : {-0.1, 0.1}) {
    goal.x.push_back(cfg.scenario.goal.x() + d);
    goal.y.push_back(cfg.scenario.goal.y() + d);
    goal.x.push_back(cfg.scenario.goal.x());
    goal.y.push_back(cfg.scenario.goal.y());
  }
  series.push_back(goal);
  if (const auto& o = cfg.scenario.obstacle) {
    plot::Series disk{"obstacle", {}, {}};
    for (int i = 0; i <= 96; ++i) {
      const double a = 2.0 * std::numbers::pi * i / 96.0;
      disk.x.push_back(o->center.x() + o->radius * std::cos(a));
      disk.y.push_back(o->center.y() + o->radius * std::sin(a));
    }
    series.push_back(disk);
  }
  plot::write_line_chart(out, series,
                         {.title = "closed-loop path", .x_label = "x1", .y_label = "x2",
                          .equal_aspect = true});
}

}  // namespace

int cmd_solve(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  const auto res = socp::synthesize(cfg.problem(), state(cfg, opts));
  if (res.status == socp::SolveStatus::Infeasible) {
    out << "INFEASIBLE\n";
    return 2;
  }
  if (!res.optimal())
    throw Error(ErrorCode::InvalidConfig,
                "solver stopped with status " + std::string(socp::to_string(res.status)));
  out << join(res.u) << '\n';
  return 0;
}

int cmd_check(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  const auto inst = cfg.problem().at(state(cfg, opts));
  feasibility::FeasibilityVerdict v;
  if (opts.which == "necessary") {
    v = feasibility::check_necessary(inst);
  } else if (opts.which == "sufficient1") {
    v = feasibility::check_sufficient_single(inst);
  } else if (opts.which == "sufficient3") {
    if (!cfg.slack)
      throw Error(ErrorCode::ConfigError, "sufficient3 needs certificates.slack in the config");
    v = feasibility::check_sufficient_slack(inst, *cfg.slack);
  } else {
    throw Error(ErrorCode::InvalidConfig,
                "--which must be necessary, sufficient1 or sufficient3, got '" + opts.which + "'");
  }
  out << feasibility::to_string(v.kind);
  if (v.violated) out << " (" << to_string(*v.violated) << ")";
  out << '\n';
  switch (v.kind) {
    case feasibility::VerdictKind::CertifiedFeasible: return 0;
    case feasibility::VerdictKind::CertifiedInfeasible: return 2;
    case feasibility::VerdictKind::Inconclusive: return 3;
    case feasibility::VerdictKind::NotApplicable: return 4;
  }
  return 1;
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  if (cfg.model != ModelKind::Unicycle)
    throw Error(ErrorCode::ConfigError, "simulate needs the unicycle model");
  const auto log = sim::run_closed_loop(cfg.scenario);
  {
    auto f = open_output(cfg, "trajectory.csv");
    log.write_csv(f);
  }
  if (opts.svg) {
    auto f = open_output(cfg, "trajectory.svg");
    write_path_svg(f, cfg, log);
  }

  int optimal = 0, infeasible = 0, other = 0;
  double min_h = std::numeric_limits<double>::infinity();
  for (const auto& r : log.records) {
    if (r.h) min_h = std::min(min_h, *r.h);
    if (!r.status) continue;
    if (*r.status == socp::SolveStatus::Optimal) ++optimal;
    else if (*r.status == socp::SolveStatus::Infeasible) ++infeasible;
    else ++other;
  }
  const auto& last = log.records.back();
  out << fmt::format("steps {} optimal {} infeasible {} other {}\n", log.records.size() - 1,
                     optimal, infeasible, other);
  out << fmt::format("final state {}\n", join(last.x));
  out << fmt::format("distance to goal {:.6g}\n", (last.x.head<2>() - cfg.scenario.goal).norm());
  if (std::isfinite(min_h)) out << fmt::format("min barrier value {:.6g}\n", min_h);
  out << fmt::format("final N {}\n", last.N);
  return 0;
}

int cmd_bench(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  std::vector<bench::BenchRecord> records;
  if (cfg.random_suite) {
    const auto& s = *cfg.random_suite;
    std::mt19937_64 seeds(cfg.seed);
    for (int i = 0; i < s.instances; ++i) {
      bench::SweepConfig sweep = cfg.sweep;
      sweep.scenario = fmt::format("{}-{}", cfg.sweep.scenario, i);
      sweep.seed = seeds();
      sweep.draw = bench::gaussian_samples(s.k);
      const auto rs = bench::run_sweep(bench::random_problem(s.m, s.k, s.M, seeds()),
                                       StateVec::Zero(1), sweep);
      records.insert(records.end(), rs.begin(), rs.end());
    }
  } else {
    bench::SweepConfig sweep = cfg.sweep;
    sweep.draw = cfg.sample_draw();
    records = bench::run_sweep(cfg.problem(), state(cfg, opts), sweep);
  }
  {
    auto f = open_output(cfg, "bench.csv");
    bench::write_csv(f, records);
  }
  if (opts.svg) {
    auto f = open_output(cfg, "bench.svg");
    bench::write_svg(f, records);
  }

  out << fmt::format("records {}\n", records.size());
  for (bench::Method m : cfg.sweep.methods)
    for (int big_m : cfg.sweep.Ms) {
      const double slope = bench::loglog_slope(records, m, big_m);
      if (std::isfinite(slope))
        out << fmt::format("slope {} M={} {:.3f}\n", bench::to_string(m), big_m, slope);
    }
  try {
    const auto p = bench::precision_report(records);
    out << fmt::format("pairs {} solver_infeasible {} flagged {} undetermined {} not_applicable {}\n",
                       p.pairs, p.solver_infeasible, p.flagged_infeasible, p.undetermined,
                       p.not_applicable);
    out << "precision " << (p.precision ? fmt::format("{:.4f}", *p.precision) : "NA") << '\n';
    out << fmt::format("soundness_violations {} slack_disagreements {}\n", p.soundness_violations,
                       p.slack_disagreements);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoPairs) throw;
  }
  return 0;
}

int cmd_lipschitz(const CommandOptions& opts, std::ostream& out) {
  const RunConfig cfg = load(opts);
  const auto report = regularity::estimate_point_lipschitz(
      cfg.problem(), state(cfg, opts), cfg.lipschitz_radii, cfg.lipschitz_directions, cfg.seed);
  {
    auto f = open_output(cfg, "lipschitz.csv");
    report.write_csv(f);
  }
  out << "strictly_feasible " << (report.strictly_feasible ? "yes" : "no") << '\n';
  for (std::size_t i = 0; i < report.radii.size(); ++i)
    out << fmt::format("radius {:.3g} max_ratio {:.9g} infeasible_probes {}\n", report.radii[i],
                       report.max_ratio_per_radius[i], report.infeasible_probes_per_radius[i]);
  return 0;
}

}  // namespace drsafe::cli
