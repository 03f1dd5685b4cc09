#include "drsafe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "drsafe/error.hpp"
#include "drsafe/feasibility.hpp"
#include "drsafe/plot.hpp"
#include "drsafe/synthesis.hpp"

namespace drsafe::bench {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view kHeader = "scenario,N,M,m,k,method,verdict,time_s,repeats";

struct Timed {
  std::string verdict;
  double seconds = 0.0;
};

// Warm-up call for the verdict, then `repeats` runs, each looping the call
// until it lasts min_run_time; the per-call time of the median run.
template <typename Call>
Timed time_method(Call&& call, int repeats, double min_run_time) {
  Timed out{call(), 0.0};
  std::vector<double> runs;
  for (int r = 0; r < repeats; ++r) {
    long calls = 0;
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      call();
      ++calls;
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < min_run_time);
    runs.push_back(elapsed / static_cast<double>(calls));
  }
  std::nth_element(runs.begin(), runs.begin() + runs.size() / 2, runs.end());
  out.seconds = std::max(runs[runs.size() / 2], std::numeric_limits<double>::min());
  return out;
}

feasibility::SlackCertificate nominal_slack(const dro::ProblemInstance& inst) {
  feasibility::SlackCertificate cert;
  cert.B = std::max(1.0, inst.nominal.full().norm());
  for (const auto& c : inst.constraints) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < inst.N(); ++i)
      worst = std::max(worst, model::eval_G(c, inst.nominal, inst.samples->sample(i)));
    cert.S.push_back(std::max(0.0, -worst));
  }
  return cert;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

using PairKey = std::tuple<std::string, int, int, int, int>;

PairKey key_of(const BenchRecord& r) { return {r.scenario, r.N, r.M, r.m, r.k}; }

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Necessary: return "Necessary";
    case Method::SufficientSingle: return "SufficientSingle";
    case Method::SufficientSlack: return "SufficientSlack";
    case Method::Solver: return "Solver";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  for (Method m : {Method::Necessary, Method::SufficientSingle, Method::SufficientSlack,
                   Method::Solver})
    if (to_string(m) == s) return m;
  throw Error(ErrorCode::ParseError, "unknown method '" + std::string(s) + "'");
}

SampleDraw gaussian_samples(int k) {
  return [k](int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXd rows(count, k);
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < k; ++j) rows(i, j) = g(rng);
    return dro::SampleSet(std::move(rows));
  };
}

std::vector<BenchRecord> run_sweep(const dro::SynthesisProblem& base, const StateVec& x,
                                   const SweepConfig& cfg) {
  if (cfg.repeats < 3) throw Error(ErrorCode::InvalidConfig, "repeats must be at least 3");
  if (cfg.Ns.empty() || cfg.Ms.empty())
    throw Error(ErrorCode::InvalidConfig, "sweep needs at least one N and one M");
  const SampleDraw draw = cfg.draw ? cfg.draw : gaussian_samples(base.ambiguity.k);

  std::mt19937_64 seeds(cfg.seed);
  std::vector<BenchRecord> out;
  for (int big_m : cfg.Ms) {
    if (big_m < 1 || big_m > static_cast<int>(base.constraints.size()))
      throw Error(ErrorCode::InvalidConfig,
                  fmt::format("M = {} outside 1..{}", big_m, base.constraints.size()));
    for (int n : cfg.Ns) {
      if (n < 1) throw Error(ErrorCode::InvalidConfig, "N must be positive");
      dro::SynthesisProblem p = base;
      p.constraints.resize(big_m);
      p.samples = std::make_shared<const dro::SampleSet>(draw(n, seeds()));
      p.ambiguity.eps = std::min(p.ambiguity.eps, 1.0 / n);
      p.ambiguity.r = std::min(p.ambiguity.r, dro::radius_schedule(n, p.ambiguity));
      const dro::ProblemInstance inst = p.at(x);
      inst.validate();
      const auto cert = nominal_slack(inst);

      for (Method method : cfg.methods) {
        Timed t;
        switch (method) {
          case Method::Necessary:
            t = time_method(
                [&] { return std::string(to_string(feasibility::check_necessary(inst).kind)); },
                cfg.repeats, cfg.min_run_time);
            break;
          case Method::SufficientSingle:
            if (big_m != 1) continue;
            t = time_method(
                [&] {
                  return std::string(to_string(feasibility::check_sufficient_single(inst).kind));
                },
                cfg.repeats, cfg.min_run_time);
            break;
          case Method::SufficientSlack:
            t = time_method(
                [&] {
                  return std::string(
                      to_string(feasibility::check_sufficient_slack(inst, cert).kind));
                },
                cfg.repeats, cfg.min_run_time);
            break;
          case Method::Solver:
            t = time_method(
                [&] {
                  const auto res =
                      socp::synthesize(inst, socp::SynthesisForm::Epigraph, {}, false);
                  return std::string(socp::to_string(res.status));
                },
                cfg.repeats, cfg.min_run_time);
            break;
        }
        out.push_back(BenchRecord{cfg.scenario, n, big_m, inst.m(), inst.k(), method, t.verdict,
                                  t.seconds, cfg.repeats});
      }
    }
  }
  return out;
}

PrecisionSummary precision_report(const std::vector<BenchRecord>& records) {
  std::map<PairKey, const BenchRecord*> solver;
  for (const auto& r : records)
    if (r.method == Method::Solver) solver[key_of(r)] = &r;

  PrecisionSummary s;
  for (const auto& r : records) {
    if (r.method == Method::Solver) continue;
    const auto it = solver.find(key_of(r));
    if (it == solver.end()) continue;
    const bool infeasible = it->second->verdict == "Infeasible";
    const bool optimal = it->second->verdict == "Optimal";
    switch (r.method) {
      case Method::Necessary:
        ++s.pairs;
        s.solver_infeasible += infeasible;
        if (r.verdict == "CertifiedInfeasible") {
          s.flagged_infeasible += infeasible;
          s.soundness_violations += optimal;
        }
        s.undetermined += r.verdict == "Inconclusive";
        s.not_applicable += r.verdict == "NotApplicable";
        break;
      case Method::SufficientSingle:
        s.soundness_violations += r.verdict == "CertifiedFeasible" && infeasible;
        break;
      case Method::SufficientSlack:
        s.slack_disagreements += r.verdict == "CertifiedFeasible" && infeasible;
        break;
      case Method::Solver: break;
    }
  }
  if (s.pairs == 0) throw Error(ErrorCode::NoPairs, "no Necessary row has a matching Solver row");
  if (s.solver_infeasible > 0)
    s.precision = static_cast<double>(s.flagged_infeasible) / s.solver_infeasible;
  return s;
}

double loglog_slope(const std::vector<BenchRecord>& records, Method method, int M, int n_min) {
  std::vector<double> lx, ly;
  for (const auto& r : records)
    if (r.method == method && r.M == M && r.N >= n_min && r.time_s > 0) {
      lx.push_back(std::log(static_cast<double>(r.N)));
      ly.push_back(std::log(r.time_s));
    }
  const auto n = static_cast<double>(lx.size());
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / n, my += ly[i] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kHeader << '\n';
  for (const auto& r : records)
    out << fmt::format("{},{},{},{},{},{},{},{:.9e},{}\n", r.scenario, r.N, r.M, r.m, r.k,
                       to_string(r.method), r.verdict, r.time_s, r.repeats);
}

std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw Error(ErrorCode::ParseError, "expected header '" + std::string(kHeader) + "'");
  std::vector<BenchRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 9)
      throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 9 fields", line_no));
    try {
      out.push_back(BenchRecord{cells[0], std::stoi(cells[1]), std::stoi(cells[2]),
                                std::stoi(cells[3]), std::stoi(cells[4]),
                                method_from_string(cells[5]), cells[6], std::stod(cells[7]),
                                std::stoi(cells[8])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: bad number", line_no));
    }
  }
  return out;
}

void write_svg(std::ostream& out, const std::vector<BenchRecord>& records) {
  std::map<std::pair<Method, int>, plot::Series> lines;
  for (const auto& r : records) {
    auto& s = lines[{r.method, r.M}];
    s.label = fmt::format("{} M={}", to_string(r.method), r.M);
    s.x.push_back(r.N);
    s.y.push_back(r.time_s);
  }
  std::vector<plot::Series> series;
  for (auto& [key, s] : lines) series.push_back(std::move(s));
  plot::write_line_chart(out, series,
                         {.title = "time per call", .x_label = "N", .y_label = "seconds",
                          .log_x = true, .log_y = true});
}

dro::SynthesisProblem random_problem(int m, int k, int M, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> shift(-3.0, 3.0);
  std::vector<model::ConstraintData> cons;
  for (int l = 0; l < M; ++l) {
    Eigen::VectorXd q(m + 1);
    Eigen::MatrixXd R(m + 1, k);
    for (int i = 0; i <= m; ++i) {
      q(i) = g(rng);
      for (int j = 0; j < k; ++j) R(i, j) = g(rng);
    }
    q(0) = shift(rng);
    cons.push_back(model::ConstraintData{q, R, "c" + std::to_string(l)});
  }
  dro::AmbiguityConfig amb;
  amb.r = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  amb.k = k;
  return dro::SynthesisProblem::constant(std::move(cons),
                                         model::ExtControl::from_input(Eigen::VectorXd::Zero(m)),
                                         amb, gaussian_samples(k)(1, seed));
}

}  // namespace drsafe::bench
