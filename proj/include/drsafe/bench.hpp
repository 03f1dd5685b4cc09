#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drsafe/dro.hpp"

namespace drsafe::bench {

enum class Method { Necessary, SufficientSingle, SufficientSlack, Solver };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

struct BenchRecord {
  std::string scenario;
  int N = 0;
  int M = 0;
  int m = 0;
  int k = 0;
  Method method = Method::Solver;
  std::string verdict;  // SolveStatus name for Solver, VerdictKind name otherwise
  double time_s = 0.0;  // median over repeats
  int repeats = 0;
};

using SampleDraw = std::function<dro::SampleSet(int count, std::uint64_t seed)>;

/// Standard normal samples in R^k.
SampleDraw gaussian_samples(int k);

struct SweepConfig {
  std::string scenario = "sweep";
  std::vector<int> Ns;
  std::vector<int> Ms;
  int repeats = 5;
  std::uint64_t seed = 1;
  // Calls are repeated inside one timed run until it lasts this long.
  double min_run_time = 2e-3;
  std::vector<Method> methods{Method::Necessary, Method::SufficientSingle,
                              Method::SufficientSlack, Method::Solver};
  SampleDraw draw;  // default: gaussian_samples(ambiguity.k)
};

/// Times every method on the same instance for each (N, M): the first M
/// constraints of `base` at `x`, N fresh samples, eps = min(eps, 1/N) and
/// r = min(r, radius_schedule(N)). The slack certificate uses the nominal
/// control as reference. SufficientSingle is skipped when M != 1.
/// Throws InvalidConfig for repeats < 3 or M larger than the template.
std::vector<BenchRecord> run_sweep(const dro::SynthesisProblem& base, const StateVec& x,
                                   const SweepConfig& cfg);

struct PrecisionSummary {
  int pairs = 0;
  int solver_infeasible = 0;
  int flagged_infeasible = 0;        // Necessary CertifiedInfeasible and Solver Infeasible
  std::optional<double> precision;   // flagged / solver_infeasible; empty when 0 / 0
  int undetermined = 0;              // Necessary Inconclusive
  int not_applicable = 0;
  int soundness_violations = 0;      // certified verdicts contradicted by the solver
  int slack_disagreements = 0;       // SufficientSlack CertifiedFeasible, Solver Infeasible
};

/// Pairs Necessary and Solver rows (and sufficient rows) by scenario, N, M,
/// m and k. Throws NoPairs when no Necessary row has a Solver partner.
PrecisionSummary precision_report(const std::vector<BenchRecord>& records);

/// Least-squares slope of log(time) against log(N) over the rows of one
/// method (and M) with N >= n_min. NaN with fewer than two distinct N.
double loglog_slope(const std::vector<BenchRecord>& records, Method method, int M,
                    int n_min = 0);

// Header "scenario,N,M,m,k,method,verdict,time_s,repeats".
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_csv(std::istream& in);

/// Log-log time against N, one line per (method, M).
void write_svg(std::ostream& out, const std::vector<BenchRecord>& records);

/// Random constant problems of the given shape whose constraint offsets
/// straddle the feasibility boundary, used for precision suites.
dro::SynthesisProblem random_problem(int m, int k, int M, std::uint64_t seed);

}  // namespace drsafe::bench
