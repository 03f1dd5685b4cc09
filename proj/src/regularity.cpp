#include "drsafe/regularity.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "drsafe/error.hpp"
#include "drsafe/synthesis.hpp"

namespace drsafe::regularity {

using Eigen::VectorXd;

bool probe_strict_feasibility(const dro::SynthesisProblem& p, const StateVec& x, double margin) {
  const auto inst = p.at(x);
  inst.validate();
  return socp::solve(dro::assemble_reduced_socp(inst, margin)).status == socp::SolveStatus::Optimal;
}

void LipschitzReport::write_csv(std::ostream& out) const {
  out << "radius,max_ratio,n_infeasible_probes\n";
  const auto old = out.precision(17);
  for (std::size_t j = 0; j < radii.size(); ++j)
    out << radii[j] << ',' << max_ratio_per_radius[j] << ',' << infeasible_probes_per_radius[j]
        << '\n';
  out.precision(old);
}

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double scale = 1.0 / base;
  for (; index > 0; index /= base, scale /= base) result += scale * static_cast<double>(index % base);
  return result;
}

int worker_count(std::size_t jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DRSAFE_THREADS")) n = std::atoi(env);
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

template <class Job>
void run_parallel(std::size_t jobs, Job job) {
  const int workers = worker_count(jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<VectorXd> sphere_directions(int dim, int count, std::uint64_t seed) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes)))
    throw Error(ErrorCode::InvalidConfig, "sphere_directions supports dim 1.." +
                                              std::to_string(std::size(kPrimes)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit;
  VectorXd shift(dim);
  for (int j = 0; j < dim; ++j) shift(j) = unit(rng);

  std::vector<VectorXd> out;
  out.reserve(count);
  for (std::uint64_t index = 1; static_cast<int>(out.size()) < count; ++index) {
    VectorXd v(dim);
    for (int j = 0; j < dim; ++j)
      v(j) = 2.0 * std::fmod(radical_inverse(index, kPrimes[j]) + shift(j), 1.0) - 1.0;
    const double norm = v.norm();
    if (norm > 1.0 || norm < 1e-3) continue;
    out.push_back(v / norm);
  }
  return out;
}

LipschitzReport estimate_point_lipschitz(const dro::SynthesisProblem& p, const StateVec& x0,
                                         const std::vector<double>& radii, int dirs,
                                         std::uint64_t seed) {
  if (dirs < 1) throw Error(ErrorCode::InvalidConfig, "need at least one direction");
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (!(radii[j] > 0.0) || (j > 0 && !(radii[j] < radii[j - 1])))
      throw Error(ErrorCode::InvalidConfig, "radii must be positive and strictly decreasing");

  LipschitzReport report;
  report.x0 = x0;
  report.radii = radii;
  report.directions_per_radius = dirs;
  report.strictly_feasible = probe_strict_feasibility(p, x0);

  const auto base = socp::synthesize(p, x0);
  if (!base.optimal()) throw Error(ErrorCode::InfeasibleProbe, "no optimal control at x0");

  const auto directions = sphere_directions(static_cast<int>(x0.size()), dirs, seed);
  const std::size_t jobs = radii.size() * directions.size();
  std::vector<double> ratio(jobs, std::numeric_limits<double>::quiet_NaN());
  run_parallel(jobs, [&](std::size_t job) {
    const double rho = radii[job / directions.size()];
    const auto res = socp::synthesize(p, x0 + rho * directions[job % directions.size()]);
    if (res.optimal()) ratio[job] = (res.u - base.u).norm() / rho;
  });

  int successes = 0;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    double worst = std::numeric_limits<double>::quiet_NaN();
    int failed = 0;
    for (std::size_t d = 0; d < directions.size(); ++d) {
      const double value = ratio[j * directions.size() + d];
      if (std::isnan(value)) {
        ++failed;
      } else {
        worst = std::isnan(worst) ? value : std::max(worst, value);
        ++successes;
      }
    }
    report.max_ratio_per_radius.push_back(worst);
    report.infeasible_probes_per_radius.push_back(failed);
  }
  if (successes == 0 && jobs > 0)
    throw Error(ErrorCode::AllProbesInfeasible, "every probe solve failed");
  return report;
}

}  // namespace drsafe::regularity
