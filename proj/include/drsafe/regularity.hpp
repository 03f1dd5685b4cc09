#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "drsafe/dro.hpp"

namespace drsafe::regularity {

/// True iff the reduced program stays Optimal with every per-sample cone
/// tightened by `margin`.
bool probe_strict_feasibility(const dro::SynthesisProblem& p, const StateVec& x,
                              double margin = 1e-6);

struct LipschitzReport {
  StateVec x0;
  std::vector<double> radii;  // strictly decreasing
  // max_d |u(x0 + rho d) - u(x0)| / rho over the Optimal probes; NaN when
  // every probe at that radius failed.
  std::vector<double> max_ratio_per_radius;
  std::vector<int> infeasible_probes_per_radius;
  int directions_per_radius = 0;
  bool strictly_feasible = false;

  // Header "radius,max_ratio,n_infeasible_probes".
  void write_csv(std::ostream& out) const;
};

/// `count` unit vectors in R^dim from a randomly shifted Halton sequence.
std::vector<Eigen::VectorXd> sphere_directions(int dim, int count, std::uint64_t seed);

/// Probes the control law on spheres of the given radii around x0. Probe
/// solves run on DRSAFE_THREADS worker threads (default: hardware
/// concurrency); the report does not depend on the thread count.
/// Throws InfeasibleProbe if x0 itself has no Optimal solution and
/// AllProbesInfeasible if no probe solve succeeds.
LipschitzReport estimate_point_lipschitz(const dro::SynthesisProblem& p, const StateVec& x0,
                                         const std::vector<double>& radii, int dirs,
                                         std::uint64_t seed);

}  // namespace drsafe::regularity
