#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsafe/dro.hpp"
#include "drsafe/socp.hpp"

namespace drsafe::socp {

enum class SynthesisForm { Epigraph, Reduced };

std::string to_string(SynthesisForm form);

struct ControlResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd u;                      // empty unless Optimal
  std::optional<model::ExtControl> u_ext;  // [1; u] when Optimal
  double objective = 0.0;                 // |u - k(x)|^2 when Optimal
  bool polished = false;                  // u was refined to a verified KKT point
  ConeSolution solution;                  // raw solver output, including certificates
  SynthesisForm form = SynthesisForm::Epigraph;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Closest control to the nominal one satisfying every DRO constraint.
/// With `polish`, an Optimal interior-point answer is refined by Newton's
/// method on the active per-sample cones and kept only if it verifies as a
/// KKT point of the projection. Throws EpsTooLarge when eps > 1/N.
ControlResult synthesize(const dro::ProblemInstance& inst, SynthesisForm form = SynthesisForm::Epigraph,
                         const SolverOptions& opts = {}, bool polish = true);
ControlResult synthesize(const dro::SynthesisProblem& problem, const StateVec& x,
                         SynthesisForm form = SynthesisForm::Epigraph,
                         const SolverOptions& opts = {}, bool polish = true);

/// Projection of `target` onto the intersection of the cone constraints,
/// started from the approximate answer `start`. Returns nothing when the
/// active set cannot be resolved or the result fails the KKT check.
std::optional<Eigen::VectorXd> polish_projection(const std::vector<dro::SocConstraint>& cones,
                                                 const Eigen::VectorXd& target,
                                                 const Eigen::VectorXd& start);

}  // namespace drsafe::socp
