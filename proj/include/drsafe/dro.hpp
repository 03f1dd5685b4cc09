#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "drsafe/model.hpp"
#include "drsafe/socp.hpp"

namespace drsafe::dro {

using model::ConstraintData;
using model::ExtControl;

/// N uncertainty samples in R^k, one per row. Immutable; appending samples
/// produces a new set.
class SampleSet {
 public:
  explicit SampleSet(Eigen::MatrixXd rows);

  int size() const { return static_cast<int>(rows_.rows()); }
  int dim() const { return static_cast<int>(rows_.cols()); }
  Eigen::VectorXd sample(int i) const { return rows_.row(i).transpose(); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  double max_norm() const;

  SampleSet appended(const SampleSet& more) const;
  SampleSet head(int count) const;

 private:
  Eigen::MatrixXd rows_;
};

/// One sample per line, k comma-separated columns. Blank lines and lines
/// starting with '#' are skipped.
SampleSet read_samples_csv(std::istream& in);
void write_samples_csv(std::ostream& out, const SampleSet& samples);

/// Wasserstein ball and risk parameters. c1, c2 and a are the tail
/// constants of the radius schedule; the defaults are placeholders, not
/// values calibrated for any particular distribution class.
struct AmbiguityConfig {
  double r = 0.0;
  double eps = 1.0;
  double eps_bar = 0.1;
  double c1 = 2.0;
  double c2 = 1.0;
  double a = 2.0;
  int k = 1;
};

/// inf_t [ mean((v_i + t)_+) / eps - t ], computed exactly by checking the
/// breakpoints t = -v_i of the piecewise-linear objective.
double cvar_empirical(std::span<const double> values, double eps);

/// Radius for which the ball around the empirical distribution of N
/// samples contains the truth with probability >= 1 - eps_bar.
double radius_schedule(int n_samples, const AmbiguityConfig& cfg);

using ConstraintField = std::function<ConstraintData(const StateVec&)>;
using NominalController = std::function<ExtControl(const StateVec&)>;

/// A synthesis problem evaluated at one state.
struct ProblemInstance {
  std::vector<ConstraintData> constraints;
  ExtControl nominal;
  AmbiguityConfig ambiguity;
  std::shared_ptr<const SampleSet> samples;

  int M() const { return static_cast<int>(constraints.size()); }
  int m() const { return nominal.m(); }
  int k() const { return samples->dim(); }
  int N() const { return samples->size(); }

  // Checks dims and the eps <= 1/N scope; throws DimensionMismatch or
  // EpsTooLarge.
  void validate() const;
};

/// Each constraint divided by the largest entry of its input part (q, R
/// rows 1..m), or of the whole block when that part is zero. Constraints
/// are positively homogeneous in (q, R), so the feasible set is unchanged;
/// this is the instance the solver actually sees.
ProblemInstance normalized(const ProblemInstance& inst);

/// State-dependent synthesis problem: constraint data and nominal control
/// are fields over the state.
struct SynthesisProblem {
  std::vector<ConstraintField> constraints;
  NominalController nominal;
  AmbiguityConfig ambiguity;
  std::shared_ptr<const SampleSet> samples;

  ProblemInstance at(const StateVec& x) const;

  static SynthesisProblem constant(std::vector<ConstraintData> constraints, ExtControl nominal,
                                   AmbiguityConfig ambiguity, SampleSet samples);
};

/// |A u + b| <= c^T u + d over the input u in R^m.
struct SocConstraint {
  Eigen::MatrixXd A;  // k x m
  Eigen::VectorXd b;  // k
  Eigen::VectorXd c;  // m
  double d = 0.0;

  // c^T u + d - |A u + b|; >= 0 iff satisfied.
  double margin(const Eigen::VectorXd& u) const;
};

/// Per-sample cone constraints r|R^T u| + eps u^T (q + R xi_i) <= 0 whose
/// conjunction over i is constraint l of the DRO program.
std::vector<SocConstraint> reduce_to_soc(const ProblemInstance& p, int l);

/// Variable layout of the epigraph-form program.
struct EpigraphLayout {
  int u = 0;       // first of m inputs
  int y = 0;       // epigraph of |u - k(x)|^2
  int t = 0;       // first of M CVaR thresholds
  int s = 0;       // first of M*N hinge variables, index s + l*N + i
  int n_vars = 0;
};

struct EpigraphProgram {
  socp::ConeProgram program;
  EpigraphLayout layout;
};

/// The epigraph DRO program: min y subject to, for each l,
///   r|R_l^T u| + mean_i s_{l,i} - eps t_l <= 0,
///   s_{l,i} >= G_l(u, xi_i) + t_l,  s_{l,i} >= 0,
/// and y + 1 >= |(2(u - k), y - 1)|.
EpigraphProgram assemble_epigraph_socp(const ProblemInstance& p);

/// Reduced form over (u, y): all M*N per-sample cones from reduce_to_soc,
/// each tightened by `margin` on its right-hand side, plus the epigraph cone.
socp::ConeProgram assemble_reduced_socp(const ProblemInstance& p, double margin = 0.0);

}  // namespace drsafe::dro
