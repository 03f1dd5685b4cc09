#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace drsafe::socp {

enum class ConeKind { NonNegative, SecondOrder };

/// One cone block. A SecondOrder block of dimension d constrains its slice
/// (s0, s1) of the slack to s0 >= |s1|; a NonNegative block is d
/// independent sign constraints.
struct Cone {
  ConeKind kind;
  int dim;
};

/// Standard form:  minimize c^T x  subject to  b - A x in K,
/// where K is the product of `cones` in order (row blocks of A).
struct ConeProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<Cone> cones;

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_rows() const { return static_cast<int>(b.size()); }
  int num_cones() const { return static_cast<int>(cones.size()); }

  // Throws DimensionMismatch / InvalidConfig when the invariants fail.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIters, NumericalFailure };

std::string_view to_string(SolveStatus s);

struct SolverOptions {
  int max_iters = 200;
  double feas_tol = 1e-8;    // relative primal/dual residual
  double gap_tol = 1e-8;     // relative duality gap
  double infeas_tol = 1e-8;  // certificate residual
  double step_fraction = 0.99;
  // When progress breaks down, the best iterate is still reported if it
  // meets the tolerances relaxed by this factor.
  double inaccurate_factor = 1e3;
};

struct ConeSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd primal;  // x (Optimal); improving ray for Unbounded
  Eigen::VectorXd slack;   // s = b - A x
  Eigen::VectorXd dual;    // z (Optimal); infeasibility certificate for Infeasible
  double objective = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double certificate_residual = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  bool reduced_accuracy = false;  // status rests on the relaxed tolerances
};

/// Holds the per-solve scratch; one solve at a time per instance.
class SocpSolver {
 public:
  explicit SocpSolver(SolverOptions opts = {}) : opts_(opts) {}
  ConeSolution solve(const ConeProgram& program);
  const SolverOptions& options() const { return opts_; }

 private:
  SolverOptions opts_;
};

ConeSolution solve(const ConeProgram& program, const SolverOptions& opts = {});

struct KktReport {
  double primal_residual;    // |A x + s - b| / (1 + |b|)
  double dual_residual;      // |A^T z + c| / (1 + |c|)
  double max_block_complementarity;  // max over blocks |s_b^T z_b| / (1 + |objective|)
  double min_cone_margin;    // most negative cone membership margin of s, z
};

KktReport kkt_report(const ConeProgram& program, const ConeSolution& sol);

// Membership margin of v in cone (>= 0 means inside): min entry for
// NonNegative, v0 - |v1| for SecondOrder.
double cone_margin(const Cone& cone, const Eigen::Ref<const Eigen::VectorXd>& v);

/// Plain-text dump. Layout:
///   drsafe-socp 1
///   vars <n> rows <r> cones <count>
///   one line per cone: "L <dim>" or "Q <dim>"
///   A            then r lines of n values
///   b            then one line of r values
///   c            then one line of n values
void write_program(std::ostream& out, const ConeProgram& program);
ConeProgram read_program(std::istream& in);

}  // namespace drsafe::socp
