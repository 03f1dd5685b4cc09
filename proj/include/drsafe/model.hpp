#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace drsafe {

using StateVec = Eigen::VectorXd;

namespace model {

using MatrixField = std::function<Eigen::MatrixXd(const StateVec&)>;

/// Control-affine system with additive, linearly weighted perturbations:
///   xdot = (F(x) + sum_j W_j(x) xi_j) [1; u]
/// Every field returns an n x (m+1) matrix; column 0 multiplies the
/// constant 1 of the extended control, i.e. it is the drift.
class UncertainAffineModel {
 public:
  UncertainAffineModel(int n, int m, MatrixField nominal, std::vector<MatrixField> perturbations);

  int n() const { return n_; }
  int m() const { return m_; }
  int k() const { return static_cast<int>(perturbations_.size()); }

  Eigen::MatrixXd nominal(const StateVec& x) const;
  Eigen::MatrixXd perturbation(int j, const StateVec& x) const;

  // F(x) + sum_j W_j(x) xi_j
  Eigen::MatrixXd realized(const StateVec& x, const Eigen::VectorXd& xi) const;

 private:
  void check_shape(const Eigen::MatrixXd& mat, const char* what) const;

  int n_;
  int m_;
  MatrixField nominal_;
  std::vector<MatrixField> perturbations_;
};

/// Extended control [1; u]. The leading 1 is enforced on construction.
class ExtControl {
 public:
  static ExtControl from_input(const Eigen::VectorXd& u);
  // Throws InvalidConfig unless full(0) == 1 exactly.
  static ExtControl from_full(const Eigen::VectorXd& full);

  int m() const { return static_cast<int>(full_.size()) - 1; }
  const Eigen::VectorXd& full() const { return full_; }
  Eigen::VectorXd input() const { return full_.tail(full_.size() - 1); }

 private:
  explicit ExtControl(Eigen::VectorXd full) : full_(std::move(full)) {}
  Eigen::VectorXd full_;
};

using ScalarFunction = std::function<double(double)>;

// s -> gain * s
ScalarFunction linear_class_k(double gain = 1.0);

enum class CertificateKind { Barrier, Lyapunov };

struct CertificateFunction {
  CertificateKind kind;
  std::function<double(const StateVec&)> value;
  std::function<Eigen::VectorXd(const StateVec&)> gradient;
  ScalarFunction class_k;
  std::string label;
};

// h(x) = |p - center|^2 - radius^2 over the position coordinates (x_0, x_1).
CertificateFunction disk_barrier(const Eigen::Vector2d& center, double radius, double rate,
                                 int n);
// V(x) = |p - goal|^2 over the position coordinates (x_0, x_1).
CertificateFunction goal_lyapunov(const Eigen::Vector2d& goal, double rate, int n);

/// One affine-in-(u, xi) constraint G(x, u, xi) = u^T q + u^T R xi <= 0,
/// evaluated at a fixed state.
struct ConstraintData {
  Eigen::VectorXd q;  // m+1
  Eigen::MatrixXd R;  // (m+1) x k
  std::string label;

  int m() const { return static_cast<int>(q.size()) - 1; }
  int k() const { return static_cast<int>(R.cols()); }
};

/// Builds (q, R) so that G <= 0 is the barrier condition hdot >= -alpha(h)
/// (negated) or the Lyapunov condition Vdot <= -gamma(V).
ConstraintData assemble_constraint(const UncertainAffineModel& model,
                                   const CertificateFunction& cert, const StateVec& x);

double eval_G(const ConstraintData& c, const ExtControl& u, const Eigen::VectorXd& xi);

/// Unicycle kinematics of a point a distance `a` ahead of the wheel axis,
/// state (x1, x2, theta), controls (v, omega), three perturbation fields.
UncertainAffineModel unicycle_model(double a);

}  // namespace model
}  // namespace drsafe
