#include "drsafe/model.hpp"

#include <cmath>

#include "drsafe/error.hpp"

namespace drsafe::model {

UncertainAffineModel::UncertainAffineModel(int n, int m, MatrixField nominal,
                                           std::vector<MatrixField> perturbations)
    : n_(n), m_(m), nominal_(std::move(nominal)), perturbations_(std::move(perturbations)) {
  if (n < 1 || m < 0) throw Error(ErrorCode::InvalidConfig, "model needs n >= 1 and m >= 0");
  if (!nominal_) throw Error(ErrorCode::InvalidConfig, "model needs a nominal field");
  for (const auto& w : perturbations_) {
    if (!w) throw Error(ErrorCode::InvalidConfig, "empty perturbation field");
  }
}

void UncertainAffineModel::check_shape(const Eigen::MatrixXd& mat, const char* what) const {
  if (mat.rows() != n_ || mat.cols() != m_ + 1) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be n x (m+1) = " + std::to_string(n_) + "x" +
                    std::to_string(m_ + 1));
  }
}

Eigen::MatrixXd UncertainAffineModel::nominal(const StateVec& x) const {
  if (x.size() != n_) throw Error(ErrorCode::DimensionMismatch, "state length != n");
  Eigen::MatrixXd f = nominal_(x);
  check_shape(f, "F(x)");
  return f;
}

Eigen::MatrixXd UncertainAffineModel::perturbation(int j, const StateVec& x) const {
  if (x.size() != n_) throw Error(ErrorCode::DimensionMismatch, "state length != n");
  Eigen::MatrixXd w = perturbations_.at(static_cast<std::size_t>(j))(x);
  check_shape(w, "W_j(x)");
  return w;
}

Eigen::MatrixXd UncertainAffineModel::realized(const StateVec& x, const Eigen::VectorXd& xi) const {
  if (xi.size() != k()) throw Error(ErrorCode::DimensionMismatch, "xi length != k");
  Eigen::MatrixXd out = nominal(x);
  for (int j = 0; j < k(); ++j) out += perturbation(j, x) * xi(j);
  return out;
}

ExtControl ExtControl::from_input(const Eigen::VectorXd& u) {
  Eigen::VectorXd full(u.size() + 1);
  full(0) = 1.0;
  full.tail(u.size()) = u;
  return ExtControl(std::move(full));
}

ExtControl ExtControl::from_full(const Eigen::VectorXd& full) {
  if (full.size() < 1 || full(0) != 1.0) {
    throw Error(ErrorCode::InvalidConfig, "extended control must start with exactly 1");
  }
  return ExtControl(full);
}

ScalarFunction linear_class_k(double gain) {
  if (!(gain > 0.0)) throw Error(ErrorCode::InvalidConfig, "class-K gain must be positive");
  return [gain](double s) { return gain * s; };
}

CertificateFunction disk_barrier(const Eigen::Vector2d& center, double radius, double rate,
                                 int n) {
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "disk barrier needs n >= 2");
  const double r2 = radius * radius;
  return CertificateFunction{
      CertificateKind::Barrier,
      [center, r2](const StateVec& x) { return (x.head<2>() - center).squaredNorm() - r2; },
      [center, n](const StateVec& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        g.head<2>() = 2.0 * (x.head<2>() - center);
        return g;
      },
      linear_class_k(rate), "cbf"};
}

CertificateFunction goal_lyapunov(const Eigen::Vector2d& goal, double rate, int n) {
  if (n < 2) throw Error(ErrorCode::DimensionMismatch, "goal Lyapunov needs n >= 2");
  return CertificateFunction{
      CertificateKind::Lyapunov,
      [goal](const StateVec& x) { return (x.head<2>() - goal).squaredNorm(); },
      [goal, n](const StateVec& x) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        g.head<2>() = 2.0 * (x.head<2>() - goal);
        return g;
      },
      linear_class_k(rate), "clf"};
}

ConstraintData assemble_constraint(const UncertainAffineModel& model,
                                   const CertificateFunction& cert, const StateVec& x) {
  if (!x.allFinite()) throw Error(ErrorCode::InvalidConfig, "state must be finite");
  const Eigen::VectorXd grad = cert.gradient(x);
  if (grad.size() != model.n()) {
    throw Error(ErrorCode::DimensionMismatch, "certificate gradient length != n");
  }
  const double rate = cert.class_k(cert.value(x));
  // Barrier conditions are negated so every constraint reads G <= 0.
  const double sign = cert.kind == CertificateKind::Barrier ? -1.0 : 1.0;

  ConstraintData out;
  out.label = cert.label;
  out.q = sign * (model.nominal(x).transpose() * grad);
  out.q(0) += sign * rate;
  out.R.resize(model.m() + 1, model.k());
  for (int j = 0; j < model.k(); ++j) {
    out.R.col(j) = sign * (model.perturbation(j, x).transpose() * grad);
  }
  return out;
}

double eval_G(const ConstraintData& c, const ExtControl& u, const Eigen::VectorXd& xi) {
  if (u.full().size() != c.q.size() || c.R.rows() != c.q.size() || xi.size() != c.R.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eval_G: dimensions of (q, R, u, xi) disagree");
  }
  return u.full().dot(c.q) + u.full().dot(c.R * xi);
}

UncertainAffineModel unicycle_model(double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::InvalidConfig, "unicycle offset a must be positive");
  auto nominal = [a](const StateVec& x) {
    const double c = std::cos(x(2));
    const double s = std::sin(x(2));
    Eigen::MatrixXd f(3, 3);
    f << 0, c, -a * s,
         0, s, a * c,
         0, 0, 1;
    return f;
  };
  auto drift = [](const StateVec&) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 0) = 0.02;
    w(1, 0) = 0.02;
    w(2, 0) = 0.01;
    return w;
  };
  auto turn_rate = [](const StateVec&) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(2, 2) = -0.02;
    return w;
  };
  auto heading = [a](const StateVec& x) {
    const double c = std::cos(x(2));
    const double s = std::sin(x(2));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
    w(0, 1) = 0.02 * c;
    w(0, 2) = -0.02 * a * s;
    w(1, 1) = 0.02 * s;
    w(1, 2) = 0.02 * a * c;
    return w;
  };
  return UncertainAffineModel(3, 2, nominal, {drift, turn_rate, heading});
}

}  // namespace drsafe::model
