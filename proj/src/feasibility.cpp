#include "drsafe/feasibility.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "drsafe/numerics.hpp"

namespace drsafe::feasibility {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using numerics::SymMatrix;

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::CertifiedInfeasible: return "CertifiedInfeasible";
    case VerdictKind::CertifiedFeasible: return "CertifiedFeasible";
    case VerdictKind::Inconclusive: return "Inconclusive";
    case VerdictKind::NotApplicable: return "NotApplicable";
  }
  return "?";
}

std::string_view to_string(SignCase c) {
  switch (c) {
    case SignCase::NegEig: return "NegEig";
    case SignCase::PosEig: return "PosEig";
    case SignCase::ZeroEig: return "ZeroEig";
    case SignCase::None: return "None";
  }
  return "?";
}

void SlackCertificate::validate(int num_constraints) const {
  if (static_cast<int>(S.size()) != num_constraints)
    throw Error(ErrorCode::DimensionMismatch, "need one slack value per constraint");
  for (double s : S)
    if (!(s >= 0.0)) throw Error(ErrorCode::InvalidConfig, "slack values must be >= 0");
  if (!(B >= 1.0)) throw Error(ErrorCode::InvalidConfig, "norm bound B must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Feasibility of |Q^T u + rt| <= w^T u + v over u in R^m, where rt is the
// k-vector row and gram = Q Q^T is invertible.
struct ConeTest {
  const MatrixXd& Q;
  const VectorXd& rt;
  const SymMatrix& gram;
  double tol;

  PairRecord run(const VectorXd& w, double v) const {
    const auto m = Q.rows();
    const VectorXd cross = Q * rt;
    const SymMatrix F = SymMatrix::symmetrized(gram.matrix() - w * w.transpose());
    MatrixXd H(m + 1, m + 1);
    H(0, 0) = rt.squaredNorm() - v * v;
    H.block(1, 0, m, 1) = cross - v * w;
    H.block(0, 1, 1, m) = H.block(1, 0, m, 1).transpose();
    H.block(1, 1, m, m) = F.matrix();

    PairRecord rec;
    rec.h_not_pd = !numerics::is_positive_definite(SymMatrix(H), tol);
    const double lambda = numerics::min_eigenvalue(F);
    bool holds = false;
    if (lambda < -tol) {
      rec.sign_case = SignCase::NegEig;
      holds = true;
    } else if (lambda > tol) {
      rec.sign_case = SignCase::PosEig;
      holds = v - w.dot(numerics::solve_spd(F, cross - w * v, 0.0)) >= 0.0;
    } else {
      rec.sign_case = SignCase::ZeroEig;
      holds = v - w.dot(numerics::solve_spd(gram, cross, 0.0)) > 0.0;
    }
    rec.passes = rec.h_not_pd && holds;
    if (!holds) rec.sign_case = SignCase::None;
    return rec;
  }
};

FeasibilityVerdict not_applicable(Clock::time_point start) {
  FeasibilityVerdict out;
  out.kind = VerdictKind::NotApplicable;
  out.violated = ErrorCode::QQTSingular;
  out.elapsed = seconds_since(start);
  return out;
}

}  // namespace

FeasibilityVerdict check_necessary(const dro::ProblemInstance& inst, double tol) {
  const auto start = Clock::now();
  inst.validate();
  const double r = inst.ambiguity.r;
  const double eps = inst.ambiguity.eps;
  const int m = inst.m();

  FeasibilityVerdict out;
  out.detail.reserve(static_cast<std::size_t>(inst.M()) * inst.N());
  bool all_pass = true;
  for (int l = 0; l < inst.M(); ++l) {
    const auto& c = inst.constraints[l];
    const MatrixXd Q = r * c.R.bottomRows(m);
    const VectorXd rt = r * c.R.row(0).transpose();
    const SymMatrix gram = SymMatrix::symmetrized(Q * Q.transpose());
    if (!(numerics::min_eigenvalue(gram) > tol)) return not_applicable(start);
    const ConeTest test{Q, rt, gram, tol};

    bool some_pass = false;
    for (int i = 0; i < inst.N(); ++i) {
      const VectorXd shifted = -eps * (c.q + c.R * inst.samples->sample(i));
      PairRecord rec = test.run(shifted.tail(m), shifted(0));
      rec.constraint = l;
      rec.sample = i;
      some_pass = some_pass || rec.passes;
      out.detail.push_back(rec);
    }
    all_pass = all_pass && some_pass;
  }
  out.kind = all_pass ? VerdictKind::Inconclusive : VerdictKind::CertifiedInfeasible;
  out.elapsed = seconds_since(start);
  return out;
}

FeasibilityVerdict check_necessary(const dro::SynthesisProblem& p, const StateVec& x, double tol) {
  return check_necessary(p.at(x), tol);
}

FeasibilityVerdict check_sufficient_single(const dro::ProblemInstance& inst, double tol) {
  const auto start = Clock::now();
  if (inst.M() != 1) throw Error(ErrorCode::WrongM, "single-constraint check needs M == 1");
  inst.validate();
  const double eps = inst.ambiguity.eps;
  const int m = inst.m();
  const auto& c = inst.constraints[0];

  const double scale = inst.ambiguity.r + eps * inst.samples->max_norm();
  const MatrixXd Q = scale * c.R.bottomRows(m);
  const VectorXd rt = scale * c.R.row(0).transpose();
  const SymMatrix gram = SymMatrix::symmetrized(Q * Q.transpose());
  if (!(numerics::min_eigenvalue(gram) > tol)) return not_applicable(start);

  const VectorXd shifted = -eps * c.q;
  PairRecord rec = ConeTest{Q, rt, gram, tol}.run(shifted.tail(m), shifted(0));
  rec.sample = -1;

  FeasibilityVerdict out;
  out.kind = rec.passes ? VerdictKind::CertifiedFeasible : VerdictKind::Inconclusive;
  out.detail.push_back(rec);
  out.elapsed = seconds_since(start);
  return out;
}

FeasibilityVerdict check_sufficient_single(const dro::SynthesisProblem& p, const StateVec& x,
                                           double tol) {
  return check_sufficient_single(p.at(x), tol);
}

double slack_threshold(const dro::ProblemInstance& inst, const SlackCertificate& cert) {
  cert.validate(inst.M());
  double tau = std::numeric_limits<double>::infinity();
  for (int l = 0; l < inst.M(); ++l) {
    const double norm = numerics::spectral_norm(inst.constraints[l].R);
    if (norm == 0.0) throw Error(ErrorCode::ZeroRNorm, "constraint " + std::to_string(l));
    tau = std::min(tau, inst.ambiguity.eps * cert.S[l] / (2.0 * norm * cert.B));
  }
  return tau;
}

FeasibilityVerdict check_sufficient_slack(const dro::ProblemInstance& inst,
                                          const SlackCertificate& cert) {
  const auto start = Clock::now();
  const double r_n = dro::radius_schedule(inst.N(), inst.ambiguity);
  if (inst.ambiguity.r > r_n)
    throw Error(ErrorCode::RadiusMismatch, "radius " + std::to_string(inst.ambiguity.r) +
                                               " exceeds schedule " + std::to_string(r_n));
  const double tau = slack_threshold(inst, cert);
  FeasibilityVerdict out;
  out.kind = r_n < tau ? VerdictKind::CertifiedFeasible : VerdictKind::Inconclusive;
  out.elapsed = seconds_since(start);
  return out;
}

FeasibilityVerdict check_sufficient_slack(const dro::SynthesisProblem& p, const StateVec& x,
                                          const SlackCertificate& cert) {
  return check_sufficient_slack(p.at(x), cert);
}

}  // namespace drsafe::feasibility
