#pragma once

#include <optional>
#include <string>
#include <vector>

#include "drsafe/dro.hpp"
#include "drsafe/error.hpp"

namespace drsafe::feasibility {

enum class VerdictKind { CertifiedInfeasible, CertifiedFeasible, Inconclusive, NotApplicable };
enum class SignCase { NegEig, PosEig, ZeroEig, None };

std::string_view to_string(VerdictKind kind);
std::string_view to_string(SignCase c);

/// Outcome of the cone test for one (constraint, sample) pair. For the
/// single-constraint sufficient check there is one record with sample -1.
struct PairRecord {
  int constraint = 0;
  int sample = 0;
  bool h_not_pd = false;
  SignCase sign_case = SignCase::None;
  bool passes = false;
};

struct FeasibilityVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::vector<PairRecord> detail;
  double elapsed = 0.0;  // seconds
  // Set when kind == NotApplicable.
  std::optional<ErrorCode> violated;
};

/// Slack values S_l(x) >= 0 of a reference controller and a bound B(x) >= 1
/// on its norm.
struct SlackCertificate {
  std::vector<double> S;
  double B = 1.0;

  void validate(int num_constraints) const;
};

inline constexpr double kDefaultSignTol = 1e-9;

/// Cone-by-cone necessary test. CertifiedInfeasible when some constraint
/// has no sample whose single cone passes; Inconclusive otherwise.
FeasibilityVerdict check_necessary(const dro::SynthesisProblem& p, const StateVec& x,
                                   double tol = kDefaultSignTol);
FeasibilityVerdict check_necessary(const dro::ProblemInstance& inst, double tol = kDefaultSignTol);

/// Inflated-radius test for M == 1. Throws WrongM otherwise.
FeasibilityVerdict check_sufficient_single(const dro::SynthesisProblem& p, const StateVec& x,
                                           double tol = kDefaultSignTol);
FeasibilityVerdict check_sufficient_single(const dro::ProblemInstance& inst,
                                           double tol = kDefaultSignTol);

/// Smallest eps S_l / (2 |R_l|_2 B) over l. Throws ZeroRNorm.
double slack_threshold(const dro::ProblemInstance& inst, const SlackCertificate& cert);

/// Compares radius_schedule(N) with slack_threshold. Throws RadiusMismatch
/// when the configured radius exceeds the schedule.
FeasibilityVerdict check_sufficient_slack(const dro::SynthesisProblem& p, const StateVec& x,
                                          const SlackCertificate& cert);
FeasibilityVerdict check_sufficient_slack(const dro::ProblemInstance& inst,
                                          const SlackCertificate& cert);

}  // namespace drsafe::feasibility
