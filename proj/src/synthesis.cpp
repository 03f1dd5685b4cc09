#include "drsafe/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace drsafe::socp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SynthesisForm form) {
  return form == SynthesisForm::Epigraph ? "epigraph" : "reduced";
}

namespace {

// Affine cone map s(u) = (c^T u + d, A u + b); the constraint is s(u) in Q.
struct ConeMap {
  MatrixXd jac;  // (k+1) x m
  VectorXd offset;
};

ConeMap cone_map(const dro::SocConstraint& s) {
  ConeMap out;
  const auto m = s.c.size();
  const auto k = s.b.size();
  out.jac.resize(k + 1, m);
  out.jac.row(0) = s.c.transpose();
  out.jac.bottomRows(k) = s.A;
  out.offset.resize(k + 1);
  out.offset << s.d, s.b;
  return out;
}

double constraint_scale(const dro::SocConstraint& s) {
  return 1.0 + s.c.norm() + std::abs(s.d) + s.A.norm() + s.b.norm();
}

enum class Contact { Free, Boundary, Apex };

// Boundary contacts contribute the equation c^T u + d = |A u + b|; apex
// contacts pin A u + b = 0 and c^T u + d = 0.
std::vector<Contact> classify(const std::vector<dro::SocConstraint>& cones,
                              const std::vector<double>& scale, const VectorXd& u, double tol) {
  std::vector<Contact> out(cones.size(), Contact::Free);
  for (std::size_t j = 0; j < cones.size(); ++j) {
    if (cones[j].margin(u) > tol * scale[j]) continue;
    const bool has_norm = !cones[j].A.isZero(0.0);
    out[j] = has_norm && (cones[j].A * u + cones[j].b).norm() <= tol * scale[j] ? Contact::Apex
                                                                               : Contact::Boundary;
  }
  return out;
}

// Newton's method for min |u - k|^2 subject to the contact equations, with
// redundant equations handled by a rank-revealing solve.
std::optional<VectorXd> contact_projection(const std::vector<dro::SocConstraint>& cones,
                                           const std::vector<Contact>& contact,
                                           const VectorXd& target, VectorXd u) {
  const auto m = u.size();
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<VectorXd> rows;
    std::vector<double> vals;
    MatrixXd curvature = MatrixXd::Zero(m, m);
    std::vector<MatrixXd> hessians;
    std::vector<std::size_t> curved;
    for (std::size_t j = 0; j < cones.size(); ++j) {
      const auto& s = cones[j];
      if (contact[j] == Contact::Apex) {
        for (Eigen::Index i = 0; i < s.A.rows(); ++i) {
          rows.push_back(s.A.row(i).transpose());
          vals.push_back(s.A.row(i).dot(u) + s.b(i));
        }
        rows.push_back(s.c);
        vals.push_back(s.c.dot(u) + s.d);
      } else if (contact[j] == Contact::Boundary) {
        const VectorXd v = s.A * u + s.b;
        const double nv = v.norm();
        VectorXd grad = s.c;
        if (!s.A.isZero(0.0)) {
          if (nv <= 1e-14 * (1.0 + s.b.norm())) return std::nullopt;
          const VectorXd atv = s.A.transpose() * v / nv;
          grad -= atv;
          hessians.push_back(-(s.A.transpose() * s.A - atv * atv.transpose()) / nv);
          curved.push_back(rows.size());
        }
        rows.push_back(grad);
        vals.push_back(s.c.dot(u) + s.d - nv);
      }
    }
    const auto ne = static_cast<Eigen::Index>(rows.size());
    if (ne == 0) return target;
    MatrixXd jac(ne, m);
    VectorXd h(ne);
    for (Eigen::Index i = 0; i < ne; ++i) {
      jac.row(i) = rows[static_cast<std::size_t>(i)].transpose();
      h(i) = vals[static_cast<std::size_t>(i)];
    }
    // Multipliers of the current point, used only for the curvature term.
    const VectorXd lambda = jac.transpose().completeOrthogonalDecomposition().solve(2.0 * (u - target));
    MatrixXd hess = 2.0 * MatrixXd::Identity(m, m);
    for (std::size_t c = 0; c < curved.size(); ++c) hess -= lambda(static_cast<Eigen::Index>(curved[c])) * hessians[c];
    MatrixXd kkt = MatrixXd::Zero(m + ne, m + ne);
    kkt.topLeftCorner(m, m) = hess;
    kkt.topRightCorner(m, ne) = jac.transpose();
    kkt.bottomLeftCorner(ne, m) = jac;
    VectorXd rhs(m + ne);
    rhs << -2.0 * (u - target) + jac.transpose() * lambda, -h;
    const VectorXd step = kkt.completeOrthogonalDecomposition().solve(rhs);
    const VectorXd du = step.head(m);
    if (!du.allFinite()) return std::nullopt;
    u += du;
    if (du.norm() <= 1e-15 * (1.0 + u.norm())) break;
  }
  return u;
}

// Smallest stationarity residual |2(u - k) - sum_j J_j^T lambda_j| over cone
// multipliers complementary to s_j(u). Boundary contacts use the single
// complementary ray; apex contacts allow any lambda_j in Q.
std::optional<double> stationarity_residual(const std::vector<dro::SocConstraint>& cones,
                                            const std::vector<Contact>& contact,
                                            const VectorXd& target, const VectorXd& u) {
  const auto m = u.size();
  std::vector<VectorXd> rays;
  std::vector<MatrixXd> apex;
  for (std::size_t j = 0; j < cones.size(); ++j) {
    if (contact[j] == Contact::Free) continue;
    const auto map = cone_map(cones[j]);
    if (contact[j] == Contact::Apex) {
      apex.push_back(map.jac.transpose());
      continue;
    }
    const VectorXd sv = map.jac * u + map.offset;
    VectorXd reflected = -sv;
    reflected(0) = sv(0);
    if (!(sv(0) > 0.0)) reflected = VectorXd::Unit(sv.size(), 0);
    rays.push_back(map.jac.transpose() * reflected / std::max(sv(0), 1e-300));
  }
  const VectorXd g = 2.0 * (u - target);
  if (rays.empty() && apex.empty()) return g.norm();

  const auto n_ray = static_cast<Eigen::Index>(rays.size());
  Eigen::Index n_apex = 0;
  for (const auto& a : apex) n_apex += a.cols();
  const Eigen::Index n_vars = 1 + n_ray + n_apex;
  ConeProgram prog;
  prog.c = VectorXd::Unit(n_vars, 0);
  prog.A = MatrixXd::Zero(1 + m + n_ray + n_apex, n_vars);
  prog.b = VectorXd::Zero(prog.A.rows());
  // (t, g - sum rays mu - sum J^T lambda) in Q^{m+1}
  prog.A(0, 0) = -1.0;
  prog.b.segment(1, m) = g;
  for (Eigen::Index r = 0; r < n_ray; ++r) prog.A.block(1, 1 + r, m, 1) = rays[static_cast<std::size_t>(r)];
  Eigen::Index col = 1 + n_ray;
  for (const auto& a : apex) {
    prog.A.block(1, col, m, a.cols()) = a;
    col += a.cols();
  }
  prog.cones.push_back({ConeKind::SecondOrder, static_cast<int>(m + 1)});
  Eigen::Index row = 1 + m;
  if (n_ray > 0) {
    prog.A.block(row, 1, n_ray, n_ray) = -MatrixXd::Identity(n_ray, n_ray);
    prog.cones.push_back({ConeKind::NonNegative, static_cast<int>(n_ray)});
    row += n_ray;
  }
  col = 1 + n_ray;
  for (const auto& a : apex) {
    prog.A.block(row, col, a.cols(), a.cols()) = -MatrixXd::Identity(a.cols(), a.cols());
    prog.cones.push_back({ConeKind::SecondOrder, static_cast<int>(a.cols())});
    row += a.cols();
    col += a.cols();
  }
  const auto sol = solve(prog);
  if (sol.status != SolveStatus::Optimal) return std::nullopt;
  return std::max(sol.objective, 0.0);
}

}  // namespace

std::optional<VectorXd> polish_projection(const std::vector<dro::SocConstraint>& cones,
                                          const VectorXd& target, const VectorXd& start) {
  std::vector<double> scale;
  for (const auto& c : cones) scale.push_back(constraint_scale(c));
  auto feasible = [&](const VectorXd& u) {
    for (std::size_t j = 0; j < cones.size(); ++j) {
      if (cones[j].margin(u) < -1e-12 * scale[j]) return false;
    }
    return true;
  };
  if (feasible(target)) return target;

  const double accept = 1e-7 * (1.0 + 2.0 * (start - target).norm());
  for (double tol : {1e-4, 1e-6, 1e-3}) {
    const auto contact = classify(cones, scale, start, tol);
    const auto u = contact_projection(cones, contact, target, start);
    if (!u || !feasible(*u) || (*u - start).norm() > 1e-2 * (1.0 + start.norm())) continue;
    const auto res = stationarity_residual(cones, classify(cones, scale, *u, 1e-9), target, *u);
    if (res && *res <= accept) return u;
  }
  return std::nullopt;
}


ControlResult synthesize(const dro::ProblemInstance& original, SynthesisForm form,
                         const SolverOptions& opts, bool polish) {
  const dro::ProblemInstance inst = dro::normalized(original);
  ControlResult out;
  out.form = form;
  int u_off = 0;
  ConeProgram prog;
  if (form == SynthesisForm::Epigraph) {
    auto epi = dro::assemble_epigraph_socp(inst);
    u_off = epi.layout.u;
    prog = std::move(epi.program);
  } else {
    prog = dro::assemble_reduced_socp(inst);
  }
  out.solution = SocpSolver(opts).solve(prog);

  out.status = out.solution.status;
  if (!out.optimal()) return out;

  out.u = out.solution.primal.segment(u_off, inst.m());
  if (polish) {
    std::vector<dro::SocConstraint> cones;
    for (int l = 0; l < inst.M(); ++l) {
      auto part = dro::reduce_to_soc(inst, l);
      cones.insert(cones.end(), part.begin(), part.end());
    }
    if (auto refined = polish_projection(cones, inst.nominal.input(), out.u)) {
      out.u = *refined;
      out.polished = true;
    }
  }
  out.u_ext = model::ExtControl::from_input(out.u);
  out.objective = (out.u - inst.nominal.input()).squaredNorm();
  return out;
}

ControlResult synthesize(const dro::SynthesisProblem& problem, const StateVec& x,
                         SynthesisForm form, const SolverOptions& opts, bool polish) {
  return synthesize(problem.at(x), form, opts, polish);
}

}  // namespace drsafe::socp
