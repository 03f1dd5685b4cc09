#include "drsafe/socp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "drsafe/error.hpp"

namespace drsafe::socp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

void ConeProgram::validate() const {
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "cone program: A must be rows(b) x len(c)");
  }
  if (c.size() < 1) throw Error(ErrorCode::InvalidConfig, "cone program needs >= 1 variable");
  long total = 0;
  for (const auto& cone : cones) {
    if (cone.dim < 1) throw Error(ErrorCode::InvalidConfig, "cone dimension must be >= 1");
    total += cone.dim;
  }
  if (total != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "sum of cone dims must equal rows(A)");
  }
  if (!A.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw Error(ErrorCode::InvalidConfig, "cone program data must be finite");
  }
}

double cone_margin(const Cone& cone, const Eigen::Ref<const VectorXd>& v) {
  if (cone.kind == ConeKind::NonNegative) return v.minCoeff();
  return v(0) - v.tail(v.size() - 1).norm();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nesterov-Todd scaling for one block. For NonNegative blocks only `diag`
// (elementwise W) is used; SecondOrder blocks keep dense W and W^{-1}.
struct BlockScaling {
  VectorXd diag;
  MatrixXd w;
  MatrixXd w_inv;
};

class Workspace {
 public:
  Workspace(const ConeProgram& p, const SolverOptions& opts)
      : p_(p), opts_(opts), n_(p.num_vars()), rows_(p.num_rows()) {
    int offset = 0;
    for (const auto& cone : p.cones) {
      offsets_.push_back(offset);
      offset += cone.dim;
      degree_ += cone.kind == ConeKind::NonNegative ? cone.dim : 1;
    }
    scaling_.resize(p.cones.size());
  }

  ConeSolution run();

 private:
  auto block(VectorXd& v, std::size_t b) { return v.segment(offsets_[b], p_.cones[b].dim); }
  auto block(const VectorXd& v, std::size_t b) const {
    return v.segment(offsets_[b], p_.cones[b].dim);
  }

  void identity_scaling();
  void compute_scaling(const VectorXd& s, const VectorXd& z);
  VectorXd apply_w(const VectorXd& v) const;
  VectorXd apply_w_inv(const VectorXd& v) const;
  VectorXd jordan(const VectorXd& u, const VectorXd& v) const;
  VectorXd jordan_div(const VectorXd& lam, const VectorXd& r) const;
  VectorXd identity_element() const;
  double max_step(const VectorXd& v, const VectorXd& dv) const;
  void shift_into_cone(VectorXd& v) const;

  bool factor();
  void kkt_solve(const VectorXd& rhs1, const VectorXd& rhs2, VectorXd& dx, VectorXd& dz) const;

  const ConeProgram& p_;
  SolverOptions opts_;
  int n_;
  int rows_;
  int degree_ = 0;
  std::vector<int> offsets_;
  std::vector<BlockScaling> scaling_;
  MatrixXd scaled_a_;  // W^{-1} A
  Eigen::LLT<MatrixXd> llt_;
};

void Workspace::identity_scaling() {
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const int d = p_.cones[b].dim;
    auto& sc = scaling_[b];
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      sc.diag = VectorXd::Ones(d);
    } else {
      sc.w = MatrixXd::Identity(d, d);
      sc.w_inv = MatrixXd::Identity(d, d);
    }
  }
}

void Workspace::compute_scaling(const VectorXd& s, const VectorXd& z) {
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const auto sb = block(s, b);
    const auto zb = block(z, b);
    auto& sc = scaling_[b];
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      sc.diag = (sb.array() / zb.array()).sqrt();
      continue;
    }
    const int d = p_.cones[b].dim;
    if (d == 1) {
      sc.w = MatrixXd::Constant(1, 1, std::sqrt(sb(0) / zb(0)));
      sc.w_inv = MatrixXd::Constant(1, 1, 1.0 / sc.w(0, 0));
      continue;
    }
    const double s1n = sb.tail(d - 1).norm();
    const double z1n = zb.tail(d - 1).norm();
    const double s_res = std::sqrt((sb(0) - s1n) * (sb(0) + s1n));
    const double z_res = std::sqrt((zb(0) - z1n) * (zb(0) + z1n));
    const VectorXd s_bar = sb / s_res;
    const VectorXd z_bar = zb / z_res;
    const double gamma = std::sqrt(0.5 * (1.0 + s_bar.dot(z_bar)));
    const double w0 = (s_bar(0) + z_bar(0)) / (2.0 * gamma);
    const VectorXd w1 = (s_bar.tail(d - 1) - z_bar.tail(d - 1)) / (2.0 * gamma);
    const double eta = std::sqrt(s_res / z_res);

    MatrixXd core(d, d);
    core(0, 0) = w0;
    core.block(0, 1, 1, d - 1) = w1.transpose();
    core.block(1, 0, d - 1, 1) = w1;
    core.block(1, 1, d - 1, d - 1) =
        MatrixXd::Identity(d - 1, d - 1) + w1 * w1.transpose() / (1.0 + w0);
    sc.w = eta * core;
    core.block(0, 1, 1, d - 1) *= -1.0;
    core.block(1, 0, d - 1, 1) *= -1.0;
    sc.w_inv = core / eta;
  }
}

VectorXd Workspace::apply_w(const VectorXd& v) const {
  VectorXd out(rows_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const auto& sc = scaling_[b];
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      out.segment(offsets_[b], p_.cones[b].dim) = sc.diag.cwiseProduct(block(v, b));
    } else {
      out.segment(offsets_[b], p_.cones[b].dim) = sc.w * block(v, b);
    }
  }
  return out;
}

VectorXd Workspace::apply_w_inv(const VectorXd& v) const {
  VectorXd out(rows_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const auto& sc = scaling_[b];
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      out.segment(offsets_[b], p_.cones[b].dim) = block(v, b).cwiseQuotient(sc.diag);
    } else {
      out.segment(offsets_[b], p_.cones[b].dim) = sc.w_inv * block(v, b);
    }
  }
  return out;
}

VectorXd Workspace::jordan(const VectorXd& u, const VectorXd& v) const {
  VectorXd out(rows_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const int d = p_.cones[b].dim;
    const auto ub = block(u, b);
    const auto vb = block(v, b);
    auto ob = out.segment(offsets_[b], d);
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      ob = ub.cwiseProduct(vb);
    } else {
      ob(0) = ub.dot(vb);
      ob.tail(d - 1) = ub(0) * vb.tail(d - 1) + vb(0) * ub.tail(d - 1);
    }
  }
  return out;
}

// Solves lam o x = r blockwise.
VectorXd Workspace::jordan_div(const VectorXd& lam, const VectorXd& r) const {
  VectorXd out(rows_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const int d = p_.cones[b].dim;
    const auto lb = block(lam, b);
    const auto rb = block(r, b);
    auto ob = out.segment(offsets_[b], d);
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      ob = rb.cwiseQuotient(lb);
    } else {
      const double l1n = lb.tail(d - 1).norm();
      const double det = (lb(0) - l1n) * (lb(0) + l1n);
      const double x0 = (lb(0) * rb(0) - lb.tail(d - 1).dot(rb.tail(d - 1))) / det;
      ob(0) = x0;
      ob.tail(d - 1) = (rb.tail(d - 1) - x0 * lb.tail(d - 1)) / lb(0);
    }
  }
  return out;
}

VectorXd Workspace::identity_element() const {
  VectorXd e = VectorXd::Zero(rows_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      e.segment(offsets_[b], p_.cones[b].dim).setOnes();
    } else {
      e(offsets_[b]) = 1.0;
    }
  }
  return e;
}

// Largest alpha with v + alpha dv in the cone (v assumed interior).
double Workspace::max_step(const VectorXd& v, const VectorXd& dv) const {
  double alpha = kInf;
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const int d = p_.cones[b].dim;
    const auto vb = block(v, b);
    const auto db = block(dv, b);
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      for (int i = 0; i < d; ++i) {
        if (db(i) < 0.0) alpha = std::min(alpha, -vb(i) / db(i));
      }
      continue;
    }
    const double d1n = db.tail(d - 1).norm();
    if (db(0) >= d1n) continue;
    const double v1n = vb.tail(d - 1).norm();
    const double qa = (db(0) - d1n) * (db(0) + d1n);
    const double qb = vb(0) * db(0) - vb.tail(d - 1).dot(db.tail(d - 1));
    const double qc = (vb(0) - v1n) * (vb(0) + v1n);
    // Smallest positive root of qa t^2 + 2 qb t + qc, written stably.
    const double denom = std::sqrt(std::max(0.0, qb * qb - qa * qc)) - qb;
    if (denom > 0.0) alpha = std::min(alpha, std::max(0.0, qc) / denom);
  }
  return alpha;
}

void Workspace::shift_into_cone(VectorXd& v) const {
  double alpha = -kInf;
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    alpha = std::max(alpha, -cone_margin(p_.cones[b], block(v, b)));
  }
  if (alpha >= 0.0) v += (1.0 + alpha) * identity_element();
}

bool Workspace::factor() {
  scaled_a_.resize(rows_, n_);
  for (std::size_t b = 0; b < p_.cones.size(); ++b) {
    const int d = p_.cones[b].dim;
    const auto& sc = scaling_[b];
    const auto a_block = p_.A.middleRows(offsets_[b], d);
    if (p_.cones[b].kind == ConeKind::NonNegative) {
      scaled_a_.middleRows(offsets_[b], d) = sc.diag.cwiseInverse().asDiagonal() * a_block;
    } else {
      scaled_a_.middleRows(offsets_[b], d) = sc.w_inv * a_block;
    }
  }
  MatrixXd normal = MatrixXd::Zero(n_, n_);
  normal.selfadjointView<Eigen::Lower>().rankUpdate(scaled_a_.transpose());
  normal.triangularView<Eigen::StrictlyUpper>() = normal.transpose();
  const double base = std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff());
  // Static regularization keeps the factorization alive for rank-deficient A.
  for (double reg = 1e-14; reg <= 1e-4; reg *= 100.0) {
    MatrixXd regularized = normal;
    regularized.diagonal().array() += reg * base;
    llt_.compute(regularized);
    if (llt_.info() == Eigen::Success) return true;
  }
  return false;
}

// Solves  A^T dz = rhs1,  A dx - W^2 dz = rhs2  through the normal
// equations with iterative refinement on the unreduced system.
void Workspace::kkt_solve(const VectorXd& rhs1, const VectorXd& rhs2, VectorXd& dx,
                          VectorXd& dz) const {
  auto reduced = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& x, VectorXd& z) {
    const VectorXd w_inv_r2 = apply_w_inv(r2);
    x = llt_.solve(r1 + scaled_a_.transpose() * w_inv_r2);
    z = apply_w_inv(scaled_a_ * x - w_inv_r2);
  };
  reduced(rhs1, rhs2, dx, dz);
  const double scale = 1.0 + std::max(rhs1.lpNorm<Eigen::Infinity>(), rhs2.lpNorm<Eigen::Infinity>());
  for (int pass = 0; pass < 3; ++pass) {
    const VectorXd e1 = rhs1 - p_.A.transpose() * dz;
    const VectorXd e2 = rhs2 - (p_.A * dx - apply_w(apply_w(dz)));
    const double err = std::max(e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>());
    if (err <= 1e-14 * scale) break;
    VectorXd cx, cz;
    reduced(e1, e2, cx, cz);
    dx += cx;
    dz += cz;
  }
}

ConeSolution Workspace::run() {
  ConeSolution sol;
  const auto& A = p_.A;
  const auto& h = p_.b;
  const auto& c = p_.c;
  const double h_norm = h.norm();
  const double c_norm = c.norm();

  if (rows_ == 0) {
    sol.primal = VectorXd::Zero(n_);
    sol.slack = VectorXd();
    sol.dual = VectorXd();
    if (c_norm == 0.0) {
      sol.status = SolveStatus::Optimal;
    } else {
      sol.status = SolveStatus::Unbounded;
      sol.primal = -c / (c_norm * c_norm);
    }
    return sol;
  }

  identity_scaling();
  if (!factor()) return sol;
  VectorXd x, z, s, tmp;
  kkt_solve(VectorXd::Zero(n_), h, x, z);
  s = -z;
  shift_into_cone(s);
  kkt_solve(-c, VectorXd::Zero(rows_), tmp, z);
  shift_into_cone(z);
  double tau = 1.0;
  double kappa = 1.0;
  const VectorXd e = identity_element();

  ConeSolution best_opt, best_inf;
  double best_opt_ratio = kInf;
  double best_inf_ratio = kInf;
  auto fallback = [&](ConeSolution failed) {
    const double limit = opts_.inaccurate_factor;
    ConeSolution* best = best_opt_ratio <= limit ? &best_opt
                         : best_inf_ratio <= limit ? &best_inf
                                                   : nullptr;
    if (!best) return failed;
    best->reduced_accuracy = true;
    return *best;
  };

  for (int iter = 0; iter <= opts_.max_iters; ++iter) {
    sol.iterations = iter;
    const VectorXd r_x = A.transpose() * z + c * tau;
    const VectorXd r_z = A * x + s - h * tau;
    const double cx = c.dot(x);
    const double hz = h.dot(z);
    const double r_tau = kappa + cx + hz;
    const double mu = (s.dot(z) + tau * kappa) / (degree_ + 1);

    if (!(x.allFinite() && z.allFinite() && s.allFinite() && std::isfinite(tau) &&
          std::isfinite(kappa))) {
      sol.status = SolveStatus::NumericalFailure;
      return fallback(sol);
    }

    // Convergence checks on the de-homogenized iterate.
    const double p_res = (A * x + s - h * tau).norm() / tau;
    const double d_res = (A.transpose() * z + c * tau).norm() / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double p_cost = cx / tau;
    const double opt_ratio = std::max({p_res / (opts_.feas_tol * (1.0 + h_norm)),
                                       d_res / (opts_.feas_tol * (1.0 + c_norm)),
                                       gap / (opts_.gap_tol * (1.0 + std::abs(p_cost)))});
    if (opt_ratio < best_opt_ratio) {
      best_opt_ratio = opt_ratio;
      best_opt.status = SolveStatus::Optimal;
      best_opt.primal = x / tau;
      best_opt.slack = s / tau;
      best_opt.dual = z / tau;
      best_opt.objective = p_cost;
      best_opt.gap = gap;
      best_opt.primal_residual = p_res;
      best_opt.dual_residual = d_res;
      best_opt.iterations = iter;
    }
    if (opt_ratio <= 1.0) return best_opt;
    if (hz < 0.0) {
      const double cert_res = (A.transpose() * z).norm() / -hz;
      if (cert_res < best_inf_ratio * opts_.infeas_tol) {
        best_inf_ratio = cert_res / opts_.infeas_tol;
        best_inf.status = SolveStatus::Infeasible;
        best_inf.dual = z / -hz;
        best_inf.certificate_residual = cert_res;
        best_inf.iterations = iter;
      }
      if (cert_res <= opts_.infeas_tol) return best_inf;
    }
    if (cx < 0.0) {
      const double cert_res = (A * x + s).norm() / -cx;
      if (cert_res <= opts_.infeas_tol) {
        sol.status = SolveStatus::Unbounded;
        sol.primal = x / -cx;
        sol.slack = s / -cx;
        sol.certificate_residual = cert_res;
        return sol;
      }
    }
    if (iter == opts_.max_iters) break;

    compute_scaling(s, z);
    if (!factor()) {
      sol.status = SolveStatus::NumericalFailure;
      return fallback(sol);
    }
    const VectorXd lambda = apply_w(z);

    VectorXd x1, z1;
    kkt_solve(-c, h, x1, z1);
    const double denom_base = c.dot(x1) + h.dot(z1) - kappa / tau;

    // Predictor (affine scaling), then Mehrotra corrector.
    auto direction = [&](double sigma, const VectorXd& rhs_c, double rhs_tk, VectorXd& dx,
                         VectorXd& dz, VectorXd& ds, double& dtau, double& dkappa) {
      const VectorXd lam_div = jordan_div(lambda, rhs_c);
      VectorXd x2, z2;
      kkt_solve(-(1.0 - sigma) * r_x, -(1.0 - sigma) * r_z - apply_w(lam_div), x2, z2);
      dtau = (-(1.0 - sigma) * r_tau - rhs_tk / tau - c.dot(x2) - h.dot(z2)) / denom_base;
      dx = x2 + dtau * x1;
      dz = z2 + dtau * z1;
      // ds from the linearized primal equation.
      ds = -(1.0 - sigma) * r_z + h * dtau - A * dx;
      dkappa = (rhs_tk - kappa * dtau) / tau;
    };
    auto step_length = [&](const VectorXd& ds, const VectorXd& dz, double dtau, double dkappa) {
      double alpha = std::min(max_step(s, ds), max_step(z, dz));
      if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
      if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
      return alpha;
    };

    VectorXd dx_a, dz_a, ds_a;
    double dtau_a = 0.0, dkappa_a = 0.0;
    direction(0.0, -jordan(lambda, lambda), -tau * kappa, dx_a, dz_a, ds_a, dtau_a, dkappa_a);
    const double alpha_a = std::min(1.0, step_length(ds_a, dz_a, dtau_a, dkappa_a));
    const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3), 1e-4, 1.0);

    const VectorXd rhs_c = -jordan(lambda, lambda) -
                           jordan(apply_w_inv(ds_a), apply_w(dz_a)) + sigma * mu * e;
    const double rhs_tk = -tau * kappa - dtau_a * dkappa_a + sigma * mu;
    VectorXd dx, dz, ds;
    double dtau = 0.0, dkappa = 0.0;
    direction(sigma, rhs_c, rhs_tk, dx, dz, ds, dtau, dkappa);
    const double alpha = std::min(1.0, opts_.step_fraction * step_length(ds, dz, dtau, dkappa));

    x += alpha * dx;
    s += alpha * ds;
    z += alpha * dz;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }
  sol.status = SolveStatus::MaxIters;
  sol.primal = x / tau;
  sol.slack = s / tau;
  sol.dual = z / tau;
  sol.objective = c.dot(x) / tau;
  return fallback(sol);
}

}  // namespace

ConeSolution SocpSolver::solve(const ConeProgram& program) {
  program.validate();
  const auto start = std::chrono::steady_clock::now();
  Workspace ws(program, opts_);
  ConeSolution sol = ws.run();
  sol.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

ConeSolution solve(const ConeProgram& program, const SolverOptions& opts) {
  SocpSolver solver(opts);
  return solver.solve(program);
}

KktReport kkt_report(const ConeProgram& p, const ConeSolution& sol) {
  KktReport rep{0.0, 0.0, 0.0, kInf};
  if (sol.primal.size() == p.num_vars() && sol.slack.size() == p.num_rows()) {
    rep.primal_residual = (p.A * sol.primal + sol.slack - p.b).norm() / (1.0 + p.b.norm());
  }
  const bool have_dual = sol.dual.size() == p.num_rows();
  if (have_dual) {
    rep.dual_residual = (p.A.transpose() * sol.dual + p.c).norm() / (1.0 + p.c.norm());
  }
  int offset = 0;
  for (const auto& cone : p.cones) {
    if (sol.slack.size() == p.num_rows()) {
      const auto sb = sol.slack.segment(offset, cone.dim);
      rep.min_cone_margin = std::min(rep.min_cone_margin, cone_margin(cone, sb));
      if (have_dual) {
        const auto zb = sol.dual.segment(offset, cone.dim);
        rep.max_block_complementarity =
            std::max(rep.max_block_complementarity, std::abs(sb.dot(zb)) / (1.0 + std::abs(sol.objective)));
      }
    }
    if (have_dual) {
      rep.min_cone_margin =
          std::min(rep.min_cone_margin, cone_margin(cone, sol.dual.segment(offset, cone.dim)));
    }
    offset += cone.dim;
  }
  return rep;
}

void write_program(std::ostream& out, const ConeProgram& p) {
  p.validate();
  std::ostringstream buf;
  buf << std::setprecision(17);
  buf << "drsafe-socp 1\n";
  buf << "vars " << p.num_vars() << " rows " << p.num_rows() << " cones " << p.num_cones() << "\n";
  for (const auto& cone : p.cones) {
    buf << (cone.kind == ConeKind::NonNegative ? 'L' : 'Q') << ' ' << cone.dim << "\n";
  }
  auto write_row = [&](const auto& row) {
    for (Eigen::Index j = 0; j < row.size(); ++j) buf << (j ? " " : "") << row(j);
    buf << "\n";
  };
  buf << "A\n";
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) write_row(p.A.row(i));
  buf << "b\n";
  write_row(p.b);
  buf << "c\n";
  write_row(p.c);
  out << buf.str();
}

ConeProgram read_program(std::istream& in) {
  auto fail = [](const std::string& what) -> ConeProgram {
    throw Error(ErrorCode::ParseError, "cone program: " + what);
  };
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "drsafe-socp" || version != 1) {
    return fail("bad header");
  }
  std::string kv, kr, kc;
  int n = 0, r = 0, nc = 0;
  if (!(in >> kv >> n >> kr >> r >> kc >> nc) || kv != "vars" || kr != "rows" || kc != "cones" ||
      n < 0 || r < 0 || nc < 0) {
    return fail("bad dimension line");
  }
  ConeProgram p;
  for (int i = 0; i < nc; ++i) {
    char kind = 0;
    int dim = 0;
    if (!(in >> kind >> dim)) return fail("truncated cone list");
    if (kind == 'L') {
      p.cones.push_back({ConeKind::NonNegative, dim});
    } else if (kind == 'Q') {
      p.cones.push_back({ConeKind::SecondOrder, dim});
    } else {
      return fail(std::string("unknown cone kind '") + kind + "'");
    }
  }
  auto expect = [&](const char* word) {
    std::string got;
    if (!(in >> got) || got != word) fail(std::string("expected section ") + word);
  };
  auto read_values = [&](Eigen::Index count, double* dst) {
    for (Eigen::Index i = 0; i < count; ++i) {
      if (!(in >> dst[i])) fail("truncated numeric data");
    }
  };
  expect("A");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a(r, n);
  read_values(static_cast<Eigen::Index>(r) * n, a.data());
  p.A = a;
  expect("b");
  p.b.resize(r);
  read_values(r, p.b.data());
  expect("c");
  p.c.resize(n);
  read_values(n, p.c.data());
  p.validate();
  return p;
}

}  // namespace drsafe::socp
