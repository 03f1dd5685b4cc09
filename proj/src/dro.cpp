#include "drsafe/dro.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "drsafe/error.hpp"

namespace drsafe::dro {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SampleSet::SampleSet(MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1) throw Error(ErrorCode::EmptyInput, "sample set needs N >= 1");
  if (rows_.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "samples need k >= 1");
  if (!rows_.allFinite()) throw Error(ErrorCode::InvalidConfig, "samples must be finite");
}

double SampleSet::max_norm() const { return rows_.rowwise().norm().maxCoeff(); }

SampleSet SampleSet::appended(const SampleSet& more) const {
  if (more.dim() != dim()) throw Error(ErrorCode::DimensionMismatch, "appended samples differ in k");
  MatrixXd all(size() + more.size(), dim());
  all << rows_, more.rows_;
  return SampleSet(std::move(all));
}

SampleSet SampleSet::head(int count) const {
  if (count < 1 || count > size()) throw Error(ErrorCode::InvalidConfig, "head: bad count");
  return SampleSet(rows_.topRows(count));
}

SampleSet read_samples_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "samples line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ParseError, "samples line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(rows.front().size()) + " columns");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "sample file has no rows");
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  return SampleSet(std::move(out));
}

void write_samples_csv(std::ostream& out, const SampleSet& samples) {
  out << std::setprecision(17);
  for (int i = 0; i < samples.size(); ++i) {
    for (int j = 0; j < samples.dim(); ++j) out << (j ? "," : "") << samples.rows()(i, j);
    out << '\n';
  }
}

double cvar_empirical(std::span<const double> values, double eps) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "cvar_empirical needs values");
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorCode::InvalidConfig, "eps must lie in (0,1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double scale = 1.0 / (static_cast<double>(sorted.size()) * eps);
  double best = std::numeric_limits<double>::infinity();
  double above = 0.0;  // sum of the values ahead of j in descending order
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    // Objective at t = -sorted[j]; entries behind j contribute (v + t)_+ = 0.
    const double hinge = above - static_cast<double>(j) * sorted[j];
    best = std::min(best, scale * hinge + sorted[j]);
    above += sorted[j];
  }
  return best;
}

double radius_schedule(int n_samples, const AmbiguityConfig& cfg) {
  if (n_samples < 1) throw Error(ErrorCode::InvalidConfig, "radius_schedule needs N >= 1");
  if (!(cfg.c1 > 0 && cfg.c2 > 0 && cfg.a > 0 && cfg.eps_bar > 0) || cfg.k < 1) {
    throw Error(ErrorCode::InvalidConfig, "radius constants c1, c2, a, eps_bar must be positive");
  }
  const double log_term = std::log(cfg.c1 / cfg.eps_bar);
  if (!(log_term > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "log(c1/eps_bar) must be positive (need c1 > eps_bar)");
  }
  const double base = log_term / (cfg.c2 * n_samples);
  const double exponent = n_samples >= log_term / cfg.c2
                              ? 1.0 / std::max(cfg.k, 2)
                              : 1.0 / cfg.a;
  return std::pow(base, exponent);
}

void ProblemInstance::validate() const {
  if (constraints.empty()) throw Error(ErrorCode::InvalidConfig, "need at least one constraint");
  if (!samples) throw Error(ErrorCode::EmptyInput, "problem has no samples");
  for (const auto& c : constraints) {
    if (c.q.size() != m() + 1 || c.R.rows() != m() + 1 || c.R.cols() != k()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "constraint '" + c.label + "' does not match (m+1, k) = (" +
                      std::to_string(m() + 1) + ", " + std::to_string(k()) + ")");
    }
  }
  if (!(ambiguity.r >= 0.0)) throw Error(ErrorCode::InvalidConfig, "radius r must be >= 0");
  if (!(ambiguity.eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "eps must be positive");
  if (ambiguity.eps * N() > 1.0 + 1e-12) {
    throw Error(ErrorCode::EpsTooLarge, "eps = " + std::to_string(ambiguity.eps) +
                                            " exceeds 1/N with N = " + std::to_string(N()));
  }
}

ProblemInstance normalized(const ProblemInstance& inst) {
  ProblemInstance out = inst;
  for (auto& c : out.constraints) {
    const int m = c.m();
    double scale = std::max(c.q.tail(m).lpNorm<Eigen::Infinity>(),
                            c.R.bottomRows(m).lpNorm<Eigen::Infinity>());
    if (!(scale > 0.0)) scale = std::max(c.q.lpNorm<Eigen::Infinity>(), c.R.lpNorm<Eigen::Infinity>());
    if (scale > 0.0 && std::isfinite(scale)) {
      c.q /= scale;
      c.R /= scale;
    }
  }
  return out;
}

ProblemInstance SynthesisProblem::at(const StateVec& x) const {
  if (!nominal) throw Error(ErrorCode::InvalidConfig, "problem has no nominal controller");
  ProblemInstance inst{{}, nominal(x), ambiguity, samples};
  inst.constraints.reserve(constraints.size());
  for (const auto& field : constraints) inst.constraints.push_back(field(x));
  return inst;
}

SynthesisProblem SynthesisProblem::constant(std::vector<ConstraintData> constraints,
                                            ExtControl nominal, AmbiguityConfig ambiguity,
                                            SampleSet samples) {
  SynthesisProblem p;
  for (auto& c : constraints) {
    p.constraints.push_back([c](const StateVec&) { return c; });
  }
  p.nominal = [nominal](const StateVec&) { return nominal; };
  p.ambiguity = ambiguity;
  p.samples = std::make_shared<const SampleSet>(std::move(samples));
  return p;
}

double SocConstraint::margin(const VectorXd& u) const {
  return c.dot(u) + d - (A * u + b).norm();
}

std::vector<SocConstraint> reduce_to_soc(const ProblemInstance& p, int l) {
  p.validate();
  if (l < 0 || l >= p.M()) throw Error(ErrorCode::InvalidConfig, "constraint index out of range");
  const auto& con = p.constraints[static_cast<std::size_t>(l)];
  const int m = p.m();
  const double r = p.ambiguity.r;
  const double eps = p.ambiguity.eps;
  // r R^T [1; u] = r R_0^T + r R_{1:}^T u, shared by every sample.
  const MatrixXd a = r * con.R.bottomRows(m).transpose();
  const VectorXd b = r * con.R.row(0).transpose();
  std::vector<SocConstraint> out;
  out.reserve(static_cast<std::size_t>(p.N()));
  for (int i = 0; i < p.N(); ++i) {
    const VectorXd g = con.q + con.R * p.samples->sample(i);
    out.push_back(SocConstraint{a, b, -eps * g.tail(m), -eps * g(0)});
  }
  return out;
}

namespace {

// True when r R^T u vanishes identically, so the cone collapses to a row.
bool degenerate_norm(const ConstraintData& c, double r) { return r == 0.0 || c.R.isZero(0.0); }

// Row builder: rows are appended into cone blocks and concatenated in
// block order at the end.
struct RowBlock {
  socp::Cone cone;
  MatrixXd a;
  VectorXd b;
};

socp::ConeProgram stack(const std::vector<RowBlock>& blocks, VectorXd c) {
  socp::ConeProgram prog;
  int rows = 0;
  for (const auto& blk : blocks) rows += static_cast<int>(blk.b.size());
  prog.c = std::move(c);
  prog.A = MatrixXd::Zero(rows, prog.c.size());
  prog.b = VectorXd::Zero(rows);
  int off = 0;
  for (const auto& blk : blocks) {
    const auto n = blk.b.size();
    if (n == 0) continue;
    prog.A.middleRows(off, n) = blk.a;
    prog.b.segment(off, n) = blk.b;
    prog.cones.push_back(blk.cone);
    off += static_cast<int>(n);
  }
  return prog;
}

// Scale of the objective cone, of the order of |k|^2 so the cone stays well
// conditioned when the nominal control is large.
double epigraph_weight(const ProblemInstance& p) { return 1.0 + p.nominal.input().squaredNorm(); }

// y + w >= |(2 sqrt(w) (u - k), y - w)| written as b - A x in Q^{m+2}; this
// holds iff y >= |u - k|^2 for any w > 0.
RowBlock epigraph_block(const ProblemInstance& p, int n_vars, int u_off, int y_idx) {
  const int m = p.m();
  const double w = epigraph_weight(p);
  const double root = 2.0 * std::sqrt(w);
  RowBlock blk{{socp::ConeKind::SecondOrder, m + 2}, MatrixXd::Zero(m + 2, n_vars),
               VectorXd::Zero(m + 2)};
  blk.a(0, y_idx) = -1.0;
  blk.b(0) = w;
  for (int j = 0; j < m; ++j) blk.a(1 + j, u_off + j) = -root;
  blk.b.segment(1, m) = -root * p.nominal.input();
  blk.a(m + 1, y_idx) = -1.0;
  blk.b(m + 1) = -w;
  return blk;
}

}  // namespace

EpigraphProgram assemble_epigraph_socp(const ProblemInstance& p) {
  p.validate();
  const int m = p.m();
  const int k = p.k();
  const int big_m = p.M();
  const int n = p.N();
  const double r = p.ambiguity.r;
  const double eps = p.ambiguity.eps;

  EpigraphLayout lay;
  lay.u = 0;
  lay.y = m;
  lay.t = m + 1;
  lay.s = m + 1 + big_m;
  lay.n_vars = lay.s + big_m * n;

  std::vector<RowBlock> cones;
  MatrixXd lin_a = MatrixXd::Zero(2 * big_m * n + big_m, lay.n_vars);
  VectorXd lin_b = VectorXd::Zero(lin_a.rows());
  int lin_rows = 0;

  for (int l = 0; l < big_m; ++l) {
    const auto& con = p.constraints[static_cast<std::size_t>(l)];
    // eps t_l - mean_i s_{l,i} >= r |R_l^T u|
    VectorXd head = VectorXd::Zero(lay.n_vars);
    head(lay.t + l) = -eps;
    head.segment(lay.s + l * n, n).setConstant(1.0 / n);
    if (degenerate_norm(con, r)) {
      lin_a.row(lin_rows++) = head.transpose();
    } else {
      RowBlock blk{{socp::ConeKind::SecondOrder, k + 1}, MatrixXd::Zero(k + 1, lay.n_vars),
                   VectorXd::Zero(k + 1)};
      blk.a.row(0) = head.transpose();
      blk.a.block(1, lay.u, k, m) = -r * con.R.bottomRows(m).transpose();
      blk.b.tail(k) = r * con.R.row(0).transpose();
      cones.push_back(std::move(blk));
    }
    for (int i = 0; i < n; ++i) {
      const VectorXd g = con.q + con.R * p.samples->sample(i);
      const int s_idx = lay.s + l * n + i;
      // s_{l,i} - t_l - g_0 - g_{1:}^T u >= 0
      lin_a.block(lin_rows, lay.u, 1, m) = g.tail(m).transpose();
      lin_a(lin_rows, lay.t + l) = 1.0;
      lin_a(lin_rows, s_idx) = -1.0;
      lin_b(lin_rows) = -g(0);
      ++lin_rows;
      lin_a(lin_rows, s_idx) = -1.0;
      ++lin_rows;
    }
  }

  std::vector<RowBlock> blocks = std::move(cones);
  blocks.push_back(RowBlock{{socp::ConeKind::NonNegative, lin_rows}, lin_a.topRows(lin_rows),
                            lin_b.head(lin_rows)});
  blocks.push_back(epigraph_block(p, lay.n_vars, lay.u, lay.y));
  VectorXd c = VectorXd::Zero(lay.n_vars);
  c(lay.y) = 1.0;
  return EpigraphProgram{stack(blocks, std::move(c)), lay};
}

socp::ConeProgram assemble_reduced_socp(const ProblemInstance& p, double margin) {
  p.validate();
  const int m = p.m();
  const int k = p.k();
  const int n_vars = m + 1;
  const int y_idx = m;

  std::vector<RowBlock> blocks;
  RowBlock lin{{socp::ConeKind::NonNegative, 0}, MatrixXd::Zero(p.M() * p.N(), n_vars),
               VectorXd::Zero(p.M() * p.N())};
  int lin_rows = 0;
  for (int l = 0; l < p.M(); ++l) {
    const bool flat = degenerate_norm(p.constraints[static_cast<std::size_t>(l)], p.ambiguity.r);
    for (const auto& soc : reduce_to_soc(p, l)) {
      // c^T u + d - margin >= |A u + b|
      if (flat) {
        lin.a.block(lin_rows, 0, 1, m) = -soc.c.transpose();
        lin.b(lin_rows) = soc.d - margin;
        ++lin_rows;
        continue;
      }
      RowBlock blk{{socp::ConeKind::SecondOrder, k + 1}, MatrixXd::Zero(k + 1, n_vars),
                   VectorXd::Zero(k + 1)};
      blk.a.block(0, 0, 1, m) = -soc.c.transpose();
      blk.b(0) = soc.d - margin;
      blk.a.block(1, 0, k, m) = -soc.A;
      blk.b.tail(k) = soc.b;
      blocks.push_back(std::move(blk));
    }
  }
  if (lin_rows > 0) {
    lin.cone.dim = lin_rows;
    lin.a.conservativeResize(lin_rows, Eigen::NoChange);
    lin.b.conservativeResize(lin_rows);
    blocks.push_back(std::move(lin));
  }
  blocks.push_back(epigraph_block(p, n_vars, 0, y_idx));
  VectorXd c = VectorXd::Zero(n_vars);
  c(y_idx) = 1.0;
  return stack(blocks, std::move(c));
}

}  // namespace drsafe::dro
