#include "gnscert/gns.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gnscert {

namespace {

void require_order(const MomentMatrix& M) {
  if (M.order < 1) throw std::invalid_argument("GNS construction needs a moment matrix of order >= 1");
}

}  // namespace

GramSchmidt gram_schmidt(const MomentMatrix& M, double tol) {
  require_order(M);
  const Eigen::MatrixXd G = symmetrized(M.entries);
  const int sD = M.side();
  const int sL = M.basis.count_up_to(M.order - 1);
  const double l1 = std::abs(G(0, 0));

  std::vector<Eigen::VectorXd> q;
  GramSchmidt gs;
  for (int c = 0; c < sD; ++c) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(sD, c);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : q) v -= (b.dot(G * v)) * b;
    double r2 = v.dot(G * v);
    double thresh = tol * std::max({G(c, c), l1, std::numeric_limits<double>::min()});
    if (r2 <= thresh) {
      gs.residuals.push_back(v);
      continue;
    }
    q.push_back(v / std::sqrt(r2));
    gs.pivots.push_back(c);
    if (c < sL) ++gs.rank_low;
  }
  gs.rank_full = static_cast<int>(q.size());
  gs.basis.resize(sD, gs.rank_full);
  for (int j = 0; j < gs.rank_full; ++j) gs.basis.col(j) = q[j];
  return gs;
}

int numerical_rank(const MomentMatrix& M, double tol) { return gram_schmidt(M, tol).rank_full; }

std::vector<Polynomial> kernel_basis(const MomentMatrix& M, double tol) {
  GramSchmidt gs = gram_schmidt(M, tol);
  std::vector<Polynomial> out;
  for (const auto& r : gs.residuals) out.push_back(devectorize(r, M.basis));
  return out;
}

std::vector<Polynomial> truncation_basis(const MomentMatrix& M, double tol) {
  GramSchmidt gs = gram_schmidt(M, tol);
  std::vector<Polynomial> out;
  for (int j = 0; j < gs.rank_low; ++j) out.push_back(devectorize(gs.basis.col(j), M.basis));
  return out;
}

std::vector<Eigen::MatrixXd> multiplication_operators(const MomentMatrix& M, const std::vector<Polynomial>& basis) {
  require_order(M);
  const Eigen::MatrixXd G = symmetrized(M.entries);
  const int n = M.nvars(), r = static_cast<int>(basis.size());
  std::vector<Eigen::VectorXd> coef;
  for (const auto& b : basis) {
    if (b.degree() > M.order - 1) throw std::invalid_argument("truncation basis element of too high degree");
    coef.push_back(vectorize(b, M.basis));
  }
  std::vector<Eigen::MatrixXd> ops;
  for (int i = 0; i < n; ++i) {
    Polynomial xi = Polynomial::variable(n, i);
    Eigen::MatrixXd op(r, r);
    for (int j = 0; j < r; ++j) {
      Eigen::VectorXd shifted = vectorize(xi * basis[j], M.basis);
      Eigen::VectorXd row = G * shifted;
      for (int k = 0; k < r; ++k) op(j, k) = row.dot(coef[k]);
    }
    ops.push_back(0.5 * (op + op.transpose()));
  }
  return ops;
}

double operator_scale(const std::vector<Eigen::MatrixXd>& ops) {
  double s = 1.0;
  for (const auto& o : ops) {
    if (o.size() == 0) continue;
    double nrm = Eigen::JacobiSVD<Eigen::MatrixXd>(o).singularValues()[0];
    s = std::max(s, nrm * nrm);
  }
  return s;
}

double max_commutator_norm(const std::vector<Eigen::MatrixXd>& ops) {
  double best = 0.0;
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j) {
      if (ops[i].size() == 0) continue;
      Eigen::MatrixXd c = ops[i] * ops[j] - ops[j] * ops[i];
      best = std::max(best, Eigen::JacobiSVD<Eigen::MatrixXd>(c).singularValues()[0]);
    }
  return best;
}

int max_commutator_rank(const std::vector<Eigen::MatrixXd>& ops, double tol) {
  // Singular values below tol relative to the operator scale are noise even when they dominate the commutator.
  const double floor = std::max(tol, 1e-10) * operator_scale(ops);
  int best = 0;
  for (size_t i = 0; i < ops.size(); ++i)
    for (size_t j = i + 1; j < ops.size(); ++j) {
      if (ops[i].rows() != ops[j].rows()) throw std::invalid_argument("operators of different size");
      if (ops[i].size() == 0) continue;
      Eigen::MatrixXd c = ops[i] * ops[j] - ops[j] * ops[i];
      Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(c).singularValues();
      double cut = std::max(tol * sv[0], floor);
      int rk = 0;
      for (int k = 0; k < sv.size(); ++k) rk += sv[k] > cut;
      best = std::max(best, rk);
    }
  return best;
}

namespace {

ModifiedMoment modified_from(const MomentMatrix& M, const GramSchmidt& gs, double tol) {
  const Eigen::MatrixXd G = symmetrized(M.entries);
  const int sD = M.side(), sL = M.basis.count_up_to(M.order - 1);
  Eigen::MatrixXd A = G.topLeftCorner(sL, sL);
  Eigen::MatrixXd B = G.topRightCorner(sL, sD - sL);
  Eigen::MatrixXd Q = gs.basis.topLeftCorner(sL, gs.rank_low);
  ModifiedMoment mm;
  mm.W = Q * (Q.transpose() * B);
  Eigen::MatrixXd AW = A * mm.W;
  mm.residual = (AW - B).cwiseAbs().maxCoeff();
  if (mm.residual > std::sqrt(tol) * M.scale())
    throw std::runtime_error("AW = B not solvable within tolerance; matrix is not a valid moment matrix");
  mm.m_tilde.resize(sD, sD);
  mm.m_tilde.topLeftCorner(sL, sL) = A;
  mm.m_tilde.topRightCorner(sL, sD - sL) = AW;
  mm.m_tilde.bottomLeftCorner(sD - sL, sL) = AW.transpose();
  Eigen::MatrixXd C = mm.W.transpose() * A * mm.W;
  mm.m_tilde.bottomRightCorner(sD - sL, sD - sL) = 0.5 * (C + C.transpose());
  return mm;
}

}  // namespace

ModifiedMoment modified_moment_matrix(const MomentMatrix& M, double tol) {
  return modified_from(M, gram_schmidt(M, tol), tol);
}

bool is_flat(const MomentMatrix& M, double tol) {
  GramSchmidt gs = gram_schmidt(M, tol);
  return gs.rank_low == gs.rank_full;
}

Eigen::VectorXd GnsModel::one_coords() const {
  Eigen::MatrixXd G = symmetrized(source.entries);
  return (G.row(0) * coords).transpose();
}

GnsModel build_gns(const MomentMatrix& M, double tol) {
  GramSchmidt gs = gram_schmidt(M, tol);
  GnsModel g;
  g.source = M;
  g.rank_tol = tol;
  for (const auto& r : gs.residuals) g.kernel_basis.push_back(devectorize(r, M.basis));
  g.coords = gs.basis.leftCols(gs.rank_low);
  for (int j = 0; j < gs.rank_low; ++j) g.truncation_basis.push_back(devectorize(gs.basis.col(j), M.basis));
  g.ops = multiplication_operators(M, g.truncation_basis);
  ModifiedMoment mm = modified_from(M, gs, tol);
  g.W = mm.W;
  g.m_tilde = mm.m_tilde;
  g.rank_A = gs.rank_low;
  g.rank_M = gs.rank_full;
  return g;
}

std::string to_string(HankelStatus s) {
  switch (s) {
    case HankelStatus::Flat: return "Flat";
    case HankelStatus::HankelNotFlat: return "HankelNotFlat";
    case HankelStatus::NotHankel: return "NotHankel";
  }
  return "?";
}

HankelCertificate certify_hankel(const MomentMatrix& M, double tol_rank, double tol_hankel) {
  return certify_hankel(build_gns(M, tol_rank), tol_hankel);
}

HankelCertificate certify_hankel(const GnsModel& g, double tol_hankel) {
  const MomentMatrix& M = g.source;
  const double tol_rank = g.rank_tol;
  HankelCertificate hc;
  hc.m_tilde = g.m_tilde;
  HankelResult hr = is_generalized_hankel(g.m_tilde, M.basis, tol_hankel);
  hc.deviation = hr.max_deviation;
  // A flat matrix has M~ = M, so Flat still needs the Hankel structure of M itself.
  if (!hr.is_hankel) hc.status = HankelStatus::NotHankel;
  else hc.status = g.flat() ? HankelStatus::Flat : HankelStatus::HankelNotFlat;

  hc.commutator_rank = max_commutator_rank(g.ops, tol_rank);
  hc.commutator_norm = max_commutator_norm(g.ops);
  bool commuting = hc.commutator_norm <= tol_hankel * operator_scale(g.ops);
  bool hankel = hc.status != HankelStatus::NotHankel;
  if (commuting != hankel) {
    std::ostringstream os;
    os << "Hankel test (" << to_string(hc.status) << ", deviation " << hc.deviation
       << ") disagrees with commutator test (norm " << hc.commutator_norm << ")";
    hc.warnings.push_back(os.str());
  }
  PsdResult psd = psd_check(M.entries, tol_rank);
  if (!psd.is_psd) {
    std::ostringstream os;
    os << "moment matrix not PSD within tolerance (min eigenvalue " << psd.min_eigenvalue << ")";
    hc.warnings.push_back(os.str());
  }
  return hc;
}

}  // namespace gnscert
