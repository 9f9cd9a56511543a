#include "gnscert/moment.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gnscert {

MomentSequence::MomentSequence(int n, int k) : basis(n, k), y(Eigen::VectorXd::Zero(basis.size())) {}

double MomentSequence::at(const Monomial& m) const {
  int i = basis.index_of(m);
  if (i < 0) throw std::out_of_range("moment degree exceeds sequence");
  return y[i];
}

double& MomentSequence::at(const Monomial& m) {
  int i = basis.index_of(m);
  if (i < 0) throw std::out_of_range("moment degree exceeds sequence");
  return y[i];
}

MomentSequence atomic_moments(int n, int k, const std::vector<Eigen::VectorXd>& nodes,
                              const std::vector<double>& weights) {
  if (nodes.size() != weights.size()) throw std::invalid_argument("nodes/weights size mismatch");
  MomentSequence s(n, k);
  for (size_t j = 0; j < nodes.size(); ++j) s.y += weights[j] * s.basis.evaluate(nodes[j]);
  return s;
}

MomentMatrix::MomentMatrix(int n, int order_, Eigen::MatrixXd e)
    : order(order_), basis(n, order_), entries(std::move(e)) {
  if (entries.rows() != basis.size() || entries.cols() != basis.size())
    throw std::invalid_argument("moment matrix side does not match s_order");
}

double MomentMatrix::scale() const { return std::max(1.0, entries.cwiseAbs().maxCoeff()); }

MomentMatrix moment_matrix(const MomentSequence& y, int order) {
  if (2 * order > y.max_degree()) throw std::invalid_argument("moment matrix order exceeds sequence degree");
  MonomialBasis b(y.nvars(), order);
  Eigen::MatrixXd m(b.size(), b.size());
  for (int i = 0; i < b.size(); ++i)
    for (int j = i; j < b.size(); ++j) m(i, j) = m(j, i) = y.at(b[i] + b[j]);
  return MomentMatrix(y.nvars(), order, std::move(m));
}

Eigen::MatrixXd localizing_matrix(const MomentSequence& y, const Polynomial& p, int k) {
  if (p.is_zero()) throw std::invalid_argument("localizing matrix of the zero polynomial");
  int dp = p.degree();
  if (dp > k || k > y.max_degree()) throw std::invalid_argument("localizing degree out of range");
  MonomialBasis b(y.nvars(), (k - dp) / 2);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(b.size(), b.size());
  for (int i = 0; i < b.size(); ++i)
    for (int j = i; j < b.size(); ++j) {
      Monomial ab = b[i] + b[j];
      double s = 0.0;
      for (const auto& [g, c] : p.terms()) s += c * y.at(ab + g);
      m(i, j) = m(j, i) = s;
    }
  return m;
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
  if (m.size() == 0) return m;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw std::invalid_argument("matrix not symmetric");
  return 0.5 * (m + m.transpose());
}

PsdResult psd_check(const Eigen::MatrixXd& m, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(m, std::max(tol, 1e-8)),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  double lmin = ev[0], lmax = ev[ev.size() - 1];
  return {lmin >= -tol * std::max(1.0, lmax), lmin};
}

HankelResult is_generalized_hankel(const Eigen::MatrixXd& m, const MonomialBasis& basis, double tol) {
  if (m.rows() != basis.size() || m.cols() != basis.size())
    throw std::invalid_argument("matrix side does not match basis");
  MonomialBasis sums(basis.nvars(), 2 * basis.max_degree());
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(sums.size(), INFINITY);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(sums.size(), -INFINITY);
  for (int i = 0; i < basis.size(); ++i)
    for (int j = 0; j < basis.size(); ++j) {
      int g = sums.index_of(basis[i] + basis[j]);
      lo[g] = std::min(lo[g], m(i, j));
      hi[g] = std::max(hi[g], m(i, j));
    }
  double dev = 0.0;
  for (int g = 0; g < sums.size(); ++g)
    if (hi[g] >= lo[g]) dev = std::max(dev, hi[g] - lo[g]);
  double scale = m.size() ? std::max(1.0, m.cwiseAbs().maxCoeff()) : 1.0;
  return {dev <= tol * scale, dev};
}

double linear_form_apply(const MomentSequence& y, const Polynomial& p) {
  if (p.degree() > y.max_degree()) throw std::invalid_argument("polynomial degree exceeds moments");
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * y.at(m);
  return s;
}

MomentSequence moments_from_matrix(const MomentMatrix& m) {
  MomentSequence s(m.nvars(), 2 * m.order);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(s.basis.size());
  for (int i = 0; i < m.side(); ++i)
    for (int j = 0; j < m.side(); ++j) {
      int g = s.basis.index_of(m.basis[i] + m.basis[j]);
      s.y[g] += m.entries(i, j);
      count[g] += 1.0;
    }
  s.y.array() /= count.array();
  return s;
}

}  // namespace gnscert
