#pragma once

#include "gnscert/poly.hpp"

#include <Eigen/Dense>

#include <vector>

namespace gnscert {

// Pseudo-moments y_alpha for |alpha| <= k, stored in V_k order.
struct MomentSequence {
  MonomialBasis basis;
  Eigen::VectorXd y;

  MomentSequence() = default;
  MomentSequence(int n, int k);

  int nvars() const { return basis.nvars(); }
  int max_degree() const { return basis.max_degree(); }
  double at(const Monomial& m) const;
  double& at(const Monomial& m);
};

// Moments of sum_j w_j ev(a_j).
MomentSequence atomic_moments(int n, int k, const std::vector<Eigen::VectorXd>& nodes,
                              const std::vector<double>& weights);

struct MomentMatrix {
  int order = 0;
  MonomialBasis basis;
  Eigen::MatrixXd entries;

  MomentMatrix() = default;
  MomentMatrix(int n, int order, Eigen::MatrixXd entries);
  int nvars() const { return basis.nvars(); }
  int side() const { return basis.size(); }
  double scale() const;  // max(1, max |entry|)
};

MomentMatrix moment_matrix(const MomentSequence& y, int order);

// Side s_{floor((k - deg p)/2)}.
Eigen::MatrixXd localizing_matrix(const MomentSequence& y, const Polynomial& p, int k);

struct PsdResult {
  bool is_psd;
  double min_eigenvalue;
};
PsdResult psd_check(const Eigen::MatrixXd& m, double tol);

struct HankelResult {
  bool is_hankel;
  double max_deviation;
};
// Passes when every group spread is <= tol * max(1, max |entry|).
HankelResult is_generalized_hankel(const Eigen::MatrixXd& m, const MonomialBasis& basis, double tol);

double linear_form_apply(const MomentSequence& y, const Polynomial& p);

// Moments up to degree 2*order read off a matrix; each value is the mean of its Hankel group.
MomentSequence moments_from_matrix(const MomentMatrix& m);

// (M + M^T)/2; throws if the asymmetry exceeds tol * scale.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m, double tol = 1e-8);

}  // namespace gnscert
