#pragma once

#include "gnscert/moment.hpp"
#include "gnscert/poly.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gnscert {

// V-ordered Gram-Schmidt under <p,q> = P^T M Q. Candidate m is dropped when its residual
// squared norm is <= tol * max(L(m^2), L(1)).
struct GramSchmidt {
  Eigen::MatrixXd basis;    // s_D x r, columns orthonormal under M
  std::vector<int> pivots;  // candidate index of each basis column
  std::vector<Eigen::VectorXd> residuals;  // residuals of the dropped candidates
  int rank_low = 0;         // accepted candidates of degree <= D-1
  int rank_full = 0;        // accepted candidates overall
};
GramSchmidt gram_schmidt(const MomentMatrix& M, double tol);

int numerical_rank(const MomentMatrix& M, double tol);

std::vector<Polynomial> kernel_basis(const MomentMatrix& M, double tol);
std::vector<Polynomial> truncation_basis(const MomentMatrix& M, double tol);

// (M_i)_jk = L(X_i b_j b_k), one matrix per variable.
std::vector<Eigen::MatrixXd> multiplication_operators(const MomentMatrix& M, const std::vector<Polynomial>& basis);

int max_commutator_rank(const std::vector<Eigen::MatrixXd>& ops, double tol);
double max_commutator_norm(const std::vector<Eigen::MatrixXd>& ops);  // largest singular value
double operator_scale(const std::vector<Eigen::MatrixXd>& ops);      // max(1, max ||M_i||_2^2)

struct ModifiedMoment {
  Eigen::MatrixXd m_tilde;
  Eigen::MatrixXd W;
  double residual;  // max |AW - B|
};
ModifiedMoment modified_moment_matrix(const MomentMatrix& M, double tol);

bool is_flat(const MomentMatrix& M, double tol);

struct GnsModel {
  MomentMatrix source;
  double rank_tol = 0.0;
  std::vector<Polynomial> kernel_basis;
  std::vector<Polynomial> truncation_basis;
  Eigen::MatrixXd coords;  // coefficient columns of truncation_basis (s_D x r)
  std::vector<Eigen::MatrixXd> ops;
  Eigen::MatrixXd W;
  Eigen::MatrixXd m_tilde;
  int rank_A = 0;
  int rank_M = 0;

  int dim() const { return static_cast<int>(truncation_basis.size()); }
  bool flat() const { return rank_A == rank_M; }
  // Coordinates of the class of 1 in the truncation basis: (L(b_j))_j.
  Eigen::VectorXd one_coords() const;
};
GnsModel build_gns(const MomentMatrix& M, double tol);

enum class HankelStatus { Flat, HankelNotFlat, NotHankel };
std::string to_string(HankelStatus s);

struct HankelCertificate {
  HankelStatus status = HankelStatus::NotHankel;
  Eigen::MatrixXd m_tilde;
  double deviation = 0.0;
  int commutator_rank = 0;
  double commutator_norm = 0.0;
  std::vector<std::string> warnings;
};
HankelCertificate certify_hankel(const MomentMatrix& M, double tol_rank, double tol_hankel);
HankelCertificate certify_hankel(const GnsModel& model, double tol_hankel);

}  // namespace gnscert
