#pragma once

#include <Eigen/Dense>

#include <vector>

namespace gnscert {

struct SymEntry {
  int row;
  int col;
  double value;
};

// Sparse symmetric matrix; both (r,c) and (c,r) are listed for off-diagonal entries.
using SparseSym = std::vector<SymEntry>;

// coeffs[b][i]: matrix of constraint i restricted to block b.
using BlockCoefficients = std::vector<std::vector<SparseSym>>;

// H_ij = sum_b tr(A_i W_b A_j W_b).
// Dense triple loop over every (i, j); kept as the serial oracle.
Eigen::MatrixXd schur_reference(const BlockCoefficients& coeffs, const std::vector<Eigen::MatrixXd>& W, int m);

// Sparse column-wise assembly, OpenMP-parallel over j. Each entry is written by one thread
// with a fixed summation order, so the result does not depend on the thread count.
Eigen::MatrixXd schur_parallel(const BlockCoefficients& coeffs, const std::vector<Eigen::MatrixXd>& W, int m);

Eigen::MatrixXd to_dense(const SparseSym& a, int side);
double inner(const SparseSym& a, const Eigen::MatrixXd& z);  // <A, Z>
void add_scaled(Eigen::MatrixXd& z, const SparseSym& a, double s);  // Z += s A

}  // namespace gnscert
