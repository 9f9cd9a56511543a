#include "gnscert/schur.hpp"

namespace gnscert {

Eigen::MatrixXd to_dense(const SparseSym& a, int side) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(side, side);
  for (const auto& e : a) d(e.row, e.col) += e.value;
  return d;
}

double inner(const SparseSym& a, const Eigen::MatrixXd& z) {
  double s = 0.0;
  for (const auto& e : a) s += e.value * z(e.row, e.col);
  return s;
}

void add_scaled(Eigen::MatrixXd& z, const SparseSym& a, double s) {
  for (const auto& e : a) z(e.row, e.col) += s * e.value;
}

Eigen::MatrixXd schur_reference(const BlockCoefficients& coeffs, const std::vector<Eigen::MatrixXd>& W, int m) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
  for (size_t b = 0; b < coeffs.size(); ++b) {
    const int side = static_cast<int>(W[b].rows());
    std::vector<Eigen::MatrixXd> dense(m);
    for (int i = 0; i < m; ++i) dense[i] = to_dense(coeffs[b][i], side);
    for (int i = 0; i < m; ++i) {
      if (coeffs[b][i].empty()) continue;
      Eigen::MatrixXd AiW = dense[i] * W[b];
      for (int j = 0; j < m; ++j) {
        if (coeffs[b][j].empty()) continue;
        H(i, j) += (AiW * dense[j] * W[b]).trace();
      }
    }
  }
  return H;
}

Eigen::MatrixXd schur_parallel(const BlockCoefficients& coeffs, const std::vector<Eigen::MatrixXd>& W, int m) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
#pragma omp parallel
  {
    Eigen::MatrixXd T;
#pragma omp for schedule(dynamic, 1)
    for (int j = 0; j < m; ++j) {
      for (size_t b = 0; b < coeffs.size(); ++b) {
        const SparseSym& aj = coeffs[b][j];
        if (aj.empty()) continue;
        const Eigen::MatrixXd& w = W[b];
        // T = W A_j W as a sum of rank-one terms.
        T.setZero(w.rows(), w.cols());
        for (const auto& e : aj) T.noalias() += e.value * w.col(e.row) * w.row(e.col);
        for (int i = j; i < m; ++i) H(i, j) += inner(coeffs[b][i], T);
      }
    }
  }
  H.triangularView<Eigen::StrictlyUpper>() = H.transpose().triangularView<Eigen::StrictlyUpper>();
  return H;
}

}  // namespace gnscert
