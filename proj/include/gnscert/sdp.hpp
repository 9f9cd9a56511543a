#pragma once

#include "gnscert/moment.hpp"
#include "gnscert/poly.hpp"
#include "gnscert/schur.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace gnscert {

// minimize f subject to p_i >= 0.
struct PopProblem {
  int n = 0;
  Polynomial objective;
  std::vector<Polynomial> constraints;

  int max_degree() const;
  void validate() const;
};

// One PSD block of the relaxation: sum_v y_v * coeff[v] >= 0, v over the moment basis (v = 0 is y_0).
struct SdpBlock {
  int side = 0;
  std::string label;
  std::vector<SparseSym> coeff;
};

struct SdpProblem {
  int order = 0;            // relaxation degree k
  MonomialBasis moments;    // V_k, the decision variables
  Eigen::VectorXd cost;     // c_alpha = f_alpha
  std::vector<SdpBlock> blocks;
  int normalization_index = 0;

  Eigen::MatrixXd block_value(int b, const Eigen::VectorXd& y) const;
};

SdpProblem assemble_relaxation(const PopProblem& prob, int k);

enum class SdpStatus { Optimal, MaxIterations, Infeasible, Unbounded, NumericalFailure };
std::string to_string(SdpStatus s);

struct SdpOptions {
  int max_iter = 200;
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  double stall_gap = 1e-6;
  int stall_iters = 20;
  double divergence = 1e12;
  bool parallel_schur = true;
};

struct SdpSolution {
  MomentSequence y;
  double objective_value = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
  double duality_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

SdpSolution solve_sdp(const SdpProblem& sdp, const SdpOptions& opts = {});

// Generic standard form: max b^T y  s.t.  S = C - sum_i y_i A_i >= 0,
// paired with min <C, X>  s.t.  <A_i, X> = b_i, X >= 0.
struct StandardSdp {
  std::vector<int> sides;
  std::vector<Eigen::MatrixXd> C;
  BlockCoefficients A;  // A[b][i]
  Eigen::VectorXd b;
  int num_constraints() const { return static_cast<int>(b.size()); }
};

struct StandardSolution {
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> S;
  double primal_objective = 0.0;  // <C, X>
  double dual_objective = 0.0;    // b^T y
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
  int iterations = 0;
};

// Infeasible-start primal-dual path following, NT scaling, Mehrotra predictor-corrector.
StandardSolution solve_standard(const StandardSdp& sdp, const SdpOptions& opts = {});

}  // namespace gnscert
