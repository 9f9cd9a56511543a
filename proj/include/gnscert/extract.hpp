#pragma once

#include "gnscert/gns.hpp"
#include "gnscert/moment.hpp"
#include "gnscert/sdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnscert {

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureRule {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

// Orthogonal P with P^T M_i P diagonal for all i. Throws NumericalFailure.
Eigen::MatrixXd simultaneous_diagonalize(const std::vector<Eigen::MatrixXd>& ops, std::uint64_t seed, double tol);

inline constexpr double kWeightPrune = 1e-8;
inline constexpr double kNodeMerge = 1e-6;

// Nodes come back sorted lexicographically.
QuadratureRule extract_quadrature(const GnsModel& model, std::uint64_t seed, double tol,
                                  std::vector<std::string>* log = nullptr);

// Levenberg-Marquardt refinement of nodes and weights against the moments of degree <= max_degree.
// Steps that do not reduce the residual or make a weight nonpositive are rejected.
// Returns the final max residual.
double polish_quadrature(const MomentSequence& L, int max_degree, QuadratureRule& rule);

// max over |m| <= max_degree of |L(m) - sum_j w_j m(a_j)|, with L read from M.
double verify_quadrature(const MomentMatrix& M, const QuadratureRule& rule, int max_degree);
// max |m_tilde - sum_j w_j V(a_j) V(a_j)^T|.
double reconstruction_error(const Eigen::MatrixXd& m_tilde, const MonomialBasis& basis, const QuadratureRule& rule);

int moller_bound(const GnsModel& model, double tol);

struct FeasibilityReport {
  std::vector<bool> feasible;
  double worst_violation = 0.0;  // max over nodes and constraints of -p(a), floored at 0
  bool all() const;
};
FeasibilityReport check_feasibility(const std::vector<Eigen::VectorXd>& nodes, const std::vector<Polynomial>& constraints,
                                    double tol);

enum class CertStatus {
  OptimalCertified,
  GaussianRuleFoundNodesInfeasible,
  GaussianRuleFoundDegreeGap,
  Flat,
  Inconclusive,
  MollerExcluded
};
std::string to_string(CertStatus s);

struct CertifyOptions {
  double tol_rank = 1e-6;
  double tol_hankel = 1e-4;
  double tol_feas = 1e-5;
  std::uint64_t seed = 0;
  std::optional<int> minimizer_cap;
};

struct Certificate {
  CertStatus status = CertStatus::Inconclusive;
  HankelStatus hankel = HankelStatus::NotHankel;
  double relaxation_value = 0.0;
  std::optional<QuadratureRule> rule;
  std::optional<int> moller_lower_bound;
  int dim_T = 0;
  int rank_M = 0;
  int commutator_rank = 0;
  double hankel_deviation = 0.0;
  double quadrature_error = 0.0;
  Eigen::VectorXd first_moment;
  std::vector<std::string> diagnostics;
};

// M is the moment block of a degree-k relaxation with value `value`.
Certificate certify(const PopProblem& prob, const MomentMatrix& M, int k, double value, const CertifyOptions& opts);

// GNS analysis and extraction without a problem: Flat when the matrix is flat, otherwise Inconclusive.
Certificate analyze_matrix(const MomentMatrix& M, const CertifyOptions& opts);

}  // namespace gnscert
