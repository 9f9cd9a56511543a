#pragma once

#include "gnscert/extract.hpp"
#include "gnscert/sdp.hpp"

#include <optional>
#include <vector>

namespace gnscert {

struct RunConfig {
  std::optional<int> k_start;  // default: max degree of the problem
  std::optional<int> k_max;    // default: k_start + 6
  double tol_rank = 1e-6;
  double tol_hankel = 1e-4;
  double tol_feas = 1e-5;
  double gap_tol = 1e-8;
  std::uint64_t seed = 0;
  std::optional<int> minimizer_cap;
};

struct LevelRecord {
  int k = 0;
  SdpStatus solver_status = SdpStatus::NumericalFailure;
  double value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::optional<Certificate> certificate;
  std::vector<std::string> diagnostics;
};

struct RunReport {
  std::vector<LevelRecord> levels;
  CertStatus final_status = CertStatus::Inconclusive;
  std::optional<QuadratureRule> rule;
  std::optional<double> value;        // certified optimum
  std::optional<double> lower_bound;  // best P*_k seen
  Eigen::VectorXd first_moment;       // heuristic minimizer from the last solved level
};

CertifyOptions certify_options(const RunConfig& cfg);

RunReport run_hierarchy(const PopProblem& prob, const RunConfig& cfg);

}  // namespace gnscert
