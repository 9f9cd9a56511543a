#include "gnscert/hierarchy.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace gnscert {

CertifyOptions certify_options(const RunConfig& cfg) {
  CertifyOptions o;
  o.tol_rank = cfg.tol_rank;
  o.tol_hankel = cfg.tol_hankel;
  o.tol_feas = cfg.tol_feas;
  o.seed = cfg.seed;
  o.minimizer_cap = cfg.minimizer_cap;
  return o;
}

RunReport run_hierarchy(const PopProblem& prob, const RunConfig& cfg) {
  prob.validate();
  const int k0 = cfg.k_start.value_or(std::max(1, prob.max_degree()));
  const int k1 = cfg.k_max.value_or(k0 + 6);
  if (k0 < std::max(1, prob.max_degree())) throw std::invalid_argument("k_start below the problem degree");
  if (k1 < k0) throw std::invalid_argument("k_max below k_start");

  SdpOptions sopts;
  sopts.gap_tol = cfg.gap_tol;
  const CertifyOptions copts = certify_options(cfg);

  RunReport rep;
  for (int k = k0; k <= k1; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    LevelRecord rec;
    rec.k = k;
    SdpSolution sol = solve_sdp(assemble_relaxation(prob, k), sopts);
    rec.solver_status = sol.status;
    rec.value = sol.objective_value;
    rec.gap = sol.duality_gap;
    rec.iterations = sol.iterations;

    if (sol.status == SdpStatus::Optimal) {
      if (!rep.lower_bound || rec.value > *rep.lower_bound) rep.lower_bound = rec.value;
      MomentMatrix M = moment_matrix(sol.y, k / 2);
      // An interior-point iterate at relative gap g is about sqrt(g) away from the optimal face,
      // so smaller residuals cannot be told apart from rank.
      CertifyOptions level_opts = copts;
      level_opts.tol_rank = std::max(copts.tol_rank, std::sqrt(std::max(sol.duality_gap, 0.0)));
      rec.certificate = certify(prob, M, k, rec.value, level_opts);
      rep.first_moment = rec.certificate->first_moment;
      if (rec.certificate->rule) rep.rule = rec.certificate->rule;
    } else {
      rec.diagnostics.push_back("solver returned " + to_string(sol.status));
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.levels.push_back(std::move(rec));

    const LevelRecord& last = rep.levels.back();
    if (last.certificate && last.certificate->status == CertStatus::OptimalCertified) {
      rep.final_status = CertStatus::OptimalCertified;
      rep.value = last.value;
      return rep;
    }
    // An infeasible relaxation means the problem itself is infeasible.
    if (last.solver_status == SdpStatus::Infeasible) break;
  }
  rep.final_status = CertStatus::Inconclusive;
  return rep;
}

}  // namespace gnscert
