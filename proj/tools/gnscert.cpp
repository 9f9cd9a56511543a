#include "gnscert/hierarchy.hpp"
#include "gnscert/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>

using namespace gnscert;

namespace {

struct Flags {
  std::uint64_t seed = 0;
  double tol_rank = 1e-6;
  double tol_hankel = 1e-4;
  double tol_feas = 1e-5;
  double gap_tol = 1e-8;
  int max_order = -1;
  int max_minimizers = -1;
  bool as_json = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "seed for the random combination in simultaneous diagonalization");
  sub->add_option("--tol-rank", f.tol_rank, "relative rank tolerance");
  sub->add_option("--tol-hankel", f.tol_hankel, "generalized Hankel tolerance (scaled by max entry)");
  sub->add_option("--tol-feas", f.tol_feas, "node feasibility tolerance");
  sub->add_flag("--json", f.as_json, "machine-readable output");
}

CertifyOptions cert_opts(const Flags& f) {
  CertifyOptions o;
  o.seed = f.seed;
  o.tol_rank = f.tol_rank;
  o.tol_hankel = f.tol_hankel;
  o.tol_feas = f.tol_feas;
  if (f.max_minimizers >= 0) o.minimizer_cap = f.max_minimizers;
  return o;
}

std::string point(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(6) << '(';
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

void print_rule(const QuadratureRule& r) {
  for (int i = 0; i < r.size(); ++i)
    std::cout << "  node " << point(r.nodes[i]) << "  weight " << std::setprecision(6) << r.weights[i] << "\n";
}

void print_certificate(const Certificate& c) {
  std::cout << "status: " << to_string(c.status) << "\n"
            << "hankel: " << to_string(c.hankel) << " (deviation " << c.hankel_deviation << ")\n"
            << "dim T: " << c.dim_T << "  rank M: " << c.rank_M << "  max commutator rank: " << c.commutator_rank
            << "\n";
  if (c.rule) print_rule(*c.rule);
  std::cout << "first moments: " << point(c.first_moment) << "\n";
  for (const auto& d : c.diagnostics) std::cout << "note: " << d << "\n";
}

int cert_exit(CertStatus s) { return s == CertStatus::OptimalCertified ? 0 : 2; }

int run_solve(const std::string& path, int k_start, const Flags& f) {
  PopProblem prob = load_problem(path).to_problem();
  RunConfig cfg;
  if (k_start > 0) cfg.k_start = k_start;
  if (f.max_order > 0) cfg.k_max = f.max_order;
  cfg.tol_rank = f.tol_rank;
  cfg.tol_hankel = f.tol_hankel;
  cfg.tol_feas = f.tol_feas;
  cfg.gap_tol = f.gap_tol;
  cfg.seed = f.seed;
  if (f.max_minimizers >= 0) cfg.minimizer_cap = f.max_minimizers;
  RunReport rep = run_hierarchy(prob, cfg);
  if (f.as_json) {
    std::cout << report_to_json(rep).dump(2) << "\n";
  } else {
    for (const auto& l : rep.levels) {
      std::cout << "k=" << l.k << "  solver " << to_string(l.solver_status) << "  value " << std::setprecision(8)
                << l.value;
      if (l.certificate) std::cout << "  " << to_string(l.certificate->status);
      std::cout << "\n";
    }
    std::cout << "status: " << to_string(rep.final_status) << "\n";
    if (rep.value) std::cout << "value: " << std::setprecision(8) << *rep.value << "\n";
    else if (rep.lower_bound) std::cout << "lower bound: " << std::setprecision(8) << *rep.lower_bound << "\n";
    if (rep.rule) print_rule(*rep.rule);
    if (rep.first_moment.size())
      std::cout << "first moments" << (rep.final_status == CertStatus::OptimalCertified ? "" : " (heuristic)")
                << ": " << point(rep.first_moment) << "\n";
  }
  return cert_exit(rep.final_status);
}

int run_relax(const std::string& path, int k, const Flags& f) {
  PopProblem prob = load_problem(path).to_problem();
  SdpOptions so;
  so.gap_tol = f.gap_tol;
  SdpSolution sol = solve_sdp(assemble_relaxation(prob, k), so);
  if (f.as_json) {
    json j;
    j["k"] = k;
    j["status"] = to_string(sol.status);
    j["value"] = sol.objective_value;
    j["gap"] = sol.duality_gap;
    j["iterations"] = sol.iterations;
    j["moments"] = moments_to_json(sol.y);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "status: " << to_string(sol.status) << "\nvalue: " << std::setprecision(10) << sol.objective_value
              << "\niterations: " << sol.iterations << "\n";
    for (int i = 0; i < sol.y.basis.size(); ++i)
      std::cout << "  y[" << sol.y.basis[i].str() << "] = " << sol.y.y[i] << "\n";
  }
  return sol.status == SdpStatus::Optimal ? 0 : 2;
}

int run_extract(const std::string& path, const std::string& constraints, const Flags& f) {
  MatrixFile mf = load_matrix(path);
  Certificate c;
  int code;
  if (!constraints.empty()) {
    PopProblem prob = load_problem(constraints).to_problem();
    if (prob.n != mf.matrix.nvars()) throw std::invalid_argument("problem and matrix variable counts differ");
    double value = NAN;
    if (prob.objective.degree() <= 2 * mf.matrix.order)
      value = linear_form_apply(moments_from_matrix(mf.matrix), prob.objective);
    c = certify(prob, mf.matrix, mf.relaxation_degree(), value, cert_opts(f));
    code = cert_exit(c.status);
  } else {
    c = analyze_matrix(mf.matrix, cert_opts(f));
    code = c.rule ? 0 : 2;
  }
  if (f.as_json) std::cout << certificate_to_json(c).dump(2) << "\n";
  else print_certificate(c);
  return code;
}

int run_bound(const std::string& path, const Flags& f) {
  MatrixFile mf = load_matrix(path);
  GnsModel g = build_gns(mf.matrix, f.tol_rank);
  int rk = max_commutator_rank(g.ops, f.tol_rank);
  int bound = moller_bound(g, f.tol_rank);
  if (f.as_json) {
    json j{{"dim_T", g.dim()}, {"max_commutator_rank", rk}, {"moller_bound", bound}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "dim T: " << g.dim() << "\nmax commutator rank: " << rk << "\nmoller bound: " << bound << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment relaxations with truncated GNS optimality certificates"};
  app.require_subcommand(1);
  Flags f;
  std::string input, constraints;
  int order = 0, k_start = 0;

  auto* solve = app.add_subcommand("solve", "run the hierarchy until a certificate is found");
  solve->add_option("problem", input, "problem JSON")->required();
  solve->add_option("--min-order", k_start, "first relaxation degree");
  solve->add_option("--max-order", f.max_order, "last relaxation degree");
  solve->add_option("--gap-tol", f.gap_tol, "relative duality gap tolerance");
  solve->add_option("--max-minimizers", f.max_minimizers, "known cap on the number of minimizers");
  add_common(solve, f);

  auto* relax = app.add_subcommand("relax", "solve a single relaxation");
  relax->add_option("problem", input, "problem JSON")->required();
  relax->add_option("--order", order, "relaxation degree k")->required();
  relax->add_option("--gap-tol", f.gap_tol, "relative duality gap tolerance");
  add_common(relax, f);

  auto* extract = app.add_subcommand("extract", "GNS construction and extraction on a moment matrix");
  extract->add_option("matrix", input, "moment matrix JSON")->required();
  extract->add_option("--constraints", constraints, "problem JSON to certify against");
  extract->add_option("--max-minimizers", f.max_minimizers, "known cap on the number of minimizers");
  add_common(extract, f);

  auto* bound = app.add_subcommand("bound", "Moller lower bound on the number of quadrature nodes");
  bound->add_option("matrix", input, "moment matrix JSON")->required();
  add_common(bound, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*solve) return run_solve(input, k_start, f);
    if (*relax) return run_relax(input, order, f);
    if (*extract) return run_extract(input, constraints, f);
    if (*bound) return run_bound(input, f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
