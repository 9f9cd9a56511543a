#include "gnscert/io.hpp"

#include <fstream>
#include <stdexcept>

namespace gnscert {

PopProblem ProblemFile::to_problem() const {
  PopProblem p;
  p.n = n;
  p.objective = objective;
  p.constraints = inequalities;
  for (const auto& g : equalities) {
    p.constraints.push_back(g);
    p.constraints.push_back(-g);
  }
  p.validate();
  return p;
}

Polynomial polynomial_from_json(const json& terms, int n) {
  if (!terms.is_array()) throw std::invalid_argument("polynomial must be a list of terms");
  Polynomial p(n);
  for (const auto& t : terms) {
    auto e = t.at("exponents").get<std::vector<int>>();
    if (static_cast<int>(e.size()) != n) throw std::invalid_argument("term exponent length differs from variable count");
    p.add_term(Monomial(std::move(e)), t.at("coeff").get<double>());
  }
  return p;
}

json polynomial_to_json(const Polynomial& p) {
  json a = json::array();
  for (const auto& [m, c] : p.terms()) a.push_back({{"exponents", m.exponents()}, {"coeff", c}});
  return a;
}

ProblemFile problem_from_json(const json& j) {
  ProblemFile f;
  f.n = j.at("variables").get<int>();
  if (f.n < 1) throw std::invalid_argument("variables must be positive");
  f.objective = polynomial_from_json(j.at("objective"), f.n);
  if (j.contains("inequalities"))
    for (const auto& t : j.at("inequalities")) f.inequalities.push_back(polynomial_from_json(t, f.n));
  if (j.contains("equalities"))
    for (const auto& t : j.at("equalities")) f.equalities.push_back(polynomial_from_json(t, f.n));
  return f;
}

json problem_to_json(const ProblemFile& p) {
  json j;
  j["variables"] = p.n;
  j["objective"] = polynomial_to_json(p.objective);
  j["inequalities"] = json::array();
  for (const auto& q : p.inequalities) j["inequalities"].push_back(polynomial_to_json(q));
  j["equalities"] = json::array();
  for (const auto& q : p.equalities) j["equalities"].push_back(polynomial_to_json(q));
  return j;
}

MatrixFile matrix_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const int order = j.at("order").get<int>();
  const int side = static_cast<int>(basis_size(n, order));
  const json& e = j.at("entries");
  Eigen::MatrixXd m(side, side);
  if (e.size() == static_cast<size_t>(side) * side && !e.empty() && e[0].is_number()) {
    for (int r = 0; r < side; ++r)
      for (int c = 0; c < side; ++c) m(r, c) = e[r * side + c].get<double>();
  } else {
    if (e.size() != static_cast<size_t>(side)) throw std::invalid_argument("entries do not match s_order rows");
    for (int r = 0; r < side; ++r) {
      if (e[r].size() != static_cast<size_t>(side)) throw std::invalid_argument("ragged entries row");
      for (int c = 0; c < side; ++c) m(r, c) = e[r][c].get<double>();
    }
  }
  MatrixFile f{MomentMatrix(n, order, symmetrized(m)), std::nullopt};
  if (j.contains("relaxation_order")) f.relaxation_order = j.at("relaxation_order").get<int>();
  return f;
}

json matrix_to_json(const MatrixFile& f) {
  json j;
  j["n"] = f.matrix.nvars();
  j["order"] = f.matrix.order;
  if (f.relaxation_order) j["relaxation_order"] = *f.relaxation_order;
  json rows = json::array();
  for (int r = 0; r < f.matrix.side(); ++r) {
    json row = json::array();
    for (int c = 0; c < f.matrix.side(); ++c) row.push_back(f.matrix.entries(r, c));
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json rule_to_json(const QuadratureRule& r) {
  json j = json::array();
  for (int i = 0; i < r.size(); ++i) j.push_back({{"node", vec(r.nodes[i])}, {"weight", r.weights[i]}});
  return j;
}

json certificate_to_json(const Certificate& c) {
  json j;
  j["status"] = to_string(c.status);
  j["hankel_status"] = to_string(c.hankel);
  j["relaxation_value"] = c.relaxation_value;
  j["dim_T"] = c.dim_T;
  j["rank_M"] = c.rank_M;
  j["max_commutator_rank"] = c.commutator_rank;
  j["hankel_deviation"] = c.hankel_deviation;
  if (c.moller_lower_bound) j["moller_bound"] = *c.moller_lower_bound;
  if (c.rule) {
    j["rule"] = rule_to_json(*c.rule);
    j["quadrature_error"] = c.quadrature_error;
  }
  j["first_moment"] = vec(c.first_moment);
  j["diagnostics"] = c.diagnostics;
  return j;
}

json report_to_json(const RunReport& r) {
  json j;
  j["status"] = to_string(r.final_status);
  if (r.value) j["value"] = *r.value;
  if (r.lower_bound) j["lower_bound"] = *r.lower_bound;
  if (r.rule) j["rule"] = rule_to_json(*r.rule);
  j["first_moment"] = vec(r.first_moment);
  j["first_moment_is_heuristic"] = r.final_status != CertStatus::OptimalCertified;
  json levels = json::array();
  for (const auto& l : r.levels) {
    json lj;
    lj["k"] = l.k;
    lj["solver_status"] = to_string(l.solver_status);
    lj["value"] = l.value;
    lj["gap"] = l.gap;
    lj["iterations"] = l.iterations;
    lj["seconds"] = l.seconds;
    if (l.certificate) lj["certificate"] = certificate_to_json(*l.certificate);
    lj["diagnostics"] = l.diagnostics;
    levels.push_back(lj);
  }
  j["levels"] = levels;
  return j;
}

json moments_to_json(const MomentSequence& y) {
  json a = json::array();
  for (int i = 0; i < y.basis.size(); ++i) a.push_back({{"exponents", y.basis[i].exponents()}, {"value", y.y[i]}});
  return a;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

ProblemFile load_problem(const std::string& path) { return problem_from_json(read_json_file(path)); }
MatrixFile load_matrix(const std::string& path) { return matrix_from_json(read_json_file(path)); }

}  // namespace gnscert
