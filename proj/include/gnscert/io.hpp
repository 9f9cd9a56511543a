#pragma once

#include "gnscert/extract.hpp"
#include "gnscert/gns.hpp"
#include "gnscert/hierarchy.hpp"
#include "gnscert/moment.hpp"
#include "gnscert/sdp.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace gnscert {

using json = nlohmann::json;

// Problem file as written on disk; equalities are split when converted to a PopProblem.
struct ProblemFile {
  int n = 0;
  Polynomial objective;
  std::vector<Polynomial> inequalities;
  std::vector<Polynomial> equalities;

  PopProblem to_problem() const;
};

struct MatrixFile {
  MomentMatrix matrix;
  std::optional<int> relaxation_order;
  int relaxation_degree() const { return relaxation_order.value_or(2 * matrix.order); }
};

Polynomial polynomial_from_json(const json& terms, int n);
json polynomial_to_json(const Polynomial& p);

ProblemFile problem_from_json(const json& j);
json problem_to_json(const ProblemFile& p);

MatrixFile matrix_from_json(const json& j);
json matrix_to_json(const MatrixFile& m);

json rule_to_json(const QuadratureRule& r);
json certificate_to_json(const Certificate& c);
json report_to_json(const RunReport& r);
json moments_to_json(const MomentSequence& y);

json read_json_file(const std::string& path);
ProblemFile load_problem(const std::string& path);
MatrixFile load_matrix(const std::string& path);

}  // namespace gnscert
