#include "support.hpp"

#include "gnscert/hierarchy.hpp"

#include <doctest.h>

using namespace gnscert;

namespace {

bool commuting(const GnsModel& g, double tol_hankel) {
  return max_commutator_norm(g.ops) <= tol_hankel * operator_scale(g.ops);
}

bool hankel(const GnsModel& g, double tol_hankel) {
  return is_generalized_hankel(g.m_tilde, g.source.basis, tol_hankel).is_hankel;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("random atomic forms are flat and reproduce themselves") {
    std::mt19937_64 rng(2024);
    int done = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 3;
      const int D = 1 + (trial / 3) % 3;
      const int cap = static_cast<int>(basis_size(n, D - 1));
      const int atoms = 1 + static_cast<int>(rng() % cap);
      auto inst = oracle::random_atomic(rng, n, D, atoms);
      MomentMatrix M = oracle::to_moment_matrix(inst);
      CAPTURE(trial);
      GnsModel g = build_gns(M, 1e-10);
      CHECK(g.flat());
      CHECK(g.dim() == atoms);
      CHECK(max_commutator_rank(g.ops, 1e-8) == 0);
      CHECK(moller_bound(g, 1e-8) <= atoms);
      QuadratureRule r = extract_quadrature(g, trial, 1e-7);
      double total = 0.0;
      for (double w : r.weights) total += w;
      CHECK(std::abs(total - 1.0) <= 1e-8);
      CHECK(reconstruction_error(g.m_tilde, M.basis, r) <= 1e-8);
      CHECK(oracle::rule_distance(r, inst.nodes, inst.weights) <= 1e-6);
      ++done;
    }
    CHECK(done == 200);
  }

  TEST_CASE("modified moment matrix is invariant under null-space changes of W") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + trial % 2, D = 2 + trial % 2;
      const int sL = static_cast<int>(basis_size(n, D - 1));
      auto inst = oracle::random_atomic(rng, n, D, 1 + static_cast<int>(rng() % (sL - 1)));
      MomentMatrix M = oracle::to_moment_matrix(inst);
      GnsModel g = build_gns(M, 1e-10);
      Eigen::MatrixXd A = M.entries.topLeftCorner(sL, sL);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      lu.setThreshold(1e-10);
      Eigen::MatrixXd K = lu.kernel();
      if (K.cols() == 0) continue;
      Eigen::MatrixXd R(K.cols(), g.W.cols());
      for (int i = 0; i < R.size(); ++i) R.data()[i] = nd(rng);
      Eigen::MatrixXd W = g.W + K * R;
      const int sD = M.side();
      Eigen::MatrixXd mt(sD, sD);
      mt << A, A * W, (A * W).transpose(), W.transpose() * A * W;
      CHECK((mt - g.m_tilde).cwiseAbs().maxCoeff() <= 1e-9 * M.scale());
      ++checked;
    }
    CHECK(checked >= 30);
  }

  TEST_CASE("Hankel and commuting tests agree on the fixtures") {
    struct Case {
      const char* name;
      double tol_rank;
      double tol_hankel;
    };
    // Tolerances follow the printed precision of each matrix.
    const Case cases[] = {{"elprimero", 1e-9, 1e-6},     {"cf3", 1e-9, 1e-6},         {"porfavor_k4", 1e-3, 1e-3},
                          {"flatcase_k4", 1e-3, 1e-3},   {"madrugada_k8", 1e-6, 1e-4}, {"amigo_k8", 1e-3, 1e-3},
                          {"nonconvex_k4", 1e-3, 1e-3},  {"nonconvex_k5", 1e-2, 1e-2}, {"nonconvex_k7", 1e-2, 1e-2},
                          {"rosenbrock_k4", 1e-3, 1e-3}, {"rosenbrock_k5", 1e-3, 1e-3}, {"rosenbrock_k6", 1e-3, 1e-3}};
    for (const Case& c : cases) {
      CAPTURE(c.name);
      GnsModel g = build_gns(load_matrix(oracle::data(std::string("matrices/") + c.name + ".json")).matrix, c.tol_rank);
      CHECK(hankel(g, c.tol_hankel) == commuting(g, c.tol_hankel));
    }
  }

  TEST_CASE("Hankel and commuting tests agree on random instances") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    int hankel_count = 0, other = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2, D = 2 + trial % 2;
      const int sL = static_cast<int>(basis_size(n, D - 1));
      auto inst = oracle::random_atomic(rng, n, D, 1 + static_cast<int>(rng() % sL));
      MomentMatrix M = oracle::to_moment_matrix(inst);
      if (trial % 2) {
        // Add a generic PSD term: the result is a valid Gram matrix but not a moment matrix.
        Eigen::MatrixXd g(M.side(), 2);
        for (int i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
        M.entries += 0.05 * g * g.transpose();
      }
      GnsModel gm = build_gns(M, 1e-9);
      CAPTURE(trial);
      bool h = hankel(gm, 1e-6);
      CHECK(h == commuting(gm, 1e-6));
      (h ? hankel_count : other)++;
    }
    CHECK(hankel_count >= 30);
    CHECK(other >= 20);
  }

  TEST_CASE("relaxation values increase with the order") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2;
      Polynomial x = Polynomial::variable(n, 0), y = Polynomial::variable(n, 1);
      PopProblem p;
      p.n = n;
      double a = u(rng), b = u(rng), c = u(rng), d = u(rng), e = u(rng);
      p.objective = a * x * x + b * x * y + c * y * y + d * x + e * y;
      for (const Polynomial& v : {x, y}) p.constraints.push_back(Polynomial::constant(n, 1.0) - v * v);
      // Grid oracle for the true minimum.
      double best = INFINITY;
      for (int i = 0; i <= 200; ++i)
        for (int j = 0; j <= 200; ++j) best = std::min(best, evaluate(p.objective, Eigen::Vector2d(-1 + i / 100.0, -1 + j / 100.0)));
      double prev = -INFINITY;
      CAPTURE(trial);
      for (int k = 2; k <= 5; ++k) {
        SdpSolution s = solve_sdp(assemble_relaxation(p, k));
        REQUIRE(s.status == SdpStatus::Optimal);
        CHECK(s.objective_value >= prev - 1e-6);
        CHECK(s.objective_value <= best + 1e-6);
        prev = s.objective_value;
      }
    }
  }

  TEST_CASE("solve output is deterministic") {
    PopProblem p = load_problem(oracle::data("problems/porfavor.json")).to_problem();
    json a = report_to_json(run_hierarchy(p, {}));
    json b = report_to_json(run_hierarchy(p, {}));
    for (auto* j : {&a, &b})
      for (auto& l : (*j)["levels"]) l.erase("seconds");
    CHECK(a.dump() == b.dump());
  }

  TEST_CASE("seed does not change the certified rule") {
    PopProblem p = load_problem(oracle::data("problems/amigo.json")).to_problem();
    RunConfig c1, c2;
    c2.seed = 12345;
    RunReport a = run_hierarchy(p, c1), b = run_hierarchy(p, c2);
    REQUIRE(a.rule);
    REQUIRE(b.rule);
    REQUIRE(a.rule->size() == b.rule->size());
    for (int j = 0; j < a.rule->size(); ++j) CHECK((a.rule->nodes[j] - b.rule->nodes[j]).cwiseAbs().maxCoeff() <= 1e-6);
  }

  TEST_CASE("random problems survive a JSON round trip") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> ex(0, 3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 20; ++trial) {
      ProblemFile f;
      f.n = 1 + trial % 3;
      auto rand_poly = [&] {
        Polynomial q(f.n);
        for (int t = 0; t < 5; ++t) {
          std::vector<int> e(f.n);
          for (int& v : e) v = ex(rng);
          q.add_term(Monomial(e), nd(rng));
        }
        return q;
      };
      f.objective = rand_poly();
      f.inequalities = {rand_poly(), rand_poly()};
      f.equalities = {rand_poly()};
      ProblemFile g = problem_from_json(json::parse(problem_to_json(f).dump()));
      CHECK(g.objective == f.objective);
      CHECK(g.inequalities == f.inequalities);
      CHECK(g.equalities == f.equalities);
    }
  }
}
