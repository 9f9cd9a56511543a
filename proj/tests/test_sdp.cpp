#include "support.hpp"

#include "gnscert/sdp.hpp"

#include <doctest.h>

using namespace gnscert;

namespace {

SparseSym dense_to_sparse(const Eigen::MatrixXd& a) {
  SparseSym s;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) s.push_back({i, j, a(i, j)});
  return s;
}

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }
Polynomial cst(int n, double c) { return Polynomial::constant(n, c); }

}  // namespace

TEST_SUITE("sdp") {
  TEST_CASE("largest y with C - y I PSD is the smallest eigenvalue") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 10; ++trial) {
      int s = 2 + trial % 5;
      Eigen::MatrixXd g(s, s);
      for (int i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
      Eigen::MatrixXd C = 0.5 * (g + g.transpose());
      StandardSdp P;
      P.sides = {s};
      P.C = {C};
      P.A = {{dense_to_sparse(Eigen::MatrixXd::Identity(s, s))}};
      P.b = Eigen::VectorXd::Ones(1);
      StandardSolution sol = solve_standard(P);
      REQUIRE(sol.status == SdpStatus::Optimal);
      double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues()[0];
      CHECK(sol.y[0] == doctest::Approx(lmin).epsilon(1e-6));
      CHECK(sol.primal_objective == doctest::Approx(lmin).epsilon(1e-6));
    }
  }

  TEST_CASE("linear program as diagonal blocks") {
    // max y1 + y2  s.t.  y1 <= 1, y2 <= 2, y1 + y2 <= 2.5, -y1 <= 0.
    StandardSdp P;
    P.b = Eigen::Vector2d(1.0, 1.0);
    auto block = [&](double c, double a1, double a2) {
      P.sides.push_back(1);
      P.C.push_back(Eigen::MatrixXd::Constant(1, 1, c));
      std::vector<SparseSym> a(2);
      if (a1 != 0) a[0] = {{0, 0, a1}};
      if (a2 != 0) a[1] = {{0, 0, a2}};
      P.A.push_back(a);
    };
    block(1.0, 1.0, 0.0);
    block(2.0, 0.0, 1.0);
    block(2.5, 1.0, 1.0);
    block(0.0, -1.0, 0.0);
    StandardSolution sol = solve_standard(P);
    REQUIRE(sol.status == SdpStatus::Optimal);
    CHECK(sol.dual_objective == doctest::Approx(2.5).epsilon(1e-7));
  }

  TEST_CASE("Schur parallel assembly matches the dense reference") {
    std::mt19937_64 rng(43);
    std::normal_distribution<double> nd;
    std::bernoulli_distribution keep(0.3);
    for (int trial = 0; trial < 5; ++trial) {
      int m = 5 + 3 * trial;
      std::vector<int> sides = {3, 6, 1};
      BlockCoefficients coeffs(sides.size(), std::vector<SparseSym>(m));
      std::vector<Eigen::MatrixXd> W;
      std::vector<std::vector<Eigen::MatrixXd>> dense(sides.size());
      for (size_t b = 0; b < sides.size(); ++b) {
        int s = sides[b];
        Eigen::MatrixXd g(s, s);
        for (int i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
        W.push_back(g * g.transpose());
        for (int i = 0; i < m; ++i) {
          Eigen::MatrixXd a = Eigen::MatrixXd::Zero(s, s);
          for (int r = 0; r < s; ++r)
            for (int c = r; c < s; ++c)
              if (keep(rng)) a(r, c) = a(c, r) = nd(rng);
          dense[b].push_back(a);
          coeffs[b][i] = dense_to_sparse(a);
        }
      }
      Eigen::MatrixXd want = Eigen::MatrixXd::Zero(m, m);
      for (size_t b = 0; b < sides.size(); ++b)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) want(i, j) += (dense[b][i] * W[b] * dense[b][j] * W[b]).trace();
      Eigen::MatrixXd ref = schur_reference(coeffs, W, m);
      Eigen::MatrixXd par = schur_parallel(coeffs, W, m);
      double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
      CHECK((ref - want).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK((par - want).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK((par - par.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  TEST_CASE("relaxation layout for the box-constrained quartic example") {
    PopProblem p;
    p.n = 2;
    p.objective = -12.0 * var(2, 0) - 7.0 * var(2, 1) + var(2, 1) * var(2, 1);
    Polynomial g = -2.0 * var(2, 0) * var(2, 0) * var(2, 0) * var(2, 0) + cst(2, 2.0) - var(2, 1);
    p.constraints = {g, -g, var(2, 0), cst(2, 2.0) - var(2, 0), var(2, 1), cst(2, 3.0) - var(2, 1)};
    SdpProblem sdp = assemble_relaxation(p, 4);
    CHECK(sdp.moments.size() == 15);
    std::vector<int> sides;
    for (const auto& b : sdp.blocks) sides.push_back(b.side);
    CHECK(sides == std::vector<int>{6, 1, 1, 3, 3, 3, 3});
    CHECK(sdp.cost[sdp.moments.index_of(Monomial({1, 0}))] == -12.0);
    CHECK(sdp.cost[sdp.moments.index_of(Monomial({0, 2}))] == 1.0);

    // Block values are the moment and localizing matrices of y.
    MomentSequence y(2, 4);
    std::mt19937_64 rng(47);
    std::normal_distribution<double> nd;
    for (int i = 0; i < y.y.size(); ++i) y.y[i] = nd(rng);
    CHECK((sdp.block_value(0, y.y) - moment_matrix(y, 2).entries).cwiseAbs().maxCoeff() < 1e-12);
    for (size_t c = 0; c < p.constraints.size(); ++c)
      CHECK((sdp.block_value(static_cast<int>(c) + 1, y.y) - localizing_matrix(y, p.constraints[c], 4))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
  }

  TEST_CASE("odd relaxation degree") {
    PopProblem p;
    p.n = 2;
    p.objective = var(2, 0);
    p.constraints = {cst(2, 1.0) - var(2, 0) * var(2, 0) - var(2, 1) * var(2, 1)};
    SdpProblem sdp = assemble_relaxation(p, 5);
    CHECK(sdp.moments.size() == 21);
    CHECK(sdp.blocks[0].side == 6);
    CHECK(sdp.blocks[1].side == 3);
    CHECK_THROWS(assemble_relaxation(p, 1));
  }

  TEST_CASE("min x^2 and min (x-1)^2") {
    PopProblem p;
    p.n = 1;
    p.objective = var(1, 0) * var(1, 0);
    SdpSolution s = solve_sdp(assemble_relaxation(p, 2));
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective_value) <= 1e-6);
    CHECK(std::abs(s.y.at(Monomial({1}))) <= 1e-3);
    CHECK(std::abs(s.y.at(Monomial({2}))) <= 1e-6);

    Polynomial q = var(1, 0) - cst(1, 1.0);
    p.objective = q * q;
    s = solve_sdp(assemble_relaxation(p, 2));
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.objective_value) <= 1e-6);
    CHECK(s.y.at(Monomial({1})) == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("serial and parallel Schur give the same solution") {
    PopProblem p;
    p.n = 2;
    p.objective = var(2, 0) * var(2, 1) + var(2, 0);
    p.constraints = {cst(2, 1.0) - var(2, 0) * var(2, 0), cst(2, 1.0) - var(2, 1) * var(2, 1)};
    SdpProblem sdp = assemble_relaxation(p, 4);
    SdpOptions a, b;
    b.parallel_schur = false;
    SdpSolution sa = solve_sdp(sdp, a), sb = solve_sdp(sdp, b);
    REQUIRE(sa.status == SdpStatus::Optimal);
    CHECK(sa.objective_value == doctest::Approx(sb.objective_value).epsilon(1e-9));
    CHECK(sa.objective_value == doctest::Approx(-2.0).epsilon(1e-6));
  }

  TEST_CASE("optimal status implies small gap and PSD blocks") {
    PopProblem p;
    p.n = 2;
    p.objective = var(2, 0) * var(2, 0) * var(2, 1) - var(2, 1);
    p.constraints = {cst(2, 1.0) - var(2, 0) * var(2, 0) - var(2, 1) * var(2, 1)};
    SdpProblem sdp = assemble_relaxation(p, 4);
    SdpSolution s = solve_sdp(sdp);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(s.duality_gap <= 1e-6);
    for (int b = 0; b < static_cast<int>(sdp.blocks.size()); ++b)
      CHECK(psd_check(sdp.block_value(b, s.y.y), 1e-6).is_psd);
  }

  TEST_CASE("unbounded relaxation") {
    PopProblem p;
    p.n = 1;
    p.objective = var(1, 0);
    CHECK(solve_sdp(assemble_relaxation(p, 2)).status == SdpStatus::Unbounded);
    // y_3 appears in no block when k = 3 and there are no constraints.
    p.objective = var(1, 0) * var(1, 0) * var(1, 0);
    CHECK(solve_sdp(assemble_relaxation(p, 3)).status == SdpStatus::Unbounded);
  }

  TEST_CASE("infeasible relaxation") {
    PopProblem p;
    p.n = 1;
    p.objective = var(1, 0) * var(1, 0);
    p.constraints = {var(1, 0) - cst(1, 1.0), -var(1, 0)};
    CHECK(solve_sdp(assemble_relaxation(p, 2)).status == SdpStatus::Infeasible);
  }

  TEST_CASE("problem validation") {
    PopProblem p;
    p.n = 2;
    p.objective = var(2, 0);
    p.constraints = {var(3, 0)};
    CHECK_THROWS(p.validate());
    CHECK(to_string(SdpStatus::Optimal) == "Optimal");
  }
}
