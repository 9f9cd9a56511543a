#include "gnscert/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gnscert {

int PopProblem::max_degree() const {
  int d = std::max(0, objective.degree());
  for (const auto& p : constraints) d = std::max(d, p.degree());
  return d;
}

void PopProblem::validate() const {
  if (n < 1) throw std::invalid_argument("problem needs at least one variable");
  if (objective.nvars() != n) throw std::invalid_argument("objective variable count mismatch");
  for (const auto& p : constraints) {
    if (p.nvars() != n) throw std::invalid_argument("constraint variable count mismatch");
    if (p.is_zero()) throw std::invalid_argument("zero constraint polynomial");
  }
}

Eigen::MatrixXd SdpProblem::block_value(int b, const Eigen::VectorXd& y) const {
  const SdpBlock& blk = blocks.at(b);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.side, blk.side);
  for (size_t v = 0; v < blk.coeff.size(); ++v)
    if (y[v] != 0.0) add_scaled(m, blk.coeff[v], y[v]);
  return m;
}

namespace {

SdpBlock localizing_block(const Polynomial& p, int k, const MonomialBasis& moments, std::string label) {
  MonomialBasis rows(moments.nvars(), (k - p.degree()) / 2);
  SdpBlock blk;
  blk.side = rows.size();
  blk.label = std::move(label);
  blk.coeff.assign(moments.size(), {});
  for (int i = 0; i < rows.size(); ++i)
    for (int j = i; j < rows.size(); ++j) {
      Monomial ab = rows[i] + rows[j];
      for (const auto& [g, c] : p.terms()) {
        int v = moments.index_of(ab + g);
        blk.coeff[v].push_back({i, j, c});
        if (i != j) blk.coeff[v].push_back({j, i, c});
      }
    }
  return blk;
}

}  // namespace

SdpProblem assemble_relaxation(const PopProblem& prob, int k) {
  prob.validate();
  if (k < 1 || k < prob.max_degree()) throw std::invalid_argument("relaxation degree below problem degree");
  SdpProblem sdp;
  sdp.order = k;
  sdp.moments = MonomialBasis(prob.n, k);
  sdp.cost = vectorize(prob.objective, sdp.moments);
  sdp.blocks.push_back(localizing_block(Polynomial::constant(prob.n, 1.0), k, sdp.moments, "moment"));
  for (size_t i = 0; i < prob.constraints.size(); ++i)
    sdp.blocks.push_back(localizing_block(prob.constraints[i], k, sdp.moments, "localizing " + std::to_string(i)));
  return sdp;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Scaling {
  Mat G, Ginv, W;
  Vec d;
  Mat Lx;
};

double frob_inner(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

// Largest step a with Z + a dZ still PSD, given a Cholesky factor of Z.
double max_step(const Mat& L, const Mat& dZ) {
  Mat t = L.triangularView<Eigen::Lower>().solve(dZ);
  t = L.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(sym(t), Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()[0];
  return lmin >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

bool nt_scaling(const Mat& X, const Mat& S, Scaling& sc) {
  Eigen::LLT<Mat> cx(X), cs(S);
  if (cx.info() != Eigen::Success || cs.info() != Eigen::Success) return false;
  sc.Lx = cx.matrixL();
  Mat Ls = cs.matrixL();
  Eigen::JacobiSVD<Mat> svd(Ls.transpose() * sc.Lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sc.d = svd.singularValues();
  if (sc.d.minCoeff() <= 0) return false;
  Vec isq = sc.d.cwiseSqrt().cwiseInverse();
  sc.G = sc.Lx * svd.matrixV() * isq.asDiagonal();
  // G^{-1} = D^{-1/2} U^T Ls^T
  sc.Ginv = isq.asDiagonal() * svd.matrixU().transpose() * Ls.transpose();
  sc.W = sym(sc.G * sc.G.transpose());
  return true;
}

struct Direction {
  Vec dy;
  std::vector<Mat> dX, dS;
};

}  // namespace

StandardSolution solve_standard(const StandardSdp& P, const SdpOptions& opts) {
  const int nb = static_cast<int>(P.sides.size());
  const int m = P.num_constraints();
  StandardSolution out;
  out.y = Vec::Zero(m);

  int N = 0;
  for (int s : P.sides) N += s;
  double normb = P.b.norm(), normC = 0.0;
  for (const auto& c : P.C) normC += c.squaredNorm();
  normC = std::sqrt(normC);

  // Starting point: scaled identities.
  out.X.resize(nb);
  out.S.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const int n = P.sides[b];
    double xi = std::max(10.0, std::sqrt(double(n))), eta = std::max(10.0, std::sqrt(double(n)));
    double cnorm = P.C[b].norm();
    for (int i = 0; i < m; ++i) {
      double an = 0.0;
      for (const auto& e : P.A[b][i]) an += e.value * e.value;
      an = std::sqrt(an);
      xi = std::max(xi, n * (1.0 + std::abs(P.b[i])) / (1.0 + an));
      eta = std::max(eta, (1.0 + std::max(an, cnorm)) / std::sqrt(double(n)));
    }
    out.X[b] = xi * Mat::Identity(n, n);
    out.S[b] = eta * Mat::Identity(n, n);
  }

  std::vector<Scaling> sc(nb);
  std::vector<Mat> Rd(nb);
  Vec Rp(m);
  int stalled = 0;
  // Best iterate by max(gap, infeasibility); returned when the iteration breaks down.
  StandardSolution best;
  double best_err = std::numeric_limits<double>::infinity();
  auto breakdown = [&](SdpStatus otherwise) {
    StandardSolution r = best_err < std::numeric_limits<double>::infinity() ? best : out;
    r.iterations = out.iterations;
    r.status = best_err < opts.stall_gap ? SdpStatus::Optimal : otherwise;
    return r;
  };

  for (int iter = 0;; ++iter) {
    // Residuals and objectives.
    Rp = P.b;
    out.primal_objective = 0.0;
    double xs = 0.0, rd2 = 0.0;
    for (int b = 0; b < nb; ++b) {
      for (int i = 0; i < m; ++i) Rp[i] -= inner(P.A[b][i], out.X[b]);
      Rd[b] = P.C[b] - out.S[b];
      for (int i = 0; i < m; ++i) add_scaled(Rd[b], P.A[b][i], -out.y[i]);
      out.primal_objective += frob_inner(P.C[b], out.X[b]);
      xs += frob_inner(out.X[b], out.S[b]);
      rd2 += Rd[b].squaredNorm();
    }
    out.dual_objective = P.b.dot(out.y);
    out.primal_infeasibility = Rp.norm() / (1.0 + normb);
    out.dual_infeasibility = std::sqrt(rd2) / (1.0 + normC);
    double denom = 1.0 + std::abs(out.primal_objective) + std::abs(out.dual_objective);
    out.relative_gap = std::max(std::abs(out.primal_objective - out.dual_objective), std::abs(xs)) / denom;
    out.iterations = iter;

    double infeas = std::max(out.primal_infeasibility, out.dual_infeasibility);
    if (std::max(out.relative_gap, infeas) < best_err) {
      best_err = std::max(out.relative_gap, infeas);
      best = out;
    }
    if (out.relative_gap <= opts.gap_tol && infeas <= opts.feas_tol) {
      out.status = SdpStatus::Optimal;
      return out;
    }
    if (out.relative_gap < opts.stall_gap && infeas < opts.stall_gap) {
      if (++stalled >= opts.stall_iters) return breakdown(SdpStatus::Optimal);
    }
    if (out.dual_objective > opts.divergence && out.dual_infeasibility < 1e-6) {
      out.status = SdpStatus::Unbounded;
      return out;
    }
    if (out.primal_objective < -opts.divergence && out.primal_infeasibility < 1e-6) {
      out.status = SdpStatus::Infeasible;
      return out;
    }
    if (iter >= opts.max_iter) return breakdown(SdpStatus::MaxIterations);

    bool ok = true;
    for (int b = 0; b < nb && ok; ++b) ok = nt_scaling(out.X[b], out.S[b], sc[b]);
    if (!ok) return breakdown(SdpStatus::NumericalFailure);

    std::vector<Mat> Wb(nb);
    for (int b = 0; b < nb; ++b) Wb[b] = sc[b].W;
    Mat H = opts.parallel_schur ? schur_parallel(P.A, Wb, m) : schur_reference(P.A, Wb, m);
    Eigen::LLT<Mat> chol(H);
    Eigen::LDLT<Mat> ldlt;
    bool use_ldlt = chol.info() != Eigen::Success;
    if (use_ldlt) {
      H.diagonal().array() += 1e-14 * std::max(1.0, H.diagonal().maxCoeff());
      ldlt.compute(H);
      if (ldlt.info() != Eigen::Success) return breakdown(SdpStatus::NumericalFailure);
    }

    // W Rd W does not depend on the right-hand side.
    Vec rhs_base = Rp;
    for (int b = 0; b < nb; ++b) {
      Mat wrw = sc[b].W * Rd[b] * sc[b].W;
      for (int i = 0; i < m; ++i) rhs_base[i] += inner(P.A[b][i], wrw);
    }

    auto solve_dir = [&](const std::vector<Mat>& R) {
      Direction dir;
      std::vector<Mat> Rc(nb);
      Vec rhs = rhs_base;
      for (int b = 0; b < nb; ++b) {
        const Vec& d = sc[b].d;
        Mat t = R[b];
        for (int i = 0; i < t.rows(); ++i)
          for (int j = 0; j < t.cols(); ++j) t(i, j) *= 2.0 / (d[i] + d[j]);
        Rc[b] = sym(sc[b].G * t * sc[b].G.transpose());
        for (int i = 0; i < m; ++i) rhs[i] -= inner(P.A[b][i], Rc[b]);
      }
      dir.dy = use_ldlt ? Vec(ldlt.solve(rhs)) : Vec(chol.solve(rhs));
      dir.dX.resize(nb);
      dir.dS.resize(nb);
      for (int b = 0; b < nb; ++b) {
        dir.dS[b] = Rd[b];
        for (int i = 0; i < m; ++i) add_scaled(dir.dS[b], P.A[b][i], -dir.dy[i]);
        dir.dS[b] = sym(dir.dS[b]);
        dir.dX[b] = sym(Rc[b] - sc[b].W * dir.dS[b] * sc[b].W);
      }
      return dir;
    };

    auto steps = [&](const Direction& dir, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(sc[b].Lx, dir.dX[b]));
        Eigen::LLT<Mat> cs(out.S[b]);
        ad = std::min(ad, max_step(cs.matrixL(), dir.dS[b]));
      }
    };

    // Predictor.
    std::vector<Mat> R(nb);
    for (int b = 0; b < nb; ++b) R[b] = Mat(Vec(-sc[b].d.array().square()).asDiagonal());
    Direction pred = solve_dir(R);
    double ap, ad;
    steps(pred, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu = xs / N, mu_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      mu_aff += frob_inner(out.X[b] + ap * pred.dX[b], out.S[b] + ad * pred.dS[b]);
    mu_aff /= N;
    double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expo), 0.0, 1.0);

    // Corrector.
    for (int b = 0; b < nb; ++b) {
      Mat dxt = sc[b].Ginv * pred.dX[b] * sc[b].Ginv.transpose();
      Mat dst = sc[b].G.transpose() * pred.dS[b] * sc[b].G;
      R[b] = sigma * mu * Mat::Identity(P.sides[b], P.sides[b]);
      R[b].diagonal() -= sc[b].d.array().square().matrix();
      R[b] -= sym(dxt * dst);
    }
    Direction dir = solve_dir(R);
    steps(dir, ap, ad);
    double gamma = 0.9 + 0.09 * std::min(1.0, std::min(ap, ad));
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (!(ap > 1e-12) && !(ad > 1e-12)) return breakdown(SdpStatus::NumericalFailure);
    for (int b = 0; b < nb; ++b) {
      out.X[b] = sym(out.X[b] + ap * dir.dX[b]);
      out.S[b] = sym(out.S[b] + ad * dir.dS[b]);
    }
    out.y += ad * dir.dy;
  }
}

SdpSolution solve_sdp(const SdpProblem& sdp, const SdpOptions& opts) {
  const int nv = sdp.moments.size();
  const int norm = sdp.normalization_index;
  SdpSolution sol;
  sol.y = MomentSequence(sdp.moments.nvars(), sdp.order);
  sol.y.y[norm] = 1.0;

  std::vector<int> vars;
  for (int v = 0; v < nv; ++v) {
    if (v == norm) continue;
    bool used = false;
    for (const auto& blk : sdp.blocks) used = used || !blk.coeff[v].empty();
    if (used) vars.push_back(v);
    else if (sdp.cost[v] != 0.0) {
      // A free variable with nonzero cost: the relaxation is unbounded below.
      sol.status = SdpStatus::Unbounded;
      sol.objective_value = -std::numeric_limits<double>::infinity();
      return sol;
    }
  }

  StandardSdp P;
  const int m = static_cast<int>(vars.size());
  P.b.resize(m);
  for (int i = 0; i < m; ++i) P.b[i] = -sdp.cost[vars[i]];
  for (const auto& blk : sdp.blocks) {
    P.sides.push_back(blk.side);
    P.C.push_back(to_dense(blk.coeff[norm], blk.side));
    std::vector<SparseSym> a(m);
    for (int i = 0; i < m; ++i) {
      a[i] = blk.coeff[vars[i]];
      for (auto& e : a[i]) e.value = -e.value;
    }
    P.A.push_back(std::move(a));
  }

  StandardSolution st = solve_standard(P, opts);
  for (int i = 0; i < m; ++i) sol.y.y[vars[i]] = st.y[i];
  sol.status = st.status;
  sol.iterations = st.iterations;
  sol.duality_gap = st.relative_gap;
  sol.primal_infeasibility = st.primal_infeasibility;
  sol.dual_infeasibility = st.dual_infeasibility;
  sol.objective_value = sdp.cost.dot(sol.y.y);
  return sol;
}

}  // namespace gnscert
