#include "gnscert/extract.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace gnscert {

namespace {

double offdiag_max(const std::vector<Eigen::MatrixXd>& ops, const Eigen::MatrixXd& P) {
  double worst = 0.0;
  for (const auto& o : ops) {
    Eigen::MatrixXd d = P.transpose() * o * P;
    d.diagonal().setZero();
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return worst;
}

double pair_offdiag(const std::vector<Eigen::MatrixXd>& a, int p, int q) {
  double s = 0.0;
  for (const auto& m : a) s += m(p, q) * m(p, q);
  return s;
}

void rotate(std::vector<Eigen::MatrixXd>& a, Eigen::MatrixXd& P, int p, int q, double c, double s) {
  for (auto& m : a) {
    Eigen::VectorXd cp = m.col(p), cq = m.col(q);
    m.col(p) = c * cp + s * cq;
    m.col(q) = -s * cp + c * cq;
    Eigen::RowVectorXd rp = m.row(p), rq = m.row(q);
    m.row(p) = c * rp + s * rq;
    m.row(q) = -s * rp + c * rq;
  }
  Eigen::VectorXd cp = P.col(p), cq = P.col(q);
  P.col(p) = c * cp + s * cq;
  P.col(q) = -s * cp + c * cq;
}

// Jacobi sweeps minimizing the total off-diagonal energy, starting from P.
void joint_diagonalize(const std::vector<Eigen::MatrixXd>& ops, Eigen::MatrixXd& P) {
  std::vector<Eigen::MatrixXd> a;
  for (const auto& o : ops) a.push_back(P.transpose() * o * P);
  const int r = static_cast<int>(P.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool moved = false;
    for (int p = 0; p < r; ++p)
      for (int q = p + 1; q < r; ++q) {
        Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
        for (const auto& m : a) {
          Eigen::Vector2d h(m(p, p) - m(q, q), 2.0 * m(p, q));
          G += h * h.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G);
        Eigen::Vector2d v = es.eigenvectors().col(1);
        if (v[0] < 0) v = -v;
        double c = std::sqrt((1.0 + v[0]) / 2.0);
        if (c < 1e-300) continue;
        double s = v[1] / (2.0 * c);
        if (std::abs(s) < 1e-15) continue;
        double before = pair_offdiag(a, p, q);
        auto trial = a;
        Eigen::MatrixXd Pt = P;
        rotate(trial, Pt, p, q, c, s);
        auto trial2 = a;
        Eigen::MatrixXd Pt2 = P;
        rotate(trial2, Pt2, p, q, c, -s);
        double e1 = pair_offdiag(trial, p, q), e2 = pair_offdiag(trial2, p, q);
        if (std::min(e1, e2) >= before) continue;
        if (e1 <= e2) { a = std::move(trial); P = std::move(Pt); }
        else { a = std::move(trial2); P = std::move(Pt2); }
        moved = true;
      }
    if (!moved) break;
  }
}

}  // namespace

Eigen::MatrixXd simultaneous_diagonalize(const std::vector<Eigen::MatrixXd>& ops, std::uint64_t seed, double tol) {
  if (ops.empty()) throw std::invalid_argument("no operators to diagonalize");
  const int r = static_cast<int>(ops[0].rows());
  if (r == 0) return Eigen::MatrixXd(0, 0);
  double scale = 1.0;
  for (const auto& o : ops) scale = std::max(scale, o.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd best;
  double best_off = INFINITY;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::VectorXd dir(ops.size());
    for (auto& v : dir) v = gauss(rng);
    dir.normalize();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(r, r);
    for (size_t i = 0; i < ops.size(); ++i) A += dir[i] * ops[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A + A.transpose()));
    Eigen::MatrixXd P = es.eigenvectors();
    double off = offdiag_max(ops, P);
    if (off <= tol * scale) return P;
    if (off < best_off) { best_off = off; best = P; }
  }
  joint_diagonalize(ops, best);
  double off = offdiag_max(ops, best);
  if (off > tol * scale) {
    std::ostringstream os;
    os << "simultaneous diagonalization failed: off-diagonal " << off << " > " << tol * scale;
    throw NumericalFailure(os.str());
  }
  return best;
}

QuadratureRule extract_quadrature(const GnsModel& model, std::uint64_t seed, double tol, std::vector<std::string>* log) {
  const int r = model.dim(), n = model.source.nvars();
  QuadratureRule raw;
  if (r == 0) return raw;
  Eigen::MatrixXd P = simultaneous_diagonalize(model.ops, seed, tol);
  Eigen::VectorXd b = P.transpose() * model.one_coords();
  for (int j = 0; j < r; ++j) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = P.col(j).dot(model.ops[i] * P.col(j));
    double w = b[j] * b[j];
    if (w < kWeightPrune) {
      if (log) {
        std::ostringstream os;
        os << "pruned node with weight " << w;
        log->push_back(os.str());
      }
      continue;
    }
    raw.nodes.push_back(a);
    raw.weights.push_back(w);
  }

  {
    const MomentMatrix& M = model.source;
    polish_quadrature(moments_from_matrix(M), model.flat() ? 2 * M.order : 2 * M.order - 1, raw);
  }

  // Merge nodes that collapsed onto each other.
  QuadratureRule rule;
  std::vector<bool> used(raw.size(), false);
  for (int j = 0; j < raw.size(); ++j) {
    if (used[j]) continue;
    Eigen::VectorXd acc = raw.weights[j] * raw.nodes[j];
    double w = raw.weights[j];
    for (int k = j + 1; k < raw.size(); ++k) {
      if (used[k] || (raw.nodes[k] - raw.nodes[j]).norm() > kNodeMerge) continue;
      used[k] = true;
      acc += raw.weights[k] * raw.nodes[k];
      w += raw.weights[k];
      if (log) log->push_back("merged two nodes closer than the separation tolerance");
    }
    rule.nodes.push_back(acc / w);
    rule.weights.push_back(w);
  }

  std::vector<int> order(rule.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const auto& a = rule.nodes[x];
    const auto& c = rule.nodes[y];
    return std::lexicographical_compare(a.begin(), a.end(), c.begin(), c.end());
  });
  QuadratureRule sorted;
  for (int j : order) {
    sorted.nodes.push_back(rule.nodes[j]);
    sorted.weights.push_back(rule.weights[j]);
  }
  return sorted;
}

namespace {

Eigen::VectorXd rule_residual(const MomentSequence& L, int count, const QuadratureRule& r) {
  Eigen::VectorXd res = -L.y.head(count);
  for (int j = 0; j < r.size(); ++j)
    for (int i = 0; i < count; ++i) res[i] += r.weights[j] * L.basis[i].evaluate(r.nodes[j]);
  return res;
}

}  // namespace

double polish_quadrature(const MomentSequence& L, int max_degree, QuadratureRule& rule) {
  const int count = L.basis.count_up_to(max_degree);
  const int r = rule.size();
  if (r == 0) return 0.0;
  const int n = L.nvars();
  const int nu = r * (n + 1);
  Eigen::VectorXd res = rule_residual(L, count, rule);
  double cost = res.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < 100 && cost > 0; ++it) {
    Eigen::MatrixXd J(count, nu);
    for (int j = 0; j < r; ++j) {
      const Eigen::VectorXd& a = rule.nodes[j];
      for (int i = 0; i < count; ++i) {
        const Monomial& m = L.basis[i];
        J(i, j * (n + 1)) = m.evaluate(a);
        for (int v = 0; v < n; ++v) {
          if (m[v] == 0) {
            J(i, j * (n + 1) + 1 + v) = 0.0;
            continue;
          }
          std::vector<int> e = m.exponents();
          e[v] -= 1;
          J(i, j * (n + 1) + 1 + v) = rule.weights[j] * m[v] * Monomial(e).evaluate(a);
        }
      }
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::MatrixXd H = JtJ;
      H.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
      Eigen::VectorXd step = H.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      QuadratureRule trial = rule;
      bool positive = true;
      for (int j = 0; j < r; ++j) {
        trial.weights[j] += step[j * (n + 1)];
        positive = positive && trial.weights[j] > 0;
        for (int v = 0; v < n; ++v) trial.nodes[j][v] += step[j * (n + 1) + 1 + v];
      }
      Eigen::VectorXd tres = rule_residual(L, count, trial);
      if (positive && tres.squaredNorm() < cost) {
        rule = std::move(trial);
        res = tres;
        double prev = cost;
        cost = res.squaredNorm();
        lambda = std::max(lambda / 10, 1e-12);
        improved = true;
        if (prev - cost <= 1e-15 * prev) return res.cwiseAbs().maxCoeff();
      } else {
        lambda *= 10;
      }
    }
    if (!improved) break;
  }
  return res.cwiseAbs().maxCoeff();
}

double verify_quadrature(const MomentMatrix& M, const QuadratureRule& rule, int max_degree) {
  if (max_degree > 2 * M.order) throw std::invalid_argument("verification degree exceeds the matrix");
  MomentSequence L = moments_from_matrix(M);
  int count = L.basis.count_up_to(max_degree);
  double err = 0.0;
  for (int i = 0; i < count; ++i) {
    double s = 0.0;
    for (int j = 0; j < rule.size(); ++j) s += rule.weights[j] * L.basis[i].evaluate(rule.nodes[j]);
    err = std::max(err, std::abs(L.y[i] - s));
  }
  return err;
}

double reconstruction_error(const Eigen::MatrixXd& m_tilde, const MonomialBasis& basis, const QuadratureRule& rule) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int j = 0; j < rule.size(); ++j) {
    Eigen::VectorXd v = basis.evaluate(rule.nodes[j]);
    R += rule.weights[j] * v * v.transpose();
  }
  return (m_tilde - R).cwiseAbs().maxCoeff();
}

int moller_bound(const GnsModel& model, double tol) {
  int rk = max_commutator_rank(model.ops, tol);
  return model.dim() + (rk + 1) / 2;
}

bool FeasibilityReport::all() const {
  return std::all_of(feasible.begin(), feasible.end(), [](bool b) { return b; });
}

FeasibilityReport check_feasibility(const std::vector<Eigen::VectorXd>& nodes, const std::vector<Polynomial>& constraints,
                                    double tol) {
  FeasibilityReport rep;
  for (const auto& a : nodes) {
    bool ok = true;
    for (const auto& p : constraints) {
      double v = evaluate(p, a);
      rep.worst_violation = std::max(rep.worst_violation, -v);
      if (v < -tol * std::max(1.0, p.coeff_norm())) ok = false;
    }
    rep.feasible.push_back(ok);
  }
  return rep;
}

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::OptimalCertified: return "OptimalCertified";
    case CertStatus::GaussianRuleFoundNodesInfeasible: return "GaussianRuleFoundNodesInfeasible";
    case CertStatus::GaussianRuleFoundDegreeGap: return "GaussianRuleFoundDegreeGap";
    case CertStatus::Flat: return "Flat";
    case CertStatus::Inconclusive: return "Inconclusive";
    case CertStatus::MollerExcluded: return "MollerExcluded";
  }
  return "?";
}

namespace {

std::string fmt(const char* what, double v) {
  std::ostringstream os;
  os << what << ' ' << v;
  return os.str();
}

// Shared front half of certify/analyze_matrix: GNS, Hankel status, bounds.
// Returns nullopt when the GNS construction itself failed.
std::optional<GnsModel> analyze(const MomentMatrix& M, const CertifyOptions& opts, Certificate& cert) {
  cert.first_moment.resize(M.nvars());
  for (int i = 0; i < M.nvars(); ++i)
    cert.first_moment[i] = M.entries(0, M.basis.index_of(Monomial::variable(M.nvars(), i)));
  std::optional<GnsModel> model;
  try {
    model = build_gns(M, opts.tol_rank);
  } catch (const std::exception& e) {
    cert.diagnostics.push_back(std::string("GNS construction failed: ") + e.what());
    cert.status = CertStatus::Inconclusive;
    return std::nullopt;
  }
  HankelCertificate hc = certify_hankel(*model, opts.tol_hankel);
  cert.hankel = hc.status;
  cert.hankel_deviation = hc.deviation;
  cert.commutator_rank = hc.commutator_rank;
  cert.dim_T = model->dim();
  cert.rank_M = model->rank_M;
  cert.moller_lower_bound = model->dim() + (hc.commutator_rank + 1) / 2;
  for (auto& w : hc.warnings) cert.diagnostics.push_back("warning: " + w);
  return model;
}

bool extract_into(const GnsModel& model, const CertifyOptions& opts, Certificate& cert) {
  try {
    cert.rule = extract_quadrature(model, opts.seed, std::max(opts.tol_hankel, 1e-9) * 10, &cert.diagnostics);
  } catch (const NumericalFailure& e) {
    cert.diagnostics.push_back(e.what());
    return false;
  }
  const MomentMatrix& M = model.source;
  cert.quadrature_error = verify_quadrature(M, *cert.rule, 2 * M.order - 1);
  double allowed = 10 * opts.tol_hankel * M.scale();
  if (cert.quadrature_error > allowed) {
    cert.diagnostics.push_back(fmt("quadrature check on degree 2D-1 failed, error", cert.quadrature_error));
    return false;
  }
  return true;
}

}  // namespace

Certificate certify(const PopProblem& prob, const MomentMatrix& M, int k, double value, const CertifyOptions& opts) {
  Certificate cert;
  cert.relaxation_value = value;
  std::optional<GnsModel> model = analyze(M, opts, cert);
  if (!model) return cert;

  if (cert.hankel == HankelStatus::NotHankel) {
    if (opts.minimizer_cap && *opts.minimizer_cap < *cert.moller_lower_bound) {
      cert.status = CertStatus::MollerExcluded;
      cert.diagnostics.push_back("a Gaussian rule needs at least " + std::to_string(*cert.moller_lower_bound) +
                                 " nodes, more than the " + std::to_string(*opts.minimizer_cap) +
                                 " minimizers allowed");
    } else {
      cert.status = CertStatus::Inconclusive;
      cert.diagnostics.push_back("modified moment matrix is not generalized Hankel");
    }
    return cert;
  }

  const int df = prob.objective.degree();
  const bool flat = cert.hankel == HankelStatus::Flat;
  const bool even_gate = k % 2 == 0 && df <= k - 1;
  const bool odd_gate = k % 2 == 1 && df <= k - 2;
  if (odd_gate && !flat)
    cert.diagnostics.push_back("degree gate passed via the odd-k rule (deg f <= k-2), which is weaker than the even-k condition");

  const bool extracted = extract_into(*model, opts, cert);
  if (!extracted) cert.rule.reset();
  if (!(even_gate || odd_gate || flat)) {
    cert.status = CertStatus::GaussianRuleFoundDegreeGap;
    cert.diagnostics.push_back("objective degree too high for this relaxation order; nodes are candidates only");
    return cert;
  }
  if (!extracted) {
    cert.status = CertStatus::Inconclusive;
    return cert;
  }

  bool polyhedral = std::all_of(prob.constraints.begin(), prob.constraints.end(),
                                [](const Polynomial& p) { return p.degree() <= 1; });
  if (!prob.constraints.empty() && !polyhedral) {
    FeasibilityReport fr = check_feasibility(cert.rule->nodes, prob.constraints, opts.tol_feas);
    if (!fr.all()) {
      cert.status = CertStatus::GaussianRuleFoundNodesInfeasible;
      cert.diagnostics.push_back(fmt("worst constraint violation", fr.worst_violation));
      return cert;
    }
  }

  double tol_val = 10 * opts.tol_hankel * std::max(1.0, std::abs(value));
  for (const auto& a : cert.rule->nodes) {
    double fa = evaluate(prob.objective, a);
    if (std::abs(fa - value) > tol_val) {
      cert.status = CertStatus::Inconclusive;
      cert.diagnostics.push_back(fmt("objective at a node differs from the relaxation value by", fa - value));
      return cert;
    }
  }
  cert.status = CertStatus::OptimalCertified;
  return cert;
}

Certificate analyze_matrix(const MomentMatrix& M, const CertifyOptions& opts) {
  Certificate cert;
  std::optional<GnsModel> model = analyze(M, opts, cert);
  if (!model) return cert;
  cert.status = CertStatus::Inconclusive;
  if (cert.hankel == HankelStatus::NotHankel) {
    cert.diagnostics.push_back("modified moment matrix is not generalized Hankel");
    return cert;
  }
  if (!extract_into(*model, opts, cert)) {
    cert.rule.reset();
    return cert;
  }
  if (cert.hankel == HankelStatus::Flat) cert.status = CertStatus::Flat;
  else cert.diagnostics.push_back("Gaussian rule extracted; no problem supplied to certify against");
  return cert;
}

}  // namespace gnscert
