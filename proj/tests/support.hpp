#pragma once

// Test-only oracles. Nothing here calls into the library's moment or GNS code.

#include "gnscert/extract.hpp"
#include "gnscert/io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline std::string data(const std::string& rel) { return std::string(GNSCERT_DATA_DIR) + "/" + rel; }

// Exponent vectors of degree <= d: graded, lexicographically descending inside a degree.
inline void fill_degree(int n, int t, int var, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (var == n - 1) {
    cur[var] = t;
    out.push_back(cur);
    return;
  }
  for (int a = t; a >= 0; --a) {
    cur[var] = a;
    fill_degree(n, t - a, var + 1, cur, out);
  }
}

inline std::vector<std::vector<int>> exponents(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  for (int t = 0; t <= d; ++t) fill_degree(n, t, 0, cur, out);
  return out;
}

inline double power_product(const std::vector<int>& e, const Eigen::VectorXd& a) {
  double v = 1.0;
  for (size_t i = 0; i < e.size(); ++i)
    for (int p = 0; p < e[i]; ++p) v *= a[i];
  return v;
}

inline Eigen::VectorXd veronese(const Eigen::VectorXd& a, int d) {
  auto ex = exponents(static_cast<int>(a.size()), d);
  Eigen::VectorXd v(ex.size());
  for (size_t i = 0; i < ex.size(); ++i) v[i] = power_product(ex[i], a);
  return v;
}

// sum_j w_j V_d(a_j) V_d(a_j)^T, optionally times p(a_j).
template <class Weight>
Eigen::MatrixXd atomic_matrix(const std::vector<Eigen::VectorXd>& nodes, const std::vector<double>& w, int d,
                              Weight pw) {
  const int s = static_cast<int>(veronese(nodes[0], d).size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s, s);
  for (size_t j = 0; j < nodes.size(); ++j) {
    Eigen::VectorXd v = veronese(nodes[j], d);
    m += w[j] * pw(nodes[j]) * v * v.transpose();
  }
  return m;
}

inline Eigen::MatrixXd atomic_matrix(const std::vector<Eigen::VectorXd>& nodes, const std::vector<double>& w, int d) {
  return atomic_matrix(nodes, w, d, [](const Eigen::VectorXd&) { return 1.0; });
}

// Greedy matching of two node sets; returns the largest coordinate or weight mismatch.
inline double rule_distance(const gnscert::QuadratureRule& got, const std::vector<Eigen::VectorXd>& nodes,
                            const std::vector<double>& weights) {
  if (got.size() != static_cast<int>(nodes.size())) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(nodes.size(), false);
  double worst = 0.0;
  for (int j = 0; j < got.size(); ++j) {
    int pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (used[i]) continue;
      double dist = (got.nodes[j] - nodes[i]).cwiseAbs().maxCoeff();
      if (dist < best) {
        best = dist;
        pick = static_cast<int>(i);
      }
    }
    used[pick] = true;
    worst = std::max({worst, best, std::abs(got.weights[j] - weights[pick])});
  }
  return worst;
}

// Generic random instance: distinct nodes in [-1,1]^n with weights bounded away from 0.
struct AtomicInstance {
  int n;
  int D;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
};

inline AtomicInstance random_atomic(std::mt19937_64& rng, int n, int D, int atoms) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), wd(0.2, 1.0);
  AtomicInstance inst{n, D, {}, {}};
  double total = 0.0;
  while (static_cast<int>(inst.nodes.size()) < atoms) {
    Eigen::VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = u(rng);
    bool separated = true;
    for (const auto& b : inst.nodes) separated = separated && (a - b).norm() > 0.2;
    if (!separated) continue;
    inst.nodes.push_back(a);
    inst.weights.push_back(wd(rng));
    total += inst.weights.back();
  }
  for (double& w : inst.weights) w /= total;
  return inst;
}

inline gnscert::MomentMatrix to_moment_matrix(const AtomicInstance& inst) {
  return gnscert::MomentMatrix(inst.n, inst.D, atomic_matrix(inst.nodes, inst.weights, inst.D));
}

}  // namespace oracle
