#include "gnscert/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace gnscert {

Monomial::Monomial(std::vector<int> exponents) : exp_(std::move(exponents)) {
  for (int e : exp_) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    deg_ += e;
  }
}

Monomial Monomial::variable(int n, int i) {
  std::vector<int> e(n, 0);
  e.at(i) = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator+(const Monomial& o) const {
  if (o.nvars() != nvars()) throw std::invalid_argument("monomial variable count mismatch");
  std::vector<int> e(exp_);
  for (int i = 0; i < nvars(); ++i) e[i] += o.exp_[i];
  return Monomial(std::move(e));
}

double Monomial::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != nvars()) throw std::invalid_argument("point dimension mismatch");
  double v = 1.0;
  for (int i = 0; i < nvars(); ++i)
    for (int k = 0; k < exp_[i]; ++k) v *= x[i];
  return v;
}

std::string Monomial::str() const {
  if (deg_ == 0) return "1";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < nvars(); ++i) {
    if (exp_[i] == 0) continue;
    if (!first) os << '*';
    os << 'x' << (i + 1);
    if (exp_[i] > 1) os << '^' << exp_[i];
    first = false;
  }
  return os.str();
}

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Monomial::one(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  Polynomial p(n);
  p.add_term(Monomial::variable(n, i), 1.0);
  return p;
}

int Polynomial::degree() const {
  int d = kZeroDegree;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::coeff_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * c;
  return std::sqrt(s);
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.nvars() != n_) throw std::invalid_argument("term variable count mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::check_same_n(const Polynomial& o) const {
  if (o.n_ != n_) throw std::invalid_argument("polynomial variable count mismatch");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_same_n(o);
  Polynomial r(*this);
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_same_n(o);
  Polynomial r(n_);
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) r.add_term(a + b, ca * cb);
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(n_);
  if (s == 0.0) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
  return r;
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    os << std::abs(c);
    if (m.degree() > 0) os << '*' << m.str();
    first = false;
  }
  return os.str();
}

long long basis_size(int n, int d) {
  // C(n+d, n) computed incrementally; exact for the sizes used here.
  long long r = 1;
  for (int i = 1; i <= n; ++i) r = r * (d + i) / i;
  return r;
}

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1) throw std::invalid_argument("need at least one variable");
  if (d < 0) throw std::invalid_argument("negative degree");
  std::vector<int> e(n, 0);
  // Exponents of total degree deg, descending lexicographic order.
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      e[pos] = left;
      mons_.emplace_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  for (int deg = 0; deg <= d; ++deg) {
    rec(0, deg);
    degree_end_.push_back(size());
  }
  for (int i = 0; i < size(); ++i) index_.emplace(mons_[i], i);
}

int MonomialBasis::count_up_to(int e) const {
  if (e < 0) return 0;
  if (e > d_) throw std::out_of_range("degree beyond basis");
  return degree_end_[e];
}

int MonomialBasis::index_of(const Monomial& m) const {
  auto it = index_.find(m);
  return it == index_.end() ? -1 : it->second;
}

Eigen::VectorXd MonomialBasis::evaluate(const Eigen::VectorXd& a) const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = mons_[i].evaluate(a);
  return v;
}

MonomialBasis monomials_up_to(int n, int d) { return MonomialBasis(n, d); }

double evaluate(const Polynomial& p, const Eigen::VectorXd& x) {
  if (x.size() != p.nvars()) throw std::invalid_argument("point dimension mismatch");
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * m.evaluate(x);
  return s;
}

Eigen::VectorXd vectorize(const Polynomial& p, const MonomialBasis& basis) {
  if (p.nvars() != basis.nvars()) throw std::invalid_argument("variable count mismatch");
  if (p.degree() > basis.max_degree()) throw std::invalid_argument("polynomial degree exceeds basis");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.size());
  for (const auto& [m, c] : p.terms()) v[basis.index_of(m)] = c;
  return v;
}

Polynomial devectorize(const Eigen::VectorXd& v, const MonomialBasis& basis) {
  if (v.size() != basis.size()) throw std::invalid_argument("coefficient vector length mismatch");
  Polynomial p(basis.nvars());
  for (int i = 0; i < basis.size(); ++i) p.add_term(basis[i], v[i]);
  return p;
}

}  // namespace gnscert
