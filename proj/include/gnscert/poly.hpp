#pragma once

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnscert {

// Exponent vector X^alpha.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);
  static Monomial one(int n) { return Monomial(std::vector<int>(n, 0)); }
  static Monomial variable(int n, int i);

  int nvars() const { return static_cast<int>(exp_.size()); }
  int degree() const { return deg_; }
  int operator[](int i) const { return exp_[i]; }
  const std::vector<int>& exponents() const { return exp_; }

  Monomial operator+(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return exp_ == o.exp_; }
  bool operator<(const Monomial& o) const { return exp_ < o.exp_; }

  double evaluate(const Eigen::VectorXd& x) const;
  std::string str() const;

 private:
  std::vector<int> exp_;
  int deg_ = 0;
};

// Sentinel for deg(0).
inline constexpr int kZeroDegree = std::numeric_limits<int>::min();

class Polynomial {
 public:
  explicit Polynomial(int n = 0) : n_(n) {}
  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);

  int nvars() const { return n_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, double>& terms() const { return terms_; }
  double coeff(const Monomial& m) const;
  double coeff_norm() const;  // Euclidean norm of the coefficient vector

  // Adds c to the coefficient of m; drops the term if it becomes exactly zero.
  void add_term(const Monomial& m, double c);

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }
  bool operator==(const Polynomial& o) const { return n_ == o.n_ && terms_ == o.terms_; }

  std::string str() const;

 private:
  void check_same_n(const Polynomial& o) const;
  int n_;
  std::map<Monomial, double> terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

// The V_d ordering: graded by degree, lexicographically descending inside a degree.
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int n, int d);

  int nvars() const { return n_; }
  int max_degree() const { return d_; }
  int size() const { return static_cast<int>(mons_.size()); }
  const Monomial& operator[](int i) const { return mons_[i]; }
  const std::vector<Monomial>& monomials() const { return mons_; }
  // Number of monomials of degree <= e (s_e).
  int count_up_to(int e) const;
  // -1 when m is not in the basis.
  int index_of(const Monomial& m) const;

  // V_d(a): the basis evaluated at a.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& a) const;

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Monomial> mons_;
  std::map<Monomial, int> index_;
  std::vector<int> degree_end_;
};

MonomialBasis monomials_up_to(int n, int d);

// C(n+d, n).
long long basis_size(int n, int d);

double evaluate(const Polynomial& p, const Eigen::VectorXd& x);

Eigen::VectorXd vectorize(const Polynomial& p, const MonomialBasis& basis);
Polynomial devectorize(const Eigen::VectorXd& v, const MonomialBasis& basis);

}  // namespace gnscert
