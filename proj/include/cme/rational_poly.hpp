#ifndef CME_RATIONAL_POLY_HPP
#define CME_RATIONAL_POLY_HPP

#include <map>
#include <vector>

#include "cme/rational.hpp"
#include "cme/series.hpp"

namespace cme {

// Dense univariate polynomial with exact rational coefficients.  Trailing
// zero coefficients are trimmed so degree() is meaningful.
class RationalPolynomial {
 public:
  RationalPolynomial() : c_{BigRational(0)} {}
  explicit RationalPolynomial(std::vector<BigRational> coeffs);
  static RationalPolynomial monomial(int degree, const BigRational& c = 1);
  static RationalPolynomial constant(const BigRational& c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && sgn(c_[0]) == 0; }
  const BigRational& coeff(int d) const;
  const std::vector<BigRational>& coeffs() const { return c_; }

  RationalPolynomial& operator+=(const RationalPolynomial& o);
  RationalPolynomial& operator-=(const RationalPolynomial& o);
  RationalPolynomial& operator*=(const BigRational& s);
  friend RationalPolynomial operator+(RationalPolynomial a, const RationalPolynomial& b) { return a += b; }
  friend RationalPolynomial operator-(RationalPolynomial a, const RationalPolynomial& b) { return a -= b; }
  friend RationalPolynomial operator*(RationalPolynomial a, const BigRational& s) { return a *= s; }
  friend RationalPolynomial operator*(const BigRational& s, RationalPolynomial a) { return a *= s; }
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b);
  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.c_ == b.c_; }

  RationalPolynomial derivative() const;
  BigRational eval(const BigRational& x) const;
  double eval(double x) const;

  // p(a + b*x): composition with an affine argument, exact.
  RationalPolynomial compose_affine(const BigRational& a, const BigRational& b) const;

  void trim();

 private:
  std::vector<BigRational> c_;  // c_[d] is the coefficient of x^d
};

// Exact antiderivative evaluated between -1 and 1.
BigRational integrate_m1_1(const RationalPolynomial& p);

// Sparse multivariate polynomial with rational coefficients; carrier for the
// factorial-moment operator prefactors in up to 3 species.
class MultiPoly {
 public:
  explicit MultiPoly(int vars = 1) : vars_(vars) {}
  int vars() const { return vars_; }
  const std::map<MultiIndex, BigRational>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  void add(const MultiIndex& m, const BigRational& c);
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.t_ == b.t_;
  }

  // prod_j (x_j + 1)^{e_j}, expanded.
  static MultiPoly shifted_power(int vars, const std::vector<int>& e);

 private:
  int vars_;
  std::map<MultiIndex, BigRational> t_;
};

}  // namespace cme

#endif
