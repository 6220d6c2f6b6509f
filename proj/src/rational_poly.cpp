#include "cme/rational_poly.hpp"

#include <stdexcept>

#include "cme/combinatorics.hpp"

namespace cme {

RationalPolynomial::RationalPolynomial(std::vector<BigRational> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(BigRational(0));
  trim();
}

RationalPolynomial RationalPolynomial::monomial(int degree, const BigRational& c) {
  std::vector<BigRational> v(degree + 1, BigRational(0));
  v[degree] = c;
  return RationalPolynomial(std::move(v));
}

RationalPolynomial RationalPolynomial::constant(const BigRational& c) {
  return RationalPolynomial(std::vector<BigRational>{c});
}

const BigRational& RationalPolynomial::coeff(int d) const {
  static const BigRational zero(0);
  if (d < 0 || d >= static_cast<int>(c_.size())) return zero;
  return c_[d];
}

void RationalPolynomial::trim() {
  while (c_.size() > 1 && sgn(c_.back()) == 0) c_.pop_back();
}

RationalPolynomial& RationalPolynomial::operator+=(const RationalPolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), BigRational(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

RationalPolynomial& RationalPolynomial::operator-=(const RationalPolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), BigRational(0));
  for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

RationalPolynomial& RationalPolynomial::operator*=(const BigRational& s) {
  for (auto& v : c_) v *= s;
  trim();
  return *this;
}

RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
  std::vector<BigRational> out(a.c_.size() + b.c_.size() - 1, BigRational(0));
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (sgn(a.c_[i]) == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  }
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::derivative() const {
  if (c_.size() == 1) return RationalPolynomial();
  std::vector<BigRational> out(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) out[i - 1] = BigRational(static_cast<long>(i)) * c_[i];
  return RationalPolynomial(std::move(out));
}

BigRational RationalPolynomial::eval(const BigRational& x) const {
  BigRational r(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

double RationalPolynomial::eval(double x) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + to_double(*it);
  return r;
}

RationalPolynomial RationalPolynomial::compose_affine(const BigRational& a, const BigRational& b) const {
  RationalPolynomial arg(std::vector<BigRational>{a, b});
  RationalPolynomial acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
    acc = acc * arg;
    acc += RationalPolynomial::constant(*it);
  }
  return acc;
}

BigRational integrate_m1_1(const RationalPolynomial& p) {
  // Odd monomials cancel; int_{-1}^{1} x^d dx = 2/(d+1) for even d.
  BigRational r(0);
  for (int d = 0; d <= p.degree(); d += 2) r += 2 * p.coeff(d) / BigRational(d + 1);
  return r;
}

void MultiPoly::add(const MultiIndex& m, const BigRational& c) {
  if (sgn(c) == 0) return;
  auto [it, fresh] = t_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (sgn(it->second) == 0) t_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (vars_ != o.vars_) throw std::invalid_argument("MultiPoly variable count mismatch");
  for (const auto& [m, c] : o.t_) add(m, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (vars_ != o.vars_) throw std::invalid_argument("MultiPoly variable count mismatch");
  for (const auto& [m, c] : o.t_) add(m, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("MultiPoly variable count mismatch");
  MultiPoly out(a.vars_);
  for (const auto& [ma, ca] : a.t_)
    for (const auto& [mb, cb] : b.t_)
      out.add(MultiIndex{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, ca * cb);
  return out;
}

MultiPoly MultiPoly::shifted_power(int vars, const std::vector<int>& e) {
  MultiPoly out(vars);
  out.add(MultiIndex{0, 0, 0}, 1);
  for (int v = 0; v < static_cast<int>(e.size()); ++v) {
    MultiPoly factor(vars);  // (x_v + 1)^{e_v}
    for (int k = 0; k <= e[v]; ++k) {
      MultiIndex m{0, 0, 0};
      m[v] = k;
      factor.add(m, BigRational(binomial(e[v], k)));
    }
    out = out * factor;
  }
  return out;
}

}  // namespace cme
