#include "cme/sobolev_jacobi.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cme/combinatorics.hpp"

namespace cme {

namespace {

bool is_minus_one(const BigRational& beta) { return beta == -1; }

// (x-1)^a as a polynomial
RationalPolynomial x_minus_one_pow(int a) {
  std::vector<BigRational> c(a + 1);
  for (int k = 0; k <= a; ++k)
    c[k] = BigRational(binomial(a, k)) * ((a - k) % 2 ? -1 : 1);
  return RationalPolynomial(std::move(c));
}

RationalPolynomial x_plus_one_pow(int a) {
  std::vector<BigRational> c(a + 1);
  for (int k = 0; k <= a; ++k) c[k] = BigRational(binomial(a, k));
  return RationalPolynomial(std::move(c));
}

}  // namespace

RationalPolynomial sj_polynomial(const BigRational& beta, int n) {
  if (beta < BigRational(-1)) throw std::invalid_argument("beta must be >= -1");
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (n == 0) return RationalPolynomial::constant(1);
  if (n == 1) {
    // gamma = 0 for beta = -1 (A = B); x - 1 otherwise
    if (is_minus_one(beta)) return RationalPolynomial::monomial(1);
    return RationalPolynomial(std::vector<BigRational>{-1, 1});
  }
  RationalPolynomial acc;
  if (is_minus_one(beta)) {
    for (int k = 1; k <= n - 1; ++k) {
      const BigRational c = BigRational(binomial(n - 1, k)) * BigRational(binomial(n - 1, n - k));
      if (sgn(c) == 0) continue;
      acc += c * (x_minus_one_pow(n - k) * x_plus_one_pow(k));
    }
    acc *= 1 / binomial_rational(BigRational(2 * n - 2), n);
  } else {
    for (int k = 0; k <= n - 1; ++k) {
      const BigRational c =
          BigRational(binomial(n - 1, k)) * binomial_rational(BigRational(n) + beta, n - k);
      if (sgn(c) == 0) continue;
      acc += c * (x_minus_one_pow(n - k) * x_plus_one_pow(k));
    }
    acc *= 1 / binomial_rational(BigRational(2 * n - 1) + beta, n);
  }
  return acc;
}

BigRational SobolevValue::to_rational(const BigRational& beta) const {
  if (sgn(pow2beta) == 0) return plain;
  if (beta.get_den() != 1) throw std::domain_error("value involves an irrational power of two");
  return plain + pow2beta * rational_pow(BigRational(2), beta.get_num().get_si());
}

SobolevValue sobolev_inner(const RationalPolynomial& p, const RationalPolynomial& q,
                           const BigRational& beta) {
  SobolevValue v{0, 0};
  if (is_minus_one(beta)) {
    v.plain = p.eval(BigRational(1)) * q.eval(BigRational(1)) +
              p.eval(BigRational(-1)) * q.eval(BigRational(-1)) +
              integrate_m1_1(p.derivative() * q.derivative());
    return v;
  }
  v.plain = p.eval(BigRational(1)) * q.eval(BigRational(1));
  // int_{-1}^{1} (x+1)^{beta+1} p'q' dx: expand p'q' around x = -1 so each
  // term integrates to 2^{beta+2+b}/(beta+2+b); collect the 2^beta factor.
  const RationalPolynomial prod = p.derivative() * q.derivative();
  if (!prod.is_zero()) {
    const RationalPolynomial shifted = prod.compose_affine(-1, 1);  // coeffs of (x+1)^b
    for (int b = 0; b <= shifted.degree(); ++b) {
      if (sgn(shifted.coeff(b)) == 0) continue;
      v.pow2beta += shifted.coeff(b) * rational_pow(BigRational(2), b + 2) / (beta + b + 2);
    }
  }
  return v;
}

SobolevValue sj_norm(const BigRational& beta, int n) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (is_minus_one(beta)) {
    if (n == 0) return {2, 0};
    if (n == 1) return {4, 0};
    // n^2 K_{n-1}, K_{n-1} = 2^{2n-1} ((n-1)!)^4 / ((2n-2)!(2n-1)!)
    BigRational k = rational_pow(BigRational(2), 2 * n - 1);
    k *= rational_pow(BigRational(factorial(n - 1)), 4);
    k /= BigRational(factorial(2 * n - 2)) * BigRational(factorial(2 * n - 1));
    return {BigRational(n * n) * k, 0};
  }
  if (n == 0) return {1, 0};
  // n^2 2^{2n+beta} ((n-1)! (n+beta)!)^2 / ((2n+beta-1)! (2n+beta)!), the
  // gamma-function ratios telescoped to rational products.  A variant with
  // (n+beta+1)! in place of (n+beta)! circulates but fails the direct Phi
  // integral already at n = 1; this form reproduces the integral exactly and
  // degenerates to the beta = -1 case above.
  BigRational val = BigRational(n * n) * rational_pow(BigRational(2), 2 * n);
  val *= rational_pow(BigRational(factorial(n - 1)), 2);
  BigRational denom(1);
  for (int j = 1; j <= n - 1; ++j) denom *= BigRational(n + j) + beta;
  for (int j = 1; j <= n; ++j) denom *= BigRational(n + j) + beta;
  return {0, val / denom};
}

BigRational hyp2f1_terminating(unsigned m, const BigRational& b, const BigRational& c,
                               const BigRational& z) {
  BigRational sum(1), term(1);
  for (unsigned j = 0; j < m; ++j) {
    const BigRational cj = c + j;
    if (sgn(cj) == 0) throw std::domain_error("2F1 pole: c + j vanished before termination");
    term *= (BigRational(-static_cast<long>(m)) + j) * (b + j) * z / (cj * BigRational(j + 1));
    sum += term;
  }
  return sum;
}

BigRational coeff_B(unsigned M, unsigned n, const BigRational& beta) {
  if (beta < BigRational(-1)) throw std::invalid_argument("beta must be >= -1");
  if (n > M) return 0;
  if (is_minus_one(beta)) {
    if ((M + n) % 2 != 0) return 0;
    BigRational r = BigRational(binomial(2 * n, n)) * BigRational(factorial(M));
    r *= BigRational(factorial((M + n) / 2));
    r /= BigRational(factorial(M + n)) * BigRational(factorial((M - n) / 2));
    return r;
  }
  if (M == 0) return n == 0 ? 1 : 0;
  if (n == 0) return 1;
  // b^{M,n} = M (2n+beta)!/(2^{n-1} n! (n+beta+1)!) *
  //           sum_k binom(n-1,k) (-1)^{n-1-k} 2F1(1-M, n-k; beta+n+2; 2).
  // The k-sum telescopes: expanding the terminating 2F1 and using
  // sum_i (-1)^i binom(n-1,i) binom(i+j,j) = (-1)^{n-1} binom(j,n-1) turns
  // the double sum into
  //   (-1)^{n-1} sum_{j=n-1}^{M-1} (1-M)_j binom(j,n-1) 2^j / (c)_j,
  // c = beta+n+2, evaluated incrementally.
  BigRational pref = BigRational(M) / rational_pow(BigRational(2), n - 1);
  pref /= BigRational(factorial(n));
  for (unsigned i = 0; i + 2 <= n; ++i) pref *= BigRational(n + 2 + i) + beta;  // (2n+b)!/(n+b+1)!
  if (n % 2 == 0) pref = -pref;  // (-1)^{n-1}
  const BigRational c = beta + n + 2;
  // first term, j = n-1: (1-M)_{n-1} binom(n-1,n-1) 2^{n-1} / (c)_{n-1}
  BigRational term = rational_pow(BigRational(2), n - 1);
  for (unsigned i = 0; i + 1 < n; ++i) {
    const BigRational ci = c + i;
    if (sgn(ci) == 0) throw std::domain_error("2F1 pole: c + j vanished before termination");
    term *= (BigRational(1) - M + i) / ci;
  }
  BigRational sum(0);
  for (unsigned j = n - 1; j < M; ++j) {
    sum += term;
    const BigRational cj = c + j;
    if (sgn(cj) == 0) throw std::domain_error("2F1 pole: c + j vanished before termination");
    // ratio of consecutive terms: (1-M+j) * (j+1)/(j+2-n) * 2 / (c+j)
    term *= (BigRational(1) - M + j) * BigRational(2 * (j + 1)) /
            (BigRational(static_cast<long>(j) + 2 - static_cast<long>(n)) * cj);
  }
  return pref * sum;
}

BigRational coeff_A(unsigned M, unsigned n, const BigRational& rbar_d, const BigRational& rbar_l) {
  if (rbar_l < 0 || rbar_l > 1) throw std::invalid_argument("rbar_l must lie in [0,1]");
  const BigRational beta = rbar_d - 1;
  const BigRational half_l = rbar_l / 2;
  BigRational acc(0);
  for (unsigned P = n; P <= M; ++P) {
    const BigRational w = BigRational(binomial(M, P)) * rational_pow(half_l, M - P) *
                          rational_pow(1 - half_l, P);
    if (sgn(w) == 0) continue;
    acc += w * coeff_B(P, n, beta);
  }
  return acc;
}

BinarySolution prepare_binary(const BigRational& r_d, const BigRational& r_k,
                              const BigRational& r_l, unsigned M) {
  if (sgn(r_d) < 0 || sgn(r_k) < 0 || sgn(r_l) < 0)
    throw std::invalid_argument("rates must be >= 0");
  BinarySolution sol;
  sol.M = M;
  sol.sigma = r_k + r_l;
  if (sgn(sol.sigma) == 0) {
    sol.pure_decay = true;
    sol.rbar_d = r_d;  // decay rate itself
    sol.rbar_l = 0;
    return sol;
  }
  sol.rbar_d = r_d / sol.sigma;
  sol.rbar_l = r_l / sol.sigma;
  const BigRational beta = sol.rbar_d - 1;
  const BigRational shift = sol.rbar_l / 2;
  const BigRational scale = 1 - shift;
  for (unsigned n = 0; n <= M; ++n) {
    const BigRational a = coeff_A(M, n, sol.rbar_d, sol.rbar_l);
    sol.A_coeffs.push_back(a);
    sol.eigenrates.push_back(BigRational(n) * (BigRational(n) + sol.rbar_d - 1) * sol.sigma);
    RationalPolynomial term;
    if (sgn(a) != 0) {
      // P~_n((x - shift)/scale) = P~_n(-shift/scale + x/scale)
      term = a * sj_polynomial(beta, n).compose_affine(-shift / scale, 1 / scale);
    }
    for (int d = 0; d <= term.degree(); ++d) {
      const BigRational& c = term.coeff(d);
      if (sgn(c) == 0) continue;
      const long bits = static_cast<long>(mpz_sizeinbase(c.get_num().get_mpz_t(), 2)) -
                        static_cast<long>(mpz_sizeinbase(c.get_den().get_mpz_t(), 2));
      sol.max_coeff_bits = std::max(sol.max_coeff_bits, bits);
    }
    sol.terms.push_back(std::move(term));
  }
  return sol;
}

std::vector<double> BinarySolution::eval(double t) const {
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  std::vector<double> out(M + 1, 0.0);
  if (pure_decay) {
    // Bern(e^{-r_d t}; x)^M
    const double q = std::exp(-to_double(rbar_d) * t);
    double c = std::pow(1.0 - q, static_cast<double>(M));
    const double ratio = (1.0 - q) > 0.0 ? q / (1.0 - q) : 0.0;
    if (1.0 - q == 0.0) {
      out.assign(M + 1, 0.0);
      out[M] = 1.0;
      return out;
    }
    for (unsigned k = 0; k <= M; ++k) {
      out[k] = c * to_double(BigRational(binomial(M, k)));
      c *= ratio;
    }
    return out;
  }
  // The basis terms carry coefficients up to ~2^max_coeff_bits that cancel
  // against each other, so assemble in extended precision.
  const mpfr_prec_t prec =
      static_cast<mpfr_prec_t>(std::max<long>(128, max_coeff_bits + 96));
  std::vector<mpfr_t> weights(M + 1);
  mpfr_t acc_j, term;
  mpfr_init2(acc_j, prec);
  mpfr_init2(term, prec);
  for (unsigned n = 0; n <= M; ++n) {
    mpfr_init2(weights[n], prec);
    mpfr_set_q(weights[n], eigenrates[n].get_mpq_t(), MPFR_RNDN);
    mpfr_mul_d(weights[n], weights[n], -t, MPFR_RNDN);
    mpfr_exp(weights[n], weights[n], MPFR_RNDN);
  }
  for (unsigned j = 0; j <= M; ++j) {
    mpfr_set_zero(acc_j, 1);
    for (unsigned n = 0; n <= M; ++n) {
      if (terms[n].is_zero() || static_cast<int>(j) > terms[n].degree()) continue;
      const BigRational& c = terms[n].coeff(j);
      if (sgn(c) == 0) continue;
      mpfr_set_q(term, c.get_mpq_t(), MPFR_RNDN);
      mpfr_mul(term, term, weights[n], MPFR_RNDN);
      mpfr_add(acc_j, acc_j, term, MPFR_RNDN);
    }
    out[j] = mpfr_get_d(acc_j, MPFR_RNDN);
  }
  for (unsigned n = 0; n <= M; ++n) mpfr_clear(weights[n]);
  mpfr_clears(acc_j, term, static_cast<mpfr_ptr>(nullptr));
  return out;
}

std::vector<double> solve_binary(const BigRational& r_d, const BigRational& r_k,
                                 const BigRational& r_l, unsigned M, double t) {
  return prepare_binary(r_d, r_k, r_l, M).eval(t);
}

RationalPolynomial eigencheck(const BigRational& r_d, const BigRational& r_k,
                              const BigRational& r_l, int n) {
  const BigRational sigma = r_k + r_l;
  if (sgn(sigma) <= 0) throw std::invalid_argument("eigencheck needs r_k + r_l > 0");
  const BigRational rbar_d = r_d / sigma;
  const BigRational rbar_l = r_l / sigma;
  const BigRational shift = rbar_l / 2;
  const BigRational scale = 1 - shift;
  RationalPolynomial p =
      sj_polynomial(rbar_d - 1, n).compose_affine(-shift / scale, 1 / scale);
  RationalPolynomial d1 = p.derivative();
  RationalPolynomial d2 = d1.derivative();
  // H = r_d (1-x) d + r_k (1-x^2) d^2 + r_l (x-x^2) d^2
  RationalPolynomial one_minus_x(std::vector<BigRational>{1, -1});
  RationalPolynomial one_minus_x2(std::vector<BigRational>{1, 0, -1});
  RationalPolynomial x_minus_x2(std::vector<BigRational>{0, 1, -1});
  RationalPolynomial res = r_d * (one_minus_x * d1);
  res += r_k * (one_minus_x2 * d2);
  res += r_l * (x_minus_x2 * d2);
  const BigRational lam = BigRational(n) * (BigRational(n) + rbar_d - 1) * sigma;
  res += lam * p;
  return res;
}

}  // namespace cme
