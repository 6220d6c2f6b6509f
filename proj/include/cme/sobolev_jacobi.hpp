#ifndef CME_SOBOLEV_JACOBI_HPP
#define CME_SOBOLEV_JACOBI_HPP

#include <vector>

#include "cme/rational.hpp"
#include "cme/rational_poly.hpp"

namespace cme {

// Sobolev-Jacobi polynomial P~_n^{(-1,beta)}, beta >= -1 rational.  Monic for
// n >= 2; P~_0 = 1; P~_1 = x (beta = -1, gamma = 0) or x - 1 (beta > -1).
RationalPolynomial sj_polynomial(const BigRational& beta, int n);

// Exact value of the form a + b * 2^beta.  For beta = -1 (and any integer
// beta) the inner products are plain rationals and live in `plain`.
struct SobolevValue {
  BigRational plain;
  BigRational pow2beta;

  bool operator==(const SobolevValue& o) const = default;
  bool is_zero() const { return sgn(plain) == 0 && sgn(pow2beta) == 0; }
  // Collapses to a rational; throws unless beta is an integer.
  BigRational to_rational(const BigRational& beta) const;
};

// Sobolev inner product: for beta = -1,
//   Phi(p,q) = p(1)q(1) + p(-1)q(-1) + int_{-1}^{1} p'q' dx     (A = B = 1)
// and for beta > -1,
//   Phi(p,q) = p(1)q(1) + int_{-1}^{1} (x+1)^{beta+1} p'q' dx   (C = 1),
// the weighted integral reduced exactly via the (x+1)-basis expansion.
SobolevValue sobolev_inner(const RationalPolynomial& p, const RationalPolynomial& q,
                           const BigRational& beta);

// Closed-form diagonal norm Phi(P~_n, P~_n).
SobolevValue sj_norm(const BigRational& beta, int n);

// Terminating 2F1(-m, b; c; z) = sum_{j<=m} ((-m)_j (b)_j / (c)_j) z^j / j!.
// Throws std::domain_error when c hits a nonpositive integer before the
// series terminates.
BigRational hyp2f1_terminating(unsigned m, const BigRational& b, const BigRational& c,
                               const BigRational& z);

// Decomposition coefficient of x^M over the P~ basis: x^M = sum_n B^{M,n} P~_n.
BigRational coeff_B(unsigned M, unsigned n, const BigRational& beta);

// Mixed coefficient for the affine-shifted basis:
// A^{M,n} = sum_{P=n}^{M} binom(M,P) (rl/2)^{M-P} (1-rl/2)^P B^{P,n}.
BigRational coeff_A(unsigned M, unsigned n, const BigRational& rbar_d, const BigRational& rbar_l);

// Spectral solution data for the binary family {A->0 (r_d), 2A->0 (r_k),
// 2A->A (r_l)} from the deterministic initial state |M>.
struct BinarySolution {
  unsigned M = 0;
  BigRational sigma, rbar_d, rbar_l;
  bool pure_decay = false;                 // r_k = r_l = 0
  std::vector<BigRational> A_coeffs;       // A^{M,n}
  std::vector<BigRational> eigenrates;     // lambda_n = n(n+rbar_d-1) sigma
  std::vector<RationalPolynomial> terms;   // A^{M,n} * P~_n((x-rl/2)/(1-rl/2))
  long max_coeff_bits = 0;                 // magnitude bound for evaluation

  // PGF coefficients p_0..p_M at time t.
  std::vector<double> eval(double t) const;
};

BinarySolution prepare_binary(const BigRational& r_d, const BigRational& r_k,
                              const BigRational& r_l, unsigned M);

std::vector<double> solve_binary(const BigRational& r_d, const BigRational& r_k,
                                 const BigRational& r_l, unsigned M, double t);

// Residual of (H + n(n+rbar_d-1)sigma) applied to the shifted basis
// polynomial, H = r_d(1-x)d + r_k(1-x^2)d^2 + r_l(x-x^2)d^2.  Exact; the
// zero polynomial whenever the eigenrelation holds.
RationalPolynomial eigencheck(const BigRational& r_d, const BigRational& r_k,
                              const BigRational& r_l, int n);

}  // namespace cme

#endif
