#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cme/combinatorics.hpp"
#include "cme/master_equation.hpp"
#include "cme/reaction.hpp"
#include "cme/sobolev_jacobi.hpp"

using namespace cme;

namespace {

// Exact oracle for the decomposition coefficients: triangular solve of
// x^M = sum_n B_n P~_n over the rationals, independent of the closed forms.
std::vector<BigRational> coeff_B_by_solve(unsigned M, const BigRational& beta) {
  std::vector<RationalPolynomial> basis;
  for (unsigned n = 0; n <= M; ++n) basis.push_back(sj_polynomial(beta, n));
  std::vector<BigRational> rem(M + 1, BigRational(0)), b(M + 1, BigRational(0));
  rem[M] = 1;
  for (int n = static_cast<int>(M); n >= 0; --n) {
    const BigRational lead = basis[n].coeff(n);
    const BigRational c = rem[n] / lead;
    b[n] = c;
    for (int d = 0; d <= n; ++d) rem[d] -= c * basis[n].coeff(d);
  }
  for (const auto& r : rem) REQUIRE(sgn(r) == 0);
  return b;
}

const std::vector<BigRational> kBetas = {BigRational(-1), BigRational(0), make_rational(1, 2),
                                         BigRational(3)};

}  // namespace

TEST_CASE("basis polynomials: stated low orders") {
  CHECK(sj_polynomial(BigRational(-1), 0) == RationalPolynomial::constant(1));
  CHECK(sj_polynomial(BigRational(-1), 1) == RationalPolynomial::monomial(1));  // gamma = 0
  CHECK(sj_polynomial(BigRational(-1), 2) ==
        RationalPolynomial(std::vector<BigRational>{-1, 0, 1}));
  CHECK(sj_polynomial(BigRational(0), 1) == RationalPolynomial(std::vector<BigRational>{-1, 1}));
  // monic of the stated degree, and P~_n(1) = 0 for n >= 1 (beta > -1)
  for (const auto& beta : kBetas)
    for (int n = 0; n <= 10; ++n) {
      const RationalPolynomial p = sj_polynomial(beta, n);
      CHECK(p.degree() == n);
      if (n >= 2) CHECK(p.coeff(n) == 1);
      if (n >= 1 && !(beta == BigRational(-1))) CHECK(p.eval(BigRational(1)) == 0);
    }
}

TEST_CASE("Sobolev orthogonality and diagonal norms, n <= 10") {
  for (const auto& beta : kBetas) {
    std::vector<RationalPolynomial> basis;
    for (int n = 0; n <= 10; ++n) basis.push_back(sj_polynomial(beta, n));
    for (int m = 0; m <= 10; ++m)
      for (int n = m; n <= 10; ++n) {
        const SobolevValue v = sobolev_inner(basis[m], basis[n], beta);
        if (m < n) {
          CHECK(v.is_zero());
        } else {
          CHECK(v == sj_norm(beta, n));
        }
      }
  }
}

TEST_CASE("norm table examples") {
  CHECK(sj_norm(BigRational(-1), 0) == SobolevValue{2, 0});
  CHECK(sj_norm(BigRational(-1), 1) == SobolevValue{4, 0});
  CHECK(sj_norm(BigRational(-1), 2) == SobolevValue{make_rational(8, 3), 0});
  // integer beta collapses to a rational
  CHECK(sj_norm(BigRational(0), 1).to_rational(BigRational(0)) == 2);
  CHECK_THROWS_AS(sj_norm(make_rational(1, 2), 1).to_rational(make_rational(1, 2)),
                  std::domain_error);
}

TEST_CASE("terminating 2F1") {
  CHECK(hyp2f1_terminating(0, make_rational(5, 3), BigRational(2), BigRational(7)) == 1);
  // m = 1: 1 - b z / c
  CHECK(hyp2f1_terminating(1, BigRational(3), BigRational(4), BigRational(2)) ==
        make_rational(-1, 2));
  // direct three-term evaluation of the defining sum
  CHECK(hyp2f1_terminating(2, BigRational(1), BigRational(3), BigRational(2)) ==
        make_rational(1, 3));
  CHECK_THROWS_AS(hyp2f1_terminating(3, BigRational(1), BigRational(-2), BigRational(1)),
                  std::domain_error);
}

TEST_CASE("coeff_B: stated values and the exact linear-solve oracle, M <= 12") {
  CHECK(coeff_B(2, 2, BigRational(-1)) == 1);
  CHECK(coeff_B(3, 2, BigRational(-1)) == 0);  // parity
  for (unsigned M : {1u, 4u, 9u})
    CHECK(coeff_B(M, 0, BigRational(0)) == 1);

  for (const auto& beta : kBetas)
    for (unsigned M = 0; M <= 12; ++M) {
      auto oracle = coeff_B_by_solve(M, beta);
      for (unsigned n = 0; n <= M; ++n) CHECK(coeff_B(M, n, beta) == oracle[n]);
      CHECK(coeff_B(M, M + 1, beta) == 0);
    }
}

TEST_CASE("coeff_A: mixing and the defining identity") {
  // rbar_l = 0 reduces to coeff_B
  for (unsigned n = 0; n <= 5; ++n)
    CHECK(coeff_A(5, n, BigRational(0), BigRational(0)) == coeff_B(5, n, BigRational(-1)));

  // stated example M = 2, rbar_d = 0, rbar_l = 1
  CHECK(coeff_A(2, 0, BigRational(0), BigRational(1)) == make_rational(1, 2));
  CHECK(coeff_A(2, 1, BigRational(0), BigRational(1)) == make_rational(1, 2));
  CHECK(coeff_A(2, 2, BigRational(0), BigRational(1)) == make_rational(1, 4));

  // defining identity: sum_n A^{M,n} P~_n((x - l/2)/(1 - l/2)) = x^M, M <= 10
  for (const BigRational& rd : {BigRational(0), BigRational(2)})
    for (const BigRational& rl : {BigRational(0), make_rational(1, 2), BigRational(1)}) {
      const BigRational beta = rd - 1;
      const BigRational shift = rl / 2, scale = 1 - rl / 2;
      for (unsigned M = 0; M <= 10; ++M) {
        RationalPolynomial acc;
        for (unsigned n = 0; n <= M; ++n) {
          const BigRational a = coeff_A(M, n, rd, rl);
          if (sgn(a) == 0) continue;
          acc += a * sj_polynomial(beta, n).compose_affine(-shift / scale, 1 / scale);
        }
        CHECK(acc == RationalPolynomial::monomial(M));
      }
    }
}

TEST_CASE("eigencheck residual vanishes") {
  // annihilation only
  CHECK(eigencheck(BigRational(0), BigRational(1), BigRational(0), 2).is_zero());
  // n = 0 trivially
  CHECK(eigencheck(BigRational(2), make_rational(1, 3), make_rational(1, 2), 0).is_zero());
  // mixed systems across n and rational rates
  CHECK(eigencheck(BigRational(1), BigRational(0), BigRational(1), 3).is_zero());
  for (int n = 0; n <= 10; ++n) {
    CHECK(eigencheck(make_rational(3, 2), make_rational(1, 40), make_rational(1, 10), n).is_zero());
    CHECK(eigencheck(BigRational(0), make_rational(1, 40), BigRational(0), n).is_zero());
  }
  CHECK_THROWS_AS(eigencheck(BigRational(1), BigRational(0), BigRational(0), 2),
                  std::invalid_argument);
}

TEST_CASE("solve_binary: small closed forms") {
  // annihilation 2A -> 0 at rate 1 from |2>: P = 1 + e^{-2t}(x^2 - 1)
  {
    auto p = solve_binary(BigRational(0), BigRational(1), BigRational(0), 2, 0.4);
    const double w = std::exp(-0.8);
    CHECK(p[0] == doctest::Approx(1.0 - w).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.0));
    CHECK(p[2] == doctest::Approx(w).epsilon(1e-12));
  }
  // catalytic decay 2A -> A at rate 1 from |2>: P = x + e^{-2t}(x^2 - x)
  {
    auto p = solve_binary(BigRational(0), BigRational(0), BigRational(1), 2, 0.4);
    const double w = std::exp(-0.8);
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(1.0 - w).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(w).epsilon(1e-12));
  }
  // t = 0 gives |M> exactly
  {
    auto p = solve_binary(make_rational(1, 2), make_rational(1, 40), make_rational(1, 10), 7, 0.0);
    for (int d = 0; d <= 7; ++d) CHECK(p[d] == doctest::Approx(d == 7 ? 1.0 : 0.0).epsilon(1e-20));
  }
  // pure decay: Bern(e^{-r_d t})^M
  {
    auto p = solve_binary(BigRational(2), BigRational(0), BigRational(0), 3, 0.5);
    const double q = std::exp(-1.0);
    for (int k = 0; k <= 3; ++k) {
      double expect = to_double(BigRational(binomial(3, k))) * std::pow(q, k) *
                      std::pow(1 - q, 3 - k);
      CHECK(p[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("solve_binary vs master equation, mixed rates with decay") {
  ReactionSystem sys = parse_dsl("1 A -> 0 A @ 1/2\n2 A -> 0 A @ 1/40\n2 A -> 1 A @ 1/10");
  const unsigned M = 25;
  sys.initial[{static_cast<int>(M)}] = 1.0;
  BinarySolution sol = prepare_binary(make_rational(1, 2), make_rational(1, 40),
                                      make_rational(1, 10), M);
  for (double t : {0.3, 1.5, 6.0}) {
    auto p = sol.eval(t);
    auto snaps = integrate_master(sys, {t}, {static_cast<int>(M)}, 2e-4);
    double sup = 0.0, norm = 0.0;
    for (unsigned d = 0; d <= M; ++d) {
      auto it = snaps[0].probs.find({static_cast<int>(d)});
      const double oracle = it == snaps[0].probs.end() ? 0.0 : it->second;
      sup = std::max(sup, std::abs(p[d] - oracle));
      norm += p[d];
    }
    CHECK(sup < 1e-7);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("prepared solution reconstructs x^M at t = 0, exactly") {
  BinarySolution sol = prepare_binary(make_rational(1, 2), make_rational(1, 40),
                                      make_rational(1, 10), 30);
  REQUIRE(sol.A_coeffs.size() == 31);
  RationalPolynomial sum;
  for (const auto& term : sol.terms) sum += term;
  CHECK(sum == RationalPolynomial::monomial(30));
}

TEST_CASE("eigenrate monotonicity for n >= 1") {
  BinarySolution sol = prepare_binary(BigRational(3), make_rational(1, 4), make_rational(1, 8), 12);
  for (size_t n = 2; n < sol.eigenrates.size(); ++n)
    CHECK(sol.eigenrates[n] > sol.eigenrates[n - 1]);
}
