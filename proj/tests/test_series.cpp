#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cme/combinatorics.hpp"
#include "cme/semilinear.hpp"
#include "cme/series.hpp"

using namespace cme;

namespace {

double factd(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomd(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= (a - i) / (i + 1);
  return r;
}

SeriesQ random_rational_series(std::mt19937_64& rng, int max_deg) {
  SeriesQ s(1, max_deg);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  for (int d = 0; d <= max_deg; ++d)
    s.set(MultiIndex{d, 0, 0}, make_rational(num(rng), den(rng)));
  return s;
}

// log of a series with positive constant term, via l' = s'/s (test oracle).
SeriesD log_series(const SeriesD& s) {
  const int n = s.max_deg();
  SeriesD l(1, n);
  l.raw()[0] = std::log(s.coeff1(0));
  for (int k = 1; k <= n; ++k) {
    double acc = k * s.coeff1(k);
    for (int j = 1; j < k; ++j) acc -= j * l.raw()[j] * s.coeff1(k - j);
    l.raw()[k] = acc / (k * s.coeff1(0));
  }
  return l;
}

}  // namespace

TEST_CASE("product basics") {
  SeriesQ a(1, 2), b(1, 2);
  a.set({0, 0, 0}, 1);
  a.set({1, 0, 0}, 1);  // 1 + x
  b.set({0, 0, 0}, 1);
  b.set({1, 0, 0}, -1);  // 1 - x
  SeriesQ p = a * b;
  CHECK(p.coeff1(0) == 1);
  CHECK(p.coeff1(1) == 0);
  CHECK(p.coeff1(2) == -1);

  SeriesQ one = SeriesQ::constant(1, 2, 1);
  CHECK((a * one).raw() == a.raw());
}

TEST_CASE("Poisson convolution: Pois(1) * Pois(2) = Pois(3)") {
  const int n = 12;
  SeriesD p = pgf_pois(1.0, 1, n) * pgf_pois(2.0, 1, n);
  SeriesD q = pgf_pois(3.0, 1, n);
  for (int d = 0; d <= n; ++d)
    CHECK(p.coeff1(d) == doctest::Approx(q.coeff1(d)).epsilon(1e-13));
}

TEST_CASE("compose: polynomial outer") {
  const double pr = 0.3;
  SeriesD bern = pgf_bern(pr, 1, 4);
  // x^2 at Bern
  SeriesD sq = compose_poly<double>({0.0, 0.0, 1.0}, bern);
  CHECK(sq.coeff1(0) == doctest::Approx((1 - pr) * (1 - pr)));
  CHECK(sq.coeff1(1) == doctest::Approx(2 * pr * (1 - pr)));
  CHECK(sq.coeff1(2) == doctest::Approx(pr * pr));

  // constant outer
  SeriesD one = compose_poly<double>({1.0}, bern);
  CHECK(one.coeff1(0) == doctest::Approx(1.0));
  CHECK(one.coeff1(1) == 0.0);

  // x^M at Bern(e^{-tau t}) reproduces the decay distribution
  const int m = 3;
  const double q = std::exp(-0.5);
  std::vector<double> outer(m + 1, 0.0);
  outer[m] = 1.0;
  SeriesD dec = compose_poly(outer, pgf_bern(q, 1, 6));
  for (int k = 0; k <= m; ++k)
    CHECK(dec.coeff1(k) ==
          doctest::Approx(binomd(m, k) * std::pow(q, k) * std::pow(1 - q, m - k)));
}

TEST_CASE("pow_real") {
  const int n = 8;
  const double p = 0.5, mu = 1.5;
  SeriesD g = pgf_geom2(p, n);
  SeriesD w = pow_real(g, mu);
  for (int k = 0; k <= n; ++k)
    CHECK(w.coeff1(k) ==
          doctest::Approx(std::pow(p, mu) * binomd(k + mu - 1, k) * std::pow(1 - p, k))
              .epsilon(1e-12));

  // cross-check against exp(mu log s)
  SeriesD w2 = exp_series(log_series(g) * mu);
  for (int k = 0; k <= n; ++k) CHECK(w.coeff1(k) == doctest::Approx(w2.coeff1(k)).epsilon(1e-12));

  SeriesD w0 = pow_real(g, 0.0);
  CHECK(w0.coeff1(0) == 1.0);
  CHECK(w0.coeff1(3) == 0.0);

  // (Geom2(1/2))^2 coefficient of x: direct square gives 2 * (1/2)^2 * (1/2) = 1/4
  SeriesD sq = pow_real(g, 2.0);
  CHECK(sq.coeff1(1) == doctest::Approx(0.25));
  SeriesD direct = g * g;
  for (int k = 0; k <= n; ++k) CHECK(sq.coeff1(k) == doctest::Approx(direct.coeff1(k)));

  CHECK_THROWS(pow_real(SeriesD::variable(1, 4, 0), 0.5));
}

TEST_CASE("exp") {
  SeriesD z = exp_poly({}, 5);
  CHECK(z.coeff1(0) == doctest::Approx(1.0));
  CHECK(z.eval_at_one() == doctest::Approx(1.0));

  const double mu = 2.0;
  SeriesD p = exp_poly({-mu, mu}, 10);
  for (int k = 0; k <= 10; ++k)
    CHECK(p.coeff1(k) == doctest::Approx(std::exp(-mu) * std::pow(mu, k) / factd(k)));

  // even argument gives even series
  SeriesD e = exp_poly({-1.5, 0.0, 1.5}, 11);
  for (int k = 1; k <= 11; k += 2) CHECK(e.coeff1(k) == 0.0);

  // multivariate: exp(a t (x0 x1 - 1)) matches the aerated bivariate Poisson
  SeriesD arg(2, 8);
  arg.set({0, 0, 0}, -0.7);
  arg.set({1, 1, 0}, 0.7);
  SeriesD biv = exp_series(arg);
  for (int k = 0; 2 * k <= 8; ++k)
    CHECK(biv.coeff({k, k, 0}) == doctest::Approx(std::exp(-0.7) * std::pow(0.7, k) / factd(k)));
  CHECK(biv.coeff({1, 0, 0}) == 0.0);
}

TEST_CASE("eval_at_one, coefficient, derivative") {
  CHECK(pgf_bern(0.3, 1, 5).eval_at_one() == doctest::Approx(1.0));
  CHECK(pgf_pois(2.0, 1, 40).eval_at_one() == doctest::Approx(1.0).epsilon(1e-9));

  SeriesD p = pgf_pois(2.0, 1, 10);
  CHECK(p.coeff1(3) == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0));
  CHECK_THROWS_AS((void)p.coeff(MultiIndex{11, 0, 0}), std::out_of_range);

  SeriesQ cube = SeriesQ::monomial(1, 5, {3, 0, 0}, 1);
  SeriesQ d = cube.derivative(0);
  CHECK(d.coeff1(2) == 3);
  CHECK(d.coeff1(3) == 0);
}

TEST_CASE("multivariate product and degree bookkeeping") {
  SeriesQ a(3, 4), b(3, 4);
  a.set({1, 0, 0}, 2);
  a.set({0, 1, 1}, 1);
  b.set({1, 1, 0}, 3);
  b.set({0, 0, 2}, make_rational(1, 2));
  SeriesQ p = a * b;
  CHECK(p.coeff({2, 1, 0}) == 6);
  CHECK(p.coeff({1, 0, 2}) == 1);
  CHECK(p.coeff({1, 2, 1}) == 3);
  CHECK(p.coeff({0, 1, 3}) == make_rational(1, 2));
}

TEST_CASE("mul is commutative and associative (exact)") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 10; ++trial) {
    SeriesQ a = random_rational_series(rng, 9);
    SeriesQ b = random_rational_series(rng, 9);
    SeriesQ c = random_rational_series(rng, 9);
    CHECK((a * b).raw() == (b * a).raw());
    CHECK(((a * b) * c).raw() == (a * (b * c)).raw());
  }
}

TEST_CASE("truncation consistency: wider truncation agrees on low degrees") {
  // exact: random rational products
  std::mt19937_64 rng(99);
  SeriesQ a10 = random_rational_series(rng, 10);
  SeriesQ b10 = random_rational_series(rng, 10);
  SeriesQ a20(1, 20), b20(1, 20);
  for (int d = 0; d <= 10; ++d) {
    a20.set({d, 0, 0}, a10.coeff1(d));
    b20.set({d, 0, 0}, b10.coeff1(d));
  }
  SeriesQ p10 = a10 * b10, p20 = a20 * b20;
  for (int d = 0; d <= 10; ++d) CHECK(p10.coeff1(d) == p20.coeff1(d));

  // float: a full solver pipeline at N and N+10
  std::map<int, double> p0{{40, 1.0}};
  SeriesD lo = composite_one_species(0.25, 0.4, 0.2, 0.3, 1.5, p0, 90);
  SeriesD hi = composite_one_species(0.25, 0.4, 0.2, 0.3, 1.5, p0, 100);
  for (int d = 0; d <= 90; ++d) {
    const double ref = std::max(1.0, std::abs(hi.coeff1(d)));
    CHECK(std::abs(lo.coeff1(d) - hi.coeff1(d)) / ref < 1e-13);
  }
}

TEST_CASE("pgf factories are normalized") {
  CHECK(pgf_geom(0.4, 1, 400, 0).eval_at_one() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pgf_geom2(0.4, 400).eval_at_one() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pgf_a2pois(3.0, 1, 80, 0).eval_at_one() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pgf_bern(1.0, 1, 3).coeff1(1) == 1.0);
}

TEST_CASE("shape mismatches are rejected") {
  SeriesQ a(1, 4), b(1, 5);
  CHECK_THROWS_AS((void)(a * b), std::invalid_argument);
  SeriesQ c(2, 4);
  CHECK_THROWS_AS((void)(a + c), std::invalid_argument);
}
