#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "cme/master_equation.hpp"
#include "cme/reaction.hpp"

using namespace cme;

namespace {

std::map<std::pair<long, long>, double> triplet_map(const GeneratorMatrix& g) {
  std::map<std::pair<long, long>, double> m;
  for (const auto& t : g.triplets) m[{t.row, t.col}] += t.rate;
  return m;
}

}  // namespace

TEST_CASE("generator entries for decay") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4");
  s.initial[{2}] = 1.0;
  GeneratorMatrix g = build_generator(s, {2});
  auto m = triplet_map(g);
  CHECK(m[{0, 1}] == doctest::Approx(4.0));
  CHECK(m[{1, 1}] == doctest::Approx(-4.0));
  CHECK(m[{1, 2}] == doctest::Approx(8.0));
  CHECK(m[{2, 2}] == doctest::Approx(-8.0));
  CHECK(m.count({0, 0}) == 0);
  // conservative system: columns sum to zero inside the box
  for (long col = 0; col <= 2; ++col) {
    double sum = 0.0;
    for (const auto& [rc, v] : m)
      if (rc.second == col) sum += v;
    CHECK(sum == doctest::Approx(0.0));
  }
}

TEST_CASE("generator entries for birth") {
  ReactionSystem s = parse_dsl("0 A -> 1 A @ 3");
  s.initial[{0}] = 1.0;
  GeneratorMatrix g = build_generator(s, {4});
  auto m = triplet_map(g);
  for (long n = 0; n < 4; ++n) {
    CHECK(m[{n + 1, n}] == doctest::Approx(3.0));
    CHECK(m[{n, n}] == doctest::Approx(-3.0));
  }
  // top column leaks: loss with no in-box gain
  CHECK(m[{4, 4}] == doctest::Approx(-3.0));
}

TEST_CASE("zero-reaction system gives the zero matrix") {
  ReactionSystem s;
  s.species = {"A"};
  s.reactions = {};
  s.initial[{1}] = 1.0;
  GeneratorMatrix g = build_generator(s, {3});
  CHECK(g.triplets.empty());
}

TEST_CASE("decay from |1>: p1(t) = e^{-4t}") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4");
  s.initial[{1}] = 1.0;
  auto snaps = integrate_master(s, {0.5}, {1}, 1e-4);
  CHECK(snaps[0].probs.at({1}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
  CHECK(snaps[0].probs.at({0}) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("t_final = 0 returns the initial distribution") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4");
  s.initial[{3}] = 0.25;
  s.initial[{1}] = 0.75;
  auto snaps = integrate_master(s, {0.0}, {5}, 1e-3);
  CHECK(snaps[0].probs.at({3}) == doctest::Approx(0.25));
  CHECK(snaps[0].probs.at({1}) == doctest::Approx(0.75));
  CHECK(snaps[0].leak == doctest::Approx(0.0));
}

TEST_CASE("pair annihilation from |2>: two-state solution") {
  ReactionSystem s = parse_dsl("2 A -> 0 A @ 1");
  s.initial[{2}] = 1.0;
  // propensity (2)_2 * 1 = 2
  auto snaps = integrate_master(s, {0.3, 1.0}, {2}, 1e-4);
  for (size_t i = 0; i < snaps.size(); ++i) {
    const double t = snaps[i].time;
    CHECK(snaps[i].probs.at({2}) == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-8));
    CHECK(snaps[i].probs.at({0}) == doctest::Approx(1.0 - std::exp(-2.0 * t)).epsilon(1e-8));
  }
}

TEST_CASE("multi-species: A -> B keeps the total and matches the two-state law") {
  ReactionSystem s = parse_dsl("A -> B @ 2");
  s.initial[{2, 0}] = 1.0;
  auto snaps = integrate_master(s, {0.25}, {2, 2}, 1e-4);
  const double q = std::exp(-2.0 * 0.25);  // per-particle survival
  CHECK(snaps[0].probs.at({2, 0}) == doctest::Approx(q * q).epsilon(1e-8));
  CHECK(snaps[0].probs.at({1, 1}) == doctest::Approx(2 * q * (1 - q)).epsilon(1e-8));
  CHECK(snaps[0].probs.at({0, 2}) == doctest::Approx((1 - q) * (1 - q)).epsilon(1e-8));
}

TEST_CASE("probability conservation and nonnegativity") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4\n2 A -> 1 A @ 1/10");
  s.initial[{30}] = 1.0;
  auto snaps = integrate_master(s, {0.1, 0.5, 1.0}, {30}, 2e-4);
  for (const auto& snap : snaps) {
    double sum = 0.0;
    for (const auto& [n, p] : snap.probs) {
      CHECK(p >= -1e-10);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("creating system: sizing rule keeps the leak under 1e-6") {
  ReactionSystem s = parse_dsl("0 A -> 1 A @ 50");
  s.initial[{100}] = 1.0;
  auto n_max = default_truncation(s, 0.1);
  REQUIRE(n_max[0] > 100);
  auto snaps = integrate_master(s, {0.1}, n_max, default_dt(s, n_max));
  CHECK(std::abs(snaps[0].leak) < 1e-6);
}

TEST_CASE("halving dt changes probabilities by < 1e-8") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4\n0 A -> 1 A @ 3");
  s.initial[{10}] = 1.0;
  auto a = integrate_master(s, {0.2}, {40}, 5e-4);
  auto b = integrate_master(s, {0.2}, {40}, 2.5e-4);
  double worst = 0.0;
  for (const auto& [n, p] : a[0].probs)
    worst = std::max(worst, std::abs(p - b[0].probs.at(n)));
  CHECK(worst < 1e-8);
}

TEST_CASE("guards") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 4");
  s.initial[{10}] = 1.0;
  // dt * max|diag| = 0.02 * 40 = 0.8 > 0.1
  CHECK_THROWS_AS(integrate_master(s, {0.1}, {10}, 0.02), NumericGuardError);
  // initial support outside the box
  CHECK_THROWS_AS(integrate_master(s, {0.1}, {5}, 1e-3), std::invalid_argument);
}
