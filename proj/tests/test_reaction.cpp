#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cme/reaction.hpp"

using namespace cme;

TEST_CASE("parse single reactions") {
  ReactionSystem s = parse_dsl("2 A -> 0 A @ 0.025\n");
  REQUIRE(s.species == std::vector<std::string>{"A"});
  REQUIRE(s.reactions.size() == 1);
  CHECK(s.reactions[0].inputs == std::vector<int>{2});
  CHECK(s.reactions[0].outputs == std::vector<int>{0});
  CHECK(s.reactions[0].rate == make_rational(1, 40));

  ReactionSystem b = parse_dsl("0 A -> 1 A @ 50");
  CHECK(b.reactions[0].inputs == std::vector<int>{0});
  CHECK(b.reactions[0].outputs == std::vector<int>{1});
  CHECK(b.reactions[0].rate == 50);

  ReactionSystem m = parse_dsl("A + B -> C @ 1.0");
  CHECK(m.species == std::vector<std::string>{"A", "B", "C"});
  CHECK(m.reactions[0].inputs == std::vector<int>{1, 1, 0});
  CHECK(m.reactions[0].outputs == std::vector<int>{0, 0, 1});
  CHECK(m.reactions[0].rate == 1);
}

TEST_CASE("grammar variants") {
  // empty-set symbol, rational rates, coefficients glued to names
  ReactionSystem s = parse_dsl("\xE2\x88\x85 -> 2A @ 1/40\n2A -> \xE2\x88\x85 @ 3\n");
  CHECK(s.reactions[0].inputs == std::vector<int>{0});
  CHECK(s.reactions[0].outputs == std::vector<int>{2});
  CHECK(s.reactions[0].rate == make_rational(1, 40));
  CHECK(s.reactions[1].inputs == std::vector<int>{2});

  // comments and blank lines
  ReactionSystem c = parse_dsl("# decay\n\n1 A -> 0 A @ 4  # fast\n");
  CHECK(c.reactions.size() == 1);

  // repeated species on one side accumulate
  ReactionSystem r = parse_dsl("A + A -> 0 @ 2");
  CHECK(r.reactions[0].inputs == std::vector<int>{2});
}

TEST_CASE("parse errors carry position") {
  CHECK_THROWS_AS(parse_dsl("A -> B\n"), ParseError);        // missing rate
  CHECK_THROWS_AS(parse_dsl("A => B @ 1\n"), ParseError);    // bad arrow
  CHECK_THROWS_AS(parse_dsl("A -> B @ -1\n"), ParseError);   // negative rate
  CHECK_THROWS_AS(parse_dsl("0 -> 0 @ 1\n"), ParseError);    // empty reaction
  CHECK_THROWS_AS(parse_dsl("A -> B @ x\n"), ParseError);    // malformed rate
  try {
    parse_dsl("A -> B @ 1\nA -> @ 2\n");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("roundtrip over a grammar-covering corpus") {
  const std::vector<std::string> corpus = {
      "1 A -> 0 A @ 4",
      "0 A -> 1 A @ 50",
      "0 A -> 2 A @ 25",
      "1 A -> 2 A @ 1/2",
      "2 A -> 0 A @ 1/40",
      "2 A -> 1 A @ 1/10",
      "A -> B @ 1",
      "A + B -> C @ 0.5",
      "A -> A + B @ 2/3",
      "A -> B + C @ 0.125",
      "0 -> A + B @ 7",
      "2 B -> A @ 1",
      "A + A -> B @ 1/7",
      "B -> 0 @ 9",
      "0 A -> 1 A @ 50\n1 A -> 0 A @ 4",
      "0 A -> 2 A @ 1/3\n1 A -> 0 A @ 1/3\n1 A -> 2 A @ 1/3",
      "0 A -> 1 A @ 1/5\n0 A -> 2 A @ 3/5\n1 A -> 0 A @ 1/5",
      "A -> 2 A @ 0.1\nA -> 0 @ 0.3\n0 -> A @ 0.4\n0 -> 2 A @ 0.2",
      "X1 -> X2 @ 1\nX2 -> X3 @ 2\nX3 -> X1 @ 3",
      "2 A -> 0 A @ 1/40\n2 A -> 1 A @ 1/10\n1 A -> 0 A @ 2",
  };
  for (const auto& text : corpus) {
    ReactionSystem a = parse_dsl(text);
    ReactionSystem b = parse_dsl(to_dsl(a));
    CHECK(a.species == b.species);
    REQUIRE(a.reactions.size() == b.reactions.size());
    for (size_t i = 0; i < a.reactions.size(); ++i) {
      CHECK(a.reactions[i].inputs == b.reactions[i].inputs);
      CHECK(a.reactions[i].outputs == b.reactions[i].outputs);
      CHECK(a.reactions[i].rate == b.reactions[i].rate);
    }
  }
}

TEST_CASE("classification") {
  CHECK(classify(parse_dsl("1 A -> 0 A @ 1\n0 A -> 2 A @ 1\n1 A -> 2 A @ 1")) ==
        SystemClass::NonBinary);
  CHECK(classify(parse_dsl("1 A -> 0 A @ 1\n2 A -> 0 A @ 1\n2 A -> 1 A @ 1")) ==
        SystemClass::BinarySJ);
  CHECK(classify(parse_dsl("2 A -> 0 A @ 1\n0 A -> 1 A @ 1")) == SystemClass::Generic);
  CHECK(classify(parse_dsl("A -> B @ 1\n0 -> C @ 2")) == SystemClass::SemiLinearMulti);
  CHECK(classify(parse_dsl("A + B -> C @ 1")) == SystemClass::Generic);
}

TEST_CASE("classify invariant under reordering and renaming") {
  const std::string text = "1 A -> 0 A @ 1\n2 A -> 0 A @ 2\n2 A -> 1 A @ 3";
  ReactionSystem base = parse_dsl(text);
  const SystemClass expect = classify(base);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ReactionSystem shuffled = base;
    std::shuffle(shuffled.reactions.begin(), shuffled.reactions.end(), rng);
    shuffled.species[0] = "Species_" + std::to_string(trial);
    CHECK(classify(shuffled) == expect);
  }
}

TEST_CASE("validation") {
  ReactionSystem s = parse_dsl("1 A -> 0 A @ 1");
  s.initial[{3}] = 0.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // does not sum to 1
  s.initial[{0}] = 0.5;
  CHECK_NOTHROW(s.validate());
  s.initial.clear();
  s.initial[{-1}] = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("json roundtrip") {
  ReactionSystem s = parse_dsl("2 A -> 0 A @ 0.025\nA -> B @ 1/3");
  s.initial[{100, 0}] = 1.0;
  ReactionSystem r = system_from_json(system_to_json(s));
  CHECK(r.species == s.species);
  REQUIRE(r.reactions.size() == s.reactions.size());
  for (size_t i = 0; i < s.reactions.size(); ++i) {
    CHECK(r.reactions[i].inputs == s.reactions[i].inputs);
    CHECK(r.reactions[i].outputs == s.reactions[i].outputs);
    CHECK(r.reactions[i].rate == s.reactions[i].rate);
  }
  CHECK(r.initial == s.initial);

  const char* doc = R"({"species":["A"],
    "reactions":[{"in":{"A":2},"out":{},"rate":0.025}],
    "initial":{"100":1.0}})";
  ReactionSystem j = system_from_json(doc);
  CHECK(j.reactions[0].rate == make_rational(1, 40));
  CHECK(j.initial.at({100}) == 1.0);
}
