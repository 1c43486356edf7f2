#include <doctest.h>

#include "formalgrade/block_nfa.hpp"
#include "formalgrade/nfa.hpp"
#include "formalgrade/regex.hpp"
#include "oracles.hpp"

using namespace formalgrade;

TEST_CASE("regex parsing follows precedence") {
  const Alphabet ab{'a', 'b'};
  CHECK(to_tree_string(parse_regex("a*b", ab)) == "Concat(Star(Lit a), Lit b)");
  CHECK(parse_regex("eps").kind() == Regex::Kind::Epsilon);
  CHECK(parse_regex("empty").kind() == Regex::Kind::Empty);

  // hand parse of (a|b)*abb
  const Regex ab_star = Regex::star(Regex::alt(Regex::literal('a'), Regex::literal('b')));
  const Regex expected =
      Regex::concat(Regex::concat(Regex::concat(ab_star, Regex::literal('a')), Regex::literal('b')), Regex::literal('b'));
  CHECK(parse_regex("(a|b)*abb", ab) == expected);
  CHECK(parse_regex(" ( a | b ) * a b b ", ab) == expected);
  CHECK(parse_regex("a|b|a") == Regex::alt(Regex::alt(Regex::literal('a'), Regex::literal('b')), Regex::literal('a')));
  CHECK(parse_regex("a**") == Regex::star(Regex::star(Regex::literal('a'))));
}

TEST_CASE("regex syntax errors carry a column") {
  auto column_of = [](const char* text) {
    try {
      parse_regex(text);
    } catch (const SyntaxError& e) {
      return e.column();
    }
    return std::size_t{0};
  };
  CHECK(column_of("a**)") == 4);
  CHECK(column_of("(a|b") == 5);
  CHECK(column_of("|a") == 1);
  CHECK(column_of("") == 1);
  CHECK(column_of("a|*") == 3);
  CHECK_THROWS_AS(parse_regex("abc", Alphabet{'a', 'b'}), AlphabetError);
}

TEST_CASE("printing then parsing is the identity") {
  const auto by_size = oracle::regexes_by_size(6, "ab");
  for (const auto& level : by_size)
    for (const Regex& r : level) {
      const std::string text = r.print();
      INFO(to_tree_string(r), " printed as ", text);
      CHECK(parse_regex(text) == r);
    }
  // keyword collisions
  const Regex e_eps = Regex::concat(Regex::literal('e'), Regex::concat(Regex::literal('p'), Regex::literal('s')));
  CHECK(parse_regex(e_eps.print()) == e_eps);
  const Regex tricky = Regex::concat(Regex::concat(Regex::literal('e'), Regex::epsilon()), Regex::literal('s'));
  CHECK(parse_regex(tricky.print()) == tricky);
}

TEST_CASE("thompson construction") {
  const Nfa eps = thompson(Regex::epsilon());
  CHECK(eps.state_count() == 2);
  CHECK(eps.transitions().size() == 1);
  CHECK(nfa_accepts(eps, ""));

  const Nfa a = thompson(Regex::literal('a'));
  CHECK(a.state_count() == 2);
  CHECK(nfa_accepts(a, "a"));
  CHECK_FALSE(nfa_accepts(a, ""));
  CHECK_FALSE(nfa_accepts(a, "aa"));

  const Nfa astar = thompson(parse_regex("a*"), Alphabet{'a', 'b'});
  for (const Word& w : oracle::all_words("ab", 6)) CHECK(nfa_accepts(astar, w) == (w.find('b') == Word::npos));

  const Nfa atb = thompson(parse_regex("a*b"));
  CHECK(nfa_accepts(atb, "b"));
  CHECK_FALSE(nfa_accepts(atb, ""));
  CHECK(nfa_accepts(thompson(parse_regex("(a|b)*abb")), "aabb"));
  CHECK_THROWS_AS(nfa_accepts(atb, "c"), AlphabetError);
  CHECK(atb.accepting().size() == 1);
}

TEST_CASE("thompson agrees with the recursive matcher on small regexes") {
  const auto by_size = oracle::regexes_by_size(6, "ab");
  const auto words = oracle::all_words("ab", 5);
  std::size_t mismatches = 0;
  for (const auto& level : by_size)
    for (const Regex& r : level) {
      const Nfa n = thompson(r, Alphabet{'a', 'b'});
      for (const Word& w : words) mismatches += nfa_accepts(n, w) != oracle::regex_matches(r, w);
    }
  CHECK(mismatches == 0);
}

TEST_CASE("regular equivalence") {
  CHECK(regular_equiv(parse_regex("a|b"), parse_regex("b|a")).equal);
  const EquivResult r = regular_equiv(parse_regex("a*"), parse_regex("aa*"));
  CHECK_FALSE(r.equal);
  REQUIRE(r.counterexample);
  CHECK(*r.counterexample == "");
  CHECK(r.in_left);
  CHECK_FALSE(r.in_right);
  CHECK(regular_equiv(parse_regex("(ab)*a"), parse_regex("a(ba)*")).equal);

  // shortest, then lexicographically least
  const EquivResult s = regular_equiv(parse_regex("(a|b)*abb"), parse_regex("(a|b)*ab"));
  REQUIRE(s.counterexample);
  CHECK(*s.counterexample == "ab");

  // alphabets are merged
  const EquivResult t = regular_equiv(parse_regex("a*"), parse_regex("a*|b"));
  REQUIRE(t.counterexample);
  CHECK(*t.counterexample == "b");
}

TEST_CASE("equivalence is reflexive, symmetric, and its counterexamples are genuine") {
  const auto by_size = oracle::regexes_by_size(4, "ab");
  std::vector<Regex> pool;
  for (const auto& level : by_size) pool.insert(pool.end(), level.begin(), level.end());
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const Regex& x = pool[rng() % pool.size()];
    const Regex& y = pool[rng() % pool.size()];
    CHECK(regular_equiv(x, x).equal);
    const EquivResult xy = regular_equiv(x, y), yx = regular_equiv(y, x);
    CHECK(xy.equal == yx.equal);
    CHECK(xy.counterexample == yx.counterexample);
    if (!xy.equal) {
      const Word& w = *xy.counterexample;
      CHECK(oracle::regex_matches(x, w) != oracle::regex_matches(y, w));
      CHECK(oracle::regex_matches(x, w) == xy.in_left);
      // nothing shorter or smaller distinguishes them
      for (const Word& u : oracle::all_words("ab", w.size()))
        if (ShortLex{}(u, w)) CHECK(oracle::regex_matches(x, u) == oracle::regex_matches(y, u));
    } else {
      for (const Word& u : oracle::all_words("ab", 5)) CHECK(oracle::regex_matches(x, u) == oracle::regex_matches(y, u));
    }
  }
}

TEST_CASE("residual languages") {
  const Regex atb = parse_regex("a*b");
  CHECK(regular_equiv(residual(atb, ""), atb).equal);
  const Nfa after_b = residual(atb, "b");
  for (const Word& x : oracle::all_words("ab", 6)) CHECK(nfa_accepts(after_b, x) == x.empty());
  const Nfa after_ba = residual(atb, "ba");
  for (const Word& x : oracle::all_words("ab", 6)) CHECK_FALSE(nfa_accepts(after_ba, x));

  const auto by_size = oracle::regexes_by_size(4, "ab");
  const auto short_words = oracle::all_words("ab", 4);
  for (const auto& level : by_size)
    for (std::size_t k = 0; k < level.size(); k += 7) {
      const Regex& r = level[k];
      const Nfa whole = thompson(r, Alphabet{'a', 'b'});
      for (const Word& w : short_words) {
        const Nfa res = residual(whole, w);
        for (const Word& x : short_words) CHECK(nfa_accepts(res, x) == nfa_accepts(whole, w + x));
      }
    }
}

TEST_CASE("block labels must be subexpressions") {
  const Regex goal = parse_regex("(a|b)*abb");
  CHECK_NOTHROW(validate_block_label(goal, parse_regex("a|b")));
  CHECK_NOTHROW(validate_block_label(goal, parse_regex("(a|b)*")));
  CHECK_THROWS_AS(validate_block_label(goal, parse_regex("ba")), InvalidBlockLabel);
  try {
    validate_block_label(goal, parse_regex("ba"));
  } catch (const Error& e) {
    CHECK(e.code() == "not-a-subexpression");
  }
}

TEST_CASE("flattening a block drawing") {
  // (a|b)*: outer star drawn by hand around one block for a|b, which is
  // itself expanded into two literal edges.
  auto inner = std::make_shared<BlockNfa>();
  inner->state_count = 4;
  inner->transitions = {{0, std::nullopt, 1}, {1, 'a', 2}, {0, 'b', 3}, {2, std::nullopt, 3}};
  inner->initial = 0;
  inner->accepting = {3};

  BlockNfa outer;
  outer.state_count = 4;
  outer.initial = 0;
  outer.accepting = {3};
  outer.transitions = {{0, std::nullopt, 1}, {2, std::nullopt, 1}, {2, std::nullopt, 3}, {0, std::nullopt, 3}};
  outer.blocks.push_back({parse_regex("a|b"), 1, 2, inner});

  const Alphabet ab{'a', 'b'};
  CHECK(regular_equiv(flatten(outer, ab), parse_regex("(a|b)*")).equal);
  CHECK(regular_equiv(expand_block(outer.blocks[0], ab), parse_regex("a|b")).equal);
  CHECK(all_blocks(outer).size() == 1);

  BlockNfa unexpanded = outer;
  unexpanded.blocks[0].contents = nullptr;
  CHECK(regular_equiv(flatten(unexpanded, ab), parse_regex("eps")).equal);
}
