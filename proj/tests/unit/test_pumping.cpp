#include <doctest.h>

#include "formalgrade/pumping.hpp"
#include "game_oracle.hpp"

using namespace formalgrade;

namespace {

GameMove claim(Claim c) {
  GameMove m;
  m.kind = GameMove::Kind::Claim;
  m.claim = c;
  return m;
}
GameMove bound(int n) {
  GameMove m;
  m.kind = GameMove::Kind::Bound;
  m.n = n;
  return m;
}
GameMove word(Word w) {
  GameMove m;
  m.kind = GameMove::Kind::Word;
  m.word = std::move(w);
  return m;
}
GameMove split(std::size_t x, std::size_t y) {
  GameMove m;
  m.kind = GameMove::Kind::Split;
  m.split = {x, y};
  return m;
}
GameMove pump_move(int i) {
  GameMove m;
  m.kind = GameMove::Kind::Pump;
  m.i = i;
  return m;
}

PumpingPayload less_than() {
  return {parse_arith_lang("a^i b^j | i < j"), false, parse_word_template("a^n b^(n+1)")};
}

}  // namespace

TEST_CASE("arithmetic language syntax") {
  const ArithLang l = parse_arith_lang("a^i b^j | i < j, j <= 2i + 1");
  CHECK(l.blocks.size() == 2);
  CHECK(l.constraints.size() == 2);
  CHECK(l.variables() == "ij");
  CHECK(print_arith_lang(l) == "a^i b^j | i < j, j <= 2i + 1");
  CHECK(parse_arith_lang(print_arith_lang(l)) == l);
  CHECK(parse_arith_lang("a^ib^j|i<j") == parse_arith_lang("a^i b^j | i < j"));
  CHECK(parse_arith_lang("a^2 b^i").max_constant() == 2);
  CHECK(print_arith_lang(parse_arith_lang("a b^3 c^k | k - 2*k != -1")) == "a b^3 c^k | k - 2k != -1");
  CHECK_THROWS_AS(parse_arith_lang("a^i | j = 1"), InvalidDocument);
  CHECK_THROWS_AS(parse_arith_lang("a^i | i ~ 1"), SyntaxError);
  CHECK_THROWS_AS(parse_arith_lang(""), SyntaxError);

  const WordTemplate t = parse_word_template("a^n b^(n+1) c^(2n-1) d");
  CHECK(t.instantiate(3) == "aaabbbbcccccd");
  CHECK(print_word_template(t) == "a^n b^(n+1) c^(2n-1) d");
  CHECK(parse_word_template(print_word_template(t)) == t);
}

TEST_CASE("arithmetic membership") {
  const ArithLang lt = parse_arith_lang("a^i b^j | i < j");
  CHECK(arith_member(lt, "abb"));
  CHECK_FALSE(arith_member(lt, "ab"));
  CHECK(arith_member(parse_arith_lang("a^2 b^i | i = 2"), "aabb"));
  CHECK(arith_member(lt, "b"));
  CHECK_FALSE(arith_member(lt, "ba"));
  // equal adjacent symbols need a search over the boundary
  const ArithLang twice = parse_arith_lang("a^i a^j | i = 2j");
  CHECK(arith_member(twice, "aaa"));
  CHECK_FALSE(arith_member(twice, "aa"));
}

TEST_CASE("membership and enumeration agree with brute force") {
  for (const SampleLanguage& s : sample_languages()) {
    const ArithLang l = parse_arith_lang(s.language);
    const std::vector<Word> listed = arith_words(l, 0, 7);
    std::vector<Word> all{""}, frontier{""};
    for (int len = 1; len <= 7; ++len) {
      std::vector<Word> next;
      for (const Word& w : frontier)
        for (char c : l.alphabet().symbols()) next.push_back(w + c);
      frontier = next;
      all.insert(all.end(), next.begin(), next.end());
    }
    std::vector<Word> expected;
    for (const Word& w : all) {
      INFO(s.language, " on ", w);
      CHECK(arith_member(l, w) == oracle::arith_member_brute(l, w));
      if (oracle::arith_member_brute(l, w)) expected.push_back(w);
    }
    std::sort(expected.begin(), expected.end(), ShortLex{});
    CHECK(listed == expected);
  }
}

TEST_CASE("tutor defeats a regularity claim for a^i b^j with i < j") {
  const PumpingPayload p = less_than();
  const GameState s = replay_game(p, {claim(Claim::Regular), bound(3)});
  REQUIRE(s.w);
  CHECK(*s.w == "aaabbbb");
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = 1; x + y <= 3; ++y) {
      const GameState end = pumping_game_step(p, s, split(x, y));
      CHECK(end.winner == Winner::Tutor);
      REQUIRE(end.i);
      CHECK_FALSE(oracle::arith_member_brute(p.language, pump(*s.w, {x, y}, *end.i)));
    }
}

TEST_CASE("tutor defeats a non-regularity claim for a*") {
  const PumpingPayload p{parse_arith_lang("a^i"), true, std::nullopt};
  const GameState s = replay_game(p, {claim(Claim::NonRegular)});
  CHECK(s.n == 1);
  const GameState t = pumping_game_step(p, s, word("aaaaa"));
  CHECK(t.split == Split{0, 1});
  const GameState end = pumping_game_step(p, t, pump_move(7));
  CHECK(end.winner == Winner::Tutor);
  CHECK(pump("aaaaa", *t.split, 7) == std::string(11, 'a'));
  CHECK(end.transcript.back() == "tutor wins");
}

TEST_CASE("a correct non-regularity claim can be won") {
  const PumpingPayload p = less_than();
  const GameState s = replay_game(p, {claim(Claim::NonRegular)});
  const int n = *s.n;
  const Word w = std::string(static_cast<std::size_t>(n), 'a') + std::string(static_cast<std::size_t>(n) + 1, 'b');
  const GameState t = pumping_game_step(p, s, word(w));
  REQUIRE(t.split);
  CHECK(t.split->x + t.split->y <= static_cast<std::size_t>(n));
  // y lies in the a-block, so pumping up once breaks i < j
  const GameState end = pumping_game_step(p, t, pump_move(2));
  CHECK(end.winner == Winner::Student);
}

TEST_CASE("illegal moves are rejected and leave the state alone") {
  const PumpingPayload p = less_than();
  const GameState start;
  CHECK_THROWS_AS(pumping_game_step(p, start, bound(3)), IllegalMove);
  const GameState s = replay_game(p, {claim(Claim::Regular)});
  CHECK_THROWS_AS(pumping_game_step(p, s, bound(0)), IllegalMove);
  CHECK_THROWS_AS(pumping_game_step(p, s, bound(kMaxBound + 1)), IllegalMove);
  const GameState t = pumping_game_step(p, s, bound(2));
  CHECK_THROWS_AS(pumping_game_step(p, t, split(0, 0)), IllegalMove);
  CHECK_THROWS_AS(pumping_game_step(p, t, split(1, 2)), IllegalMove);
  CHECK(t.phase == GamePhase::ChooseSplit);

  const GameState u = replay_game(p, {claim(Claim::NonRegular)});
  CHECK_THROWS_AS(pumping_game_step(p, u, word("ab")), IllegalMove);
  CHECK_THROWS_AS(pumping_game_step(p, u, word("b")), IllegalMove);
  CHECK_THROWS_AS(pumping_game_step(p, u, word("abc")), IllegalMove);

  const GameState over = pumping_game_step(p, t, split(0, 1));
  CHECK_THROWS_AS(pumping_game_step(p, over, pump_move(1)), IllegalMove);
}

TEST_CASE("the tutor wins every game against a wrong claim") {
  for (const SampleLanguage& s : sample_languages()) {
    INFO(s.language);
    const oracle::GameSweep r = oracle::sweep_wrong_claims(to_payload(s), 6, 10);
    CHECK(r.games > 0);
    CHECK(r.student_wins == 0);
    CHECK(r.oracle_disagreements == 0);
  }
}
