#include <doctest.h>

#include "formalgrade/cfg.hpp"
#include "oracles.hpp"

using namespace formalgrade;

namespace {

std::vector<Word> members_up_to(const Cfg& g, const Alphabet& sigma, std::size_t max_len) {
  std::vector<Word> out;
  for (const Word& w : oracle::all_words(sigma.symbols(), max_len))
    if (oracle::cfg_member(g, w)) out.push_back(w);
  std::sort(out.begin(), out.end(), ShortLex{});
  return out;
}

std::vector<Word> as_vector(const WordSet& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("grammar text round trip") {
  const Cfg g = parse_cfg("S -> a S b | eps");
  CHECK(g.start() == 'S');
  REQUIRE(g.productions().size() == 2);
  CHECK(g.productions()[0] == Production{'S', "aSb"});
  CHECK(g.productions()[1] == Production{'S', ""});
  CHECK(parse_cfg(g.print()) == g);

  const Cfg h = parse_cfg("S -> A\nA -> a");
  CHECK(h.start() == 'S');
  CHECK(h.productions().size() == 2);

  const Cfg c = parse_cfg("# comment\nS -> aSb|ab\n\nS -> eps   # trailing");
  CHECK(c.productions().size() == 3);
}

TEST_CASE("grammar syntax errors") {
  try {
    parse_cfg("S -> ->");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.column() == 6);
  }
  CHECK_THROWS_AS(parse_cfg("s -> a"), SyntaxError);
  CHECK_THROWS_AS(parse_cfg("S a"), SyntaxError);
  CHECK_THROWS_AS(parse_cfg(""), SyntaxError);
}

TEST_CASE("duplicate productions are dropped with a warning") {
  std::vector<Diagnostic> warnings;
  const Cfg g = parse_cfg("S -> a | a\nS -> a", &warnings);
  CHECK(g.productions().size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].code == "duplicate-production");
  CHECK(warnings[0].text.find('2') != std::string::npos);
}

TEST_CASE("sanitize") {
  CHECK(sanitize(parse_cfg("S -> a | B")) == parse_cfg("S -> a"));
  const Cfg anbn = parse_cfg("S -> a S b | eps");
  CHECK(sanitize(anbn) == anbn);
  // the declared alphabet survives, so bounded checks keep comparing over it
  const Cfg dropped = sanitize(parse_cfg("S -> A\nA -> a\nC -> c"));
  CHECK(dropped.productions() == parse_cfg("S -> A\nA -> a").productions());
  CHECK(dropped.terminals() == Alphabet{'a', 'c'});
  CHECK_THROWS_AS(sanitize(parse_cfg("S -> a S")), EmptyLanguage);
}

TEST_CASE("sanitize preserves the bounded language") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 200) {
    const Cfg g = oracle::random_cfg(rng, 3, 2, 6, 3);
    Cfg clean = g;
    try {
      clean = sanitize(g);
    } catch (const EmptyLanguage&) {
      CHECK(enumerate_words(g, Deadline::never(), 5).words.empty());
      ++checked;
      continue;
    }
    const Alphabet sigma{'a', 'b'};
    CHECK(as_vector(enumerate_words(g, Deadline::never(), 5, sigma).words) ==
          as_vector(enumerate_words(clean, Deadline::never(), 5, sigma).words));
    ++checked;
  }
}

TEST_CASE("CNF predicate") {
  CHECK(is_cnf(parse_cfg("S -> A B\nA -> a\nB -> b")).ok());
  const CnfCheck mixed = is_cnf(parse_cfg("S -> a B\nB -> b"));
  REQUIRE(mixed.violations.size() == 1);
  CHECK(mixed.violations[0].production == 0);
  CHECK(mixed.violations[0].reason == CnfReason::MixedBody);

  const CnfCheck start_rhs = is_cnf(parse_cfg("S -> eps | A S\nA -> a"));
  REQUIRE_FALSE(start_rhs.ok());
  CHECK(start_rhs.violations[0].reason == CnfReason::StartOnRightSide);

  CHECK(is_cnf(parse_cfg("S -> A B C")).violations[0].reason == CnfReason::BodyTooLong);
  CHECK(is_cnf(parse_cfg("S -> A\nA -> a")).violations[0].reason == CnfReason::UnitProduction);
  CHECK(is_cnf(parse_cfg("S -> A B | eps\nA -> eps\nB -> b")).violations[0].reason == CnfReason::IllegalEpsilon);
  CHECK(to_string(CnfReason::StartOnRightSide) == "start-on-rhs");
}

TEST_CASE("CYK tables") {
  const Cfg g = parse_cfg("S -> A B\nA -> a\nB -> b");
  const CykTable ab = cyk_decide(g, "ab");
  CHECK(ab.cell(0, 1) == "A");
  CHECK(ab.cell(1, 1) == "B");
  CHECK(ab.cell(0, 2) == "S");
  CHECK(cyk_decide(g, "ba").cell(0, 2).empty());
  CHECK(cyk_decide(parse_cfg("S -> a"), "a").cell(0, 1) == "S");
  CHECK_THROWS_AS(cyk_decide(parse_cfg("S -> a B\nB -> b"), "ab"), NotCnf);
}

TEST_CASE("CYK cells agree with derivation enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const Cfg g = oracle::random_cnf(rng, 1 + static_cast<int>(rng() % 4), 2 + static_cast<int>(rng() % 5), false);
    for (const Word& w : oracle::all_words("ab", 4)) {
      if (w.empty()) continue;
      const CykTable t = cyk_decide(g, w);
      for (std::size_t len = 1; len <= w.size(); ++len)
        for (std::size_t i = 0; i + len <= w.size(); ++i)
          for (char a : g.nonterminals())
            CHECK((t.cell(i, len).find(a) != std::string::npos) ==
                  oracle::cnf_derives_by_enumeration(g, a, w.substr(i, len)));
    }
  }
}

TEST_CASE("CNF conversion preserves the language") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const Cfg g = oracle::random_cfg(rng, 3, 2, 6, 3);
    const CompiledCnf compiled = compile_cnf(g);
    for (const Word& w : oracle::all_words("ab", 5)) CHECK(cnf_accepts(compiled, w) == oracle::cfg_member(g, w));
    Cfg rendered = g;
    try {
      rendered = to_cnf(g);
    } catch (const InvalidPayload&) {
      continue;
    }
    CHECK(is_cnf(rendered).ok());
    for (const Word& w : oracle::all_words("ab", 5)) CHECK(oracle::cfg_member(rendered, w) == oracle::cfg_member(g, w));
  }
}

TEST_CASE("checking derivations") {
  const Cfg g = parse_cfg("S -> a S b | eps");
  CHECK(check_derivation(g, {DerivationMode::Any, {"S", "aSb", "ab"}}, "ab").ok());

  const DerivationVerdict skip = check_derivation(g, {DerivationMode::Any, {"S", "aSb", "aaSbb", "ab"}}, "ab");
  CHECK(skip.error == DerivationError::NoSingleProduction);
  CHECK(skip.bad_step == 3);

  const Cfg h = parse_cfg("S -> A B\nA -> a\nB -> b");
  const DerivationVerdict occ = check_derivation(h, {DerivationMode::Leftmost, {"S", "AB", "Ab", "ab"}}, "ab");
  CHECK(occ.error == DerivationError::WrongOccurrence);
  CHECK(occ.bad_step == 2);
  CHECK(check_derivation(h, {DerivationMode::Rightmost, {"S", "AB", "Ab", "ab"}}, "ab").ok());
  CHECK(check_derivation(h, {DerivationMode::Any, {"S", "AB", "Ab", "ab"}}, "ab").ok());

  const DerivationVerdict result = check_derivation(g, {DerivationMode::Any, {"S", "aSb", "ab"}}, "aabb");
  CHECK(result.error == DerivationError::WrongResult);
  CHECK(result.bad_step == 2);
  CHECK(check_derivation(g, {DerivationMode::Any, {"A"}}, "").error == DerivationError::WrongStart);
  CHECK(check_derivation(g, {DerivationMode::Any, {}}, "").error == DerivationError::Empty);
}

TEST_CASE("random derivations are accepted in their own mode") {
  std::mt19937_64 rng(17);
  int produced = 0;
  for (int trial = 0; trial < 400 && produced < 150; ++trial) {
    Cfg g = oracle::random_cfg(rng, 3, 2, 7, 3);
    try {
      g = sanitize(g);
    } catch (const EmptyLanguage&) {
      continue;
    }
    const auto mode = static_cast<DerivationMode>(trial % 3);
    // random walk, replacing the occurrence the mode dictates
    Derivation d{mode, {std::string(1, g.start())}};
    for (int step = 0; step < 12; ++step) {
      const std::string& form = d.steps.back();
      std::vector<std::size_t> positions;
      for (std::size_t i = 0; i < form.size(); ++i)
        if (is_nonterminal(form[i])) positions.push_back(i);
      if (positions.empty()) break;
      std::size_t at = positions[rng() % positions.size()];
      if (mode == DerivationMode::Leftmost) at = positions.front();
      if (mode == DerivationMode::Rightmost) at = positions.back();
      std::vector<const Production*> options;
      for (const auto& p : g.productions())
        if (p.head == form[at]) options.push_back(&p);
      const Production& p = *options[rng() % options.size()];
      d.steps.push_back(form.substr(0, at) + p.body + form.substr(at + 1));
    }
    CHECK(check_derivation(g, d, d.steps.back()).ok());
    ++produced;
  }
  CHECK(produced >= 100);
}

TEST_CASE("shortest derivations") {
  const Cfg g = parse_cfg("S -> a S b | eps");
  const auto d = find_derivation(g, "aabb", DerivationMode::Leftmost);
  REQUIRE(d);
  CHECK(d->steps == std::vector<std::string>{"S", "aSb", "aaSbb", "aabb"});
  CHECK_FALSE(find_derivation(g, "abab"));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 80; ++trial) {
    const Cfg h = oracle::random_cfg(rng, 3, 2, 6, 3);
    for (const Word& w : oracle::all_words("ab", 4))
      for (auto mode : {DerivationMode::Any, DerivationMode::Leftmost, DerivationMode::Rightmost}) {
        const auto found = find_derivation(h, w, mode);
        CHECK(found.has_value() == oracle::cfg_member(h, w));
        if (found) CHECK(check_derivation(h, *found, w).ok());
      }
  }
}

TEST_CASE("bounded enumeration") {
  const Cfg anbn = parse_cfg("S -> a S b | eps");
  const Enumeration e = enumerate_words(anbn, Deadline::never(), 6);
  CHECK(as_vector(e.words) == std::vector<Word>{"", "ab", "aabb", "aaabbb"});
  CHECK(e.lengths_completed == 6);
  CHECK(e.words_tested == 127);

  CHECK(enumerate_words(parse_cfg("S -> a"), Deadline::never(), 3).words == WordSet{"a"});
  CHECK(enumerate_words(parse_cfg("S -> a S"), Deadline::never(), 4).words.empty());
  CHECK_THROWS_AS(enumerate_words(anbn, Deadline::never()), std::invalid_argument);

  // an expired deadline still decides length 0
  const Enumeration cut = enumerate_words(anbn, Deadline(Clock::now()), std::nullopt);
  CHECK(cut.lengths_completed == 0);
  CHECK(cut.words == WordSet{""});
}

TEST_CASE("enumeration equals brute-force membership") {
  std::mt19937_64 rng(29);
  const Alphabet sigma{'a', 'b'};
  for (int trial = 0; trial < 100; ++trial) {
    const Cfg g = oracle::random_cfg(rng, 1 + static_cast<int>(rng() % 4), 2, 2 + static_cast<int>(rng() % 6), 3);
    CHECK(as_vector(enumerate_words(g, Deadline::never(), 6, sigma).words) == members_up_to(g, sigma, 6));
  }
}

TEST_CASE("parallel length kernel matches the serial reference") {
  std::mt19937_64 rng(31);
  const Alphabet sigma{'a', 'b', 'c'};
  for (int trial = 0; trial < 40; ++trial) {
    const CompiledCnf g = compile_cnf(oracle::random_cfg(rng, 4, 3, 8, 3));
    for (std::size_t len = 0; len <= 6; ++len)
      CHECK(*cnf_words_of_length(g, sigma, len, Deadline::never()) == cnf_words_of_length_reference(g, sigma, len));
  }
}
