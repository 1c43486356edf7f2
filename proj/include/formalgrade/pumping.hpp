#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formalgrade/word.hpp"

namespace formalgrade {

// ---------------------------------------------------------------------------
// Arithmetic pattern languages, e.g. "a^i b^j | i < j, j <= 2i + 1".

struct LinearTerm {
  std::int64_t coeff = 1;
  char var = 0;
  bool operator==(const LinearTerm&) const = default;
};

// sum(coeff * var) + constant
struct LinearExpr {
  std::vector<LinearTerm> terms;
  std::int64_t constant = 0;
  bool operator==(const LinearExpr&) const = default;
};

enum class Relation { Eq, Ne, Lt, Le, Gt, Ge };

struct Constraint {
  LinearExpr lhs;
  Relation rel = Relation::Eq;
  LinearExpr rhs;
  bool operator==(const Constraint&) const = default;
};

// One run symbol^exponent; the exponent is a variable or a constant.
struct PatternBlock {
  char symbol = 'a';
  std::optional<char> var;
  std::int64_t constant = 1;  // used when `var` is empty
  bool operator==(const PatternBlock&) const = default;
};

struct ArithLang {
  std::vector<PatternBlock> blocks;
  std::vector<Constraint> constraints;

  Alphabet alphabet() const;
  std::string variables() const;  // sorted, each once
  // Largest constant among block exponents and constraints.
  std::int64_t max_constant() const;
  bool operator==(const ArithLang&) const = default;
};

// Syntax: blocks separated by spaces, `a`, `a^3`, `a^i`; optional `|` and
// comma-separated constraints over =, !=, <, <=, >, >=. Throws SyntaxError,
// InvalidDocument when a constraint names a variable no block uses.
ArithLang parse_arith_lang(std::string_view text);
std::string print_arith_lang(const ArithLang& lang);

bool arith_member(const ArithLang& lang, std::string_view w);

// Words of the language with min_len <= |w| <= max_len, shortlex order.
std::vector<Word> arith_words(const ArithLang& lang, std::size_t min_len, std::size_t max_len);

// Word pattern in n, e.g. "a^n b^(n+1)" or "a^(2n) b^n c".
struct TemplateBlock {
  char symbol = 'a';
  std::int64_t coeff = 0;
  std::int64_t constant = 1;
  bool operator==(const TemplateBlock&) const = default;
};

struct WordTemplate {
  std::vector<TemplateBlock> blocks;
  Word instantiate(std::int64_t n) const;
  bool operator==(const WordTemplate&) const = default;
};

WordTemplate parse_word_template(std::string_view text);
std::string print_word_template(const WordTemplate& t);

// ---------------------------------------------------------------------------
// The pumping-lemma game

struct PumpingPayload {
  ArithLang language;
  bool regular = false;
  std::optional<WordTemplate> unpumpable;  // required when not regular
};

// Largest pump count a student may choose.
inline constexpr int kMaxPump = 20;
// Largest bound a student may choose.
inline constexpr int kMaxBound = 20;
// How far beyond n the tutor looks for a word of a regular language.
inline constexpr std::size_t kWordSearchSlack = 12;

enum class Claim { Regular, NonRegular };
enum class GamePhase { ChooseClaim, ChooseBound, ChooseWord, ChooseSplit, ChoosePump, Over };
enum class Winner { Undecided, Student, Tutor };

std::string to_string(Claim c);
std::string to_string(GamePhase p);
std::string to_string(Winner w);

struct Split {
  std::size_t x = 0;  // |x|
  std::size_t y = 0;  // |y|
  bool operator==(const Split&) const = default;
};

struct GameState {
  std::optional<Claim> claim;
  GamePhase phase = GamePhase::ChooseClaim;
  std::optional<int> n;
  std::optional<Word> w;
  std::optional<Split> split;
  std::optional<int> i;
  Winner winner = Winner::Undecided;
  std::vector<std::string> transcript;
  bool operator==(const GameState&) const = default;
};

struct GameMove {
  enum class Kind { Claim, Bound, Word, Split, Pump } kind = Kind::Claim;
  formalgrade::Claim claim = formalgrade::Claim::Regular;
  int n = 0;
  formalgrade::Word word;
  formalgrade::Split split;
  int i = 0;
  bool operator==(const GameMove&) const = default;
};

// The student's move plus the tutor's reply. Throws IllegalMove and leaves
// `state` untouched in that case.
GameState pumping_game_step(const PumpingPayload& p, const GameState& state, const GameMove& move);

// Replays a list of student moves from the opening position.
GameState replay_game(const PumpingPayload& p, const std::vector<GameMove>& moves);

// The tutor's bound when the student claims non-regularity:
// blocks * (largest constant + 1).
int tutor_bound(const ArithLang& lang);

// The pumped word x y^i z.
Word pump(const Word& w, const Split& s, int i);

// Languages shipped with the engine for the game, regular and not.
struct SampleLanguage {
  std::string language;
  bool regular = false;
  std::string unpumpable;  // empty for regular languages
};
const std::vector<SampleLanguage>& sample_languages();
PumpingPayload to_payload(const SampleLanguage& s);

}  // namespace formalgrade
