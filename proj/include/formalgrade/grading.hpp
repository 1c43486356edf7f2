#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "formalgrade/block_nfa.hpp"
#include "formalgrade/cfg.hpp"
#include "formalgrade/machine.hpp"
#include "formalgrade/pda.hpp"
#include "formalgrade/pumping.hpp"
#include "formalgrade/regex.hpp"

namespace formalgrade {

enum class ProblemKind {
  ReWords,
  CfgWords,
  PdaWords,
  ReConstruction,
  CfgConstruction,
  PdaConstruction,
  ReToNfa,
  EquivClassesDecide,
  EquivClassesFind,
  PumpingGame,
  FindDerivation,
  CnfTransform,
  Cyk,
  WhileToTm,
};

// Kebab-case names used in documents and URLs, e.g. "cfg-words".
std::string to_string(ProblemKind k);
ProblemKind problem_kind_from_string(std::string_view s);  // throws InvalidDocument
const std::vector<ProblemKind>& all_problem_kinds();

// ---------------------------------------------------------------------------
// Payloads

using WordsLanguage = std::variant<Regex, Cfg, Pda>;
using ContextFree = std::variant<Cfg, Pda>;

// Shared by the three word kinds; the language's formalism must match the kind.
struct WordsPayload {
  WordsLanguage language;
  Alphabet alphabet;
  int in_count = 1;
  int out_count = 1;
};

struct ReConstructionPayload {
  std::vector<Regex> solutions;  // teacher-only; the first is the reference
  Alphabet alphabet;
};

struct ConstructionPayload {
  ContextFree solution;  // teacher-only
};

struct ReToNfaPayload {
  Regex goal;
  Alphabet alphabet;
};

struct EquivDecidePayload {
  Regex re;
  Alphabet alphabet;
  Word w1, w2;
};

struct EquivFindPayload {
  Regex re;
  Alphabet alphabet;
  Word base;
  int count = 1;
};

struct DerivationPayload {
  Cfg grammar;
  Word word;
  DerivationMode mode = DerivationMode::Leftmost;
};

struct CnfPayload {
  Cfg original;
};

struct CykPayload {
  Cfg grammar;
  Word word;
};

struct WhileToTmPayload {
  WhileProgram program;
};

using Payload = std::variant<std::monostate, WordsPayload, ReConstructionPayload, ConstructionPayload, ReToNfaPayload,
                             EquivDecidePayload, EquivFindPayload, PumpingPayload, DerivationPayload, CnfPayload,
                             CykPayload, WhileToTmPayload>;

struct Problem {
  ProblemKind kind = ProblemKind::ReWords;
  Payload payload;
  int max_points = 10;
  std::string title;
  std::string description;
};

// ---------------------------------------------------------------------------
// Attempts

struct WordsAttempt {
  std::vector<Word> in, out;
};
struct WordListAttempt {
  std::vector<Word> words;
};
struct RegexAttempt {
  std::string text;
};
struct CfgAttempt {
  std::string text;
};
struct PdaAttempt {
  Pda pda;
};
struct BlockNfaAttempt {
  BlockNfa nfa;
};
struct EquivDecideAttempt {
  bool equivalent = false;
  std::string justification;  // suffix RE when equivalent, suffix word otherwise
};
struct GameAttempt {
  std::vector<GameMove> moves;
};
struct DerivationAttempt {
  std::vector<std::string> steps;
};
struct CykAttempt {
  // rows[len - 1][i] = nonterminals for word[i, i + len)
  std::vector<std::vector<std::string>> rows;
};
struct TmAttempt {
  MultiTapeTm tm;
};

using Attempt = std::variant<WordsAttempt, WordListAttempt, RegexAttempt, CfgAttempt, PdaAttempt, BlockNfaAttempt,
                             EquivDecideAttempt, GameAttempt, DerivationAttempt, CykAttempt, TmAttempt>;

// ---------------------------------------------------------------------------
// Reports

enum class Severity { Info, Warning, Error };
std::string to_string(Severity s);
Severity severity_from_string(std::string_view s);

struct Feedback {
  Severity severity = Severity::Info;
  std::string text;
  std::optional<std::string> counterexample;  // a word, or comma-separated input values
  std::optional<std::string> location;        // e.g. "production 2", "cell (0, 2)", "step 3"
  bool operator==(const Feedback&) const = default;
};

struct GradeReport {
  int points = 0;
  int max_points = 0;
  Rational fraction;
  bool not_counted = false;
  std::vector<Feedback> feedback;
  std::map<std::string, std::int64_t> metadata;
  bool operator==(const GradeReport&) const = default;
};

// Points are always round_half_up(max_points, fraction).
GradeReport make_report(int max_points, Rational fraction);

struct GradeOptions {
  // Wall-clock budget for the bounded graders; nullopt means no deadline,
  // which requires max_length (construction) or max_tests (while to TM).
  std::optional<Clock::duration> budget = std::chrono::seconds(1);
  std::optional<int> max_length;
  std::optional<std::uint64_t> max_tests;
};

inline constexpr std::size_t kGradingPdaStepCap = 100000;
inline constexpr std::size_t kMaxListedWords = 5;
// Hard ceiling on enumerated word length so large budgets stay bounded.
inline constexpr int kMaxEnumeratedLength = 24;

// ---------------------------------------------------------------------------
// Graders, one per problem type

GradeReport grade_words(const WordsPayload& p, const WordsAttempt& a, int max_points);
GradeReport grade_re_construction(const ReConstructionPayload& p, const RegexAttempt& a, int max_points);
// Throws BudgetTooSmall when no length beyond 0 finished within the budget.
GradeReport grade_bounded_construction(const ContextFree& solution, const ContextFree& attempt, int max_points,
                                       const GradeOptions& options = {});
GradeReport grade_re_to_nfa(const ReToNfaPayload& p, const BlockNfaAttempt& a, int max_points);
GradeReport grade_equiv_decide(const EquivDecidePayload& p, const EquivDecideAttempt& a, int max_points);
GradeReport grade_equiv_find(const EquivFindPayload& p, const WordListAttempt& a, int max_points);
GradeReport grade_pumping_game(const GameState& final_state, int max_points);
GradeReport grade_find_derivation(const DerivationPayload& p, const DerivationAttempt& a, int max_points);
GradeReport grade_cnf(const CnfPayload& p, const CfgAttempt& a, int max_points, const GradeOptions& options = {});
GradeReport grade_cyk(const CykPayload& p, const CykAttempt& a, int max_points);
GradeReport grade_while_to_tm(const WhileToTmPayload& p, const TmAttempt& a, int max_points,
                              const GradeOptions& options = {});

// Dispatch by kind. A BudgetTooSmall from a bounded grader is retried with
// 4x and then 16x the budget before it is passed on. Throws InvalidAttempt
// when the attempt shape does not fit the kind.
GradeReport grade(const Problem& problem, const Attempt& attempt, const GradeOptions& options = {});

// Re-runs the grader without a deadline, bounded by the lengths or test
// counts recorded in `stored`, so the result does not depend on machine speed.
GradeReport regrade(const Problem& problem, const Attempt& attempt, const GradeReport& stored);

// Throws InvalidPayload; returns non-fatal warnings.
std::vector<std::string> validate_problem(const Problem& problem);

// Character-level edit distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace formalgrade
