#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formalgrade/word.hpp"

namespace formalgrade {

inline bool is_nonterminal(char c) noexcept { return c >= 'A' && c <= 'Z'; }

struct Production {
  char head = 'S';
  std::string body;  // empty = epsilon
  bool operator==(const Production&) const = default;
};

// Context-free grammar. Nonterminals are uppercase letters, terminals are
// lowercase letters or digits. Both symbol sets are derived from the start
// symbol and the productions; extra terminals may be declared explicitly.
class Cfg {
public:
  // Drops exact duplicate productions (keeping the first occurrence) and
  // reports how many were dropped through `duplicates_dropped`.
  Cfg(char start, std::vector<Production> productions, const Alphabet& extra_terminals = {},
      int* duplicates_dropped = nullptr);

  char start() const noexcept { return start_; }
  const std::vector<Production>& productions() const noexcept { return productions_; }
  const std::string& nonterminals() const noexcept { return nonterminals_; }
  const Alphabet& terminals() const noexcept { return terminals_; }

  // Text form: one line per head (start first, then first-appearance order).
  std::string print() const;

  bool operator==(const Cfg& other) const {
    return start_ == other.start_ && productions_ == other.productions_ && terminals_ == other.terminals_;
  }

private:
  char start_;
  std::vector<Production> productions_;
  std::string nonterminals_;
  Alphabet terminals_;
};

struct Diagnostic {
  std::string code;
  std::string text;
  std::size_t line = 0;
};

// Text format: `Head -> body1 | body2` per line, `eps` for the empty body,
// `#` starts a comment line. The first head is the start symbol. Duplicate
// productions are dropped with a warning appended to `warnings`.
Cfg parse_cfg(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

// Removes non-generating and then unreachable nonterminals. Throws
// EmptyLanguage if the start symbol is non-generating.
Cfg sanitize(const Cfg& g);

// ---------------------------------------------------------------------------
// Chomsky normal form

enum class CnfReason { BodyTooLong, MixedBody, UnitProduction, IllegalEpsilon, StartOnRightSide };

std::string to_string(CnfReason r);

struct CnfViolation {
  std::size_t production = 0;
  CnfReason reason;
};

struct CnfCheck {
  std::vector<CnfViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

// A production is valid iff it is A -> BC, A -> a, or S -> eps with the start
// symbol on no right-hand side.
CnfCheck is_cnf(const Cfg& g);

// Integer-indexed CNF used by the membership kernels; fresh nonterminals are
// not limited to the 26 letters.
struct CompiledCnf {
  int nonterminal_count = 0;
  int start = 0;
  bool accepts_empty = false;
  std::vector<std::pair<char, int>> terminal_rules;  // (a, A) for A -> a
  struct Binary {
    int head, left, right;
  };
  std::vector<Binary> binary_rules;
};

// Textbook conversion: epsilon removal, unit removal, terminal lifting,
// binarization, then pruning of useless nonterminals.
CompiledCnf compile_cnf(const Cfg& g);

// Same conversion rendered as a grammar; fresh nonterminals take unused
// letters. Throws InvalidPayload when the letters run out.
Cfg to_cnf(const Cfg& g);

// Plain per-word CYK on a compiled grammar.
bool cnf_accepts(const CompiledCnf& g, std::string_view w);

// CYK table: cell(i, len) = nonterminals deriving word[i, i+len).
class CykTable {
public:
  CykTable() = default;
  explicit CykTable(Word word);

  const Word& word() const noexcept { return word_; }
  std::size_t size() const noexcept { return word_.size(); }
  // Sorted nonterminal string; `len` is 1-based.
  const std::string& cell(std::size_t i, std::size_t len) const { return rows_.at(len - 1).at(i); }
  std::string& cell(std::size_t i, std::size_t len) { return rows_.at(len - 1).at(i); }
  const std::vector<std::string>& row(std::size_t len) const { return rows_.at(len - 1); }

  bool operator==(const CykTable&) const = default;

private:
  Word word_;
  std::vector<std::vector<std::string>> rows_;
};

// Ground-truth table for a CNF grammar. Throws NotCnf.
CykTable cyk_decide(const Cfg& g, std::string_view w);

// ---------------------------------------------------------------------------
// Derivations

enum class DerivationMode { Any, Leftmost, Rightmost };

std::string to_string(DerivationMode m);
DerivationMode derivation_mode_from_string(std::string_view s);

struct Derivation {
  DerivationMode mode = DerivationMode::Any;
  std::vector<std::string> steps;  // sentential forms, first is the start symbol
};

enum class DerivationError { None, Empty, WrongStart, NoSingleProduction, WrongOccurrence, WrongResult };

std::string to_string(DerivationError e);

struct DerivationVerdict {
  DerivationError error = DerivationError::None;
  std::size_t bad_step = 0;  // 0-based index into `steps`
  bool ok() const noexcept { return error == DerivationError::None; }
};

DerivationVerdict check_derivation(const Cfg& g, const Derivation& d, std::string_view target);

// A derivation of `w` with the fewest steps in the requested mode, or
// nullopt if w is not in the language.
std::optional<Derivation> find_derivation(const Cfg& g, std::string_view w,
                                          DerivationMode mode = DerivationMode::Leftmost);

// ---------------------------------------------------------------------------
// Bounded enumeration

struct Enumeration {
  WordSet words;
  int lengths_completed = -1;
  std::uint64_t words_tested = 0;
};

// Words of L(g) by increasing length until `max_len` or until the deadline
// interrupts a length; that length is discarded. Length 0 is always decided.
// The alphabet defaults to g's terminals. An unlimited deadline requires
// `max_len`.
Enumeration enumerate_words(const Cfg& g, Deadline deadline, std::optional<int> max_len = std::nullopt,
                            const Alphabet& alphabet = {});

// Accepted words of exactly `length`, lexicographic, or nullopt when the
// deadline passes first. OpenMP-parallel over word prefixes with
// prefix-shared incremental CYK tables.
std::optional<std::vector<Word>> cnf_words_of_length(const CompiledCnf& g, const Alphabet& sigma,
                                                     std::size_t length, Deadline deadline);

// Serial reference: one full CYK run per candidate word.
std::vector<Word> cnf_words_of_length_reference(const CompiledCnf& g, const Alphabet& sigma,
                                                std::size_t length);

}  // namespace formalgrade
