#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "formalgrade/regex.hpp"
#include "formalgrade/word.hpp"

namespace formalgrade {

using StateId = int;

// Epsilon-NFA over states 0..state_count()-1.
class Nfa {
public:
  struct Transition {
    StateId from;
    std::optional<char> symbol;  // nullopt = epsilon
    StateId to;
    bool operator==(const Transition&) const = default;
  };

  // Validates every invariant: endpoints in range, symbols in the alphabet.
  Nfa(int state_count, Alphabet alphabet, std::vector<Transition> transitions, StateId initial,
      std::vector<StateId> accepting);

  int state_count() const noexcept { return state_count_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  StateId initial() const noexcept { return initial_; }
  const std::vector<StateId>& accepting() const noexcept { return accepting_; }
  bool is_accepting(StateId s) const noexcept { return accepting_mask_[s]; }

  // Sorted state set reachable from `states` by epsilon moves.
  std::vector<StateId> closure(std::vector<StateId> states) const;
  // Closure of the states reached from `states` on `symbol`.
  std::vector<StateId> step(const std::vector<StateId>& states, char symbol) const;
  std::vector<StateId> start_set() const { return closure({initial_}); }
  bool any_accepting(const std::vector<StateId>& states) const;

  // Same automaton over a larger alphabet.
  Nfa with_alphabet(const Alphabet& alphabet) const;

private:
  struct Edge {
    char symbol;  // '\0' = epsilon
    StateId to;
  };

  int state_count_;
  Alphabet alphabet_;
  std::vector<Transition> transitions_;
  StateId initial_;
  std::vector<StateId> accepting_;
  std::vector<bool> accepting_mask_;
  std::vector<std::vector<Edge>> out_;
};

// Thompson construction over `alphabet` (defaults to the RE's own symbols).
// The result has one accepting state and no edges into the initial state.
Nfa thompson(const Regex& re, const Alphabet& alphabet);
Nfa thompson(const Regex& re);

// Membership by epsilon-closure subset stepping. Throws AlphabetError.
bool nfa_accepts(const Nfa& a, std::string_view w);

struct EquivResult {
  bool equal = true;
  std::optional<Word> counterexample;  // shortest, then lexicographically least
  bool in_left = false;                // membership of the counterexample
  bool in_right = false;
};

using RegularLanguage = std::variant<Regex, Nfa>;

// Exact equivalence by breadth-first search over the product of the two
// on-the-fly subset automata, over the union of both alphabets.
EquivResult regular_equiv(const RegularLanguage& x, const RegularLanguage& y);

// Automaton for { x | w x in L(re) }.
Nfa residual(const Regex& re, std::string_view w);
Nfa residual(const Nfa& a, std::string_view w);

// Automaton for the empty language over `alphabet`.
Nfa empty_nfa(const Alphabet& alphabet);

}  // namespace formalgrade
