#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "formalgrade/cfg.hpp"
#include "formalgrade/word.hpp"

namespace formalgrade {

enum class Acceptance { FinalState, EmptyStack };

struct PdaTransition {
  std::string from;
  std::optional<char> read;  // nullopt = epsilon
  char pop = 'Z';            // required top-of-stack symbol, always popped
  std::string to;
  std::string push;          // replaces the popped symbol; push[0] ends on top
  bool operator==(const PdaTransition&) const = default;
};

// Nondeterministic pushdown automaton with single-character stack symbols.
class Pda {
public:
  Pda(std::vector<std::string> states, Alphabet input_alphabet, std::string stack_alphabet, std::string initial,
      char initial_stack, Acceptance acceptance, std::vector<std::string> accepting,
      std::vector<PdaTransition> transitions);

  const std::vector<std::string>& states() const noexcept { return states_; }
  const Alphabet& input_alphabet() const noexcept { return input_; }
  const std::string& stack_alphabet() const noexcept { return stack_; }
  const std::string& initial() const noexcept { return states_[initial_]; }
  char initial_stack() const noexcept { return initial_stack_; }
  Acceptance acceptance() const noexcept { return acceptance_; }
  const std::vector<std::string>& accepting() const noexcept { return accepting_names_; }
  const std::vector<PdaTransition>& transitions() const noexcept { return transitions_; }

  int state_index(std::string_view name) const;
  int initial_index() const noexcept { return initial_; }
  bool is_accepting(int state) const noexcept { return accepting_mask_[state]; }
  // Transition indices leaving `state` with `top` on the stack, in declaration order.
  const std::vector<int>& outgoing(int state, char top) const;
  int target_index(int transition) const noexcept { return targets_[transition]; }

private:
  std::vector<std::string> states_;
  Alphabet input_;
  std::string stack_;
  int initial_ = 0;
  char initial_stack_;
  Acceptance acceptance_;
  std::vector<std::string> accepting_names_;
  std::vector<bool> accepting_mask_;
  std::vector<PdaTransition> transitions_;
  std::vector<int> targets_;
  std::vector<std::vector<std::vector<int>>> outgoing_;  // [state][stack symbol index]
};

enum class RunVerdict { Accepted, Rejected, Cutoff };

std::string to_string(RunVerdict v);

struct PdaConfiguration {
  std::string state;
  Word remaining;
  std::string stack;  // bottom to top
  bool operator==(const PdaConfiguration&) const = default;
};

struct PdaRun {
  Word word;
  std::vector<PdaConfiguration> steps;
  std::vector<int> via;  // transition index taken into steps[k+1]
  RunVerdict verdict = RunVerdict::Rejected;
};

// Stack prefix length used in visited-set keys.
inline constexpr std::size_t kVisitedStackDepth = 32;

// Breadth-first search of the configuration graph with visited-set pruning
// on (state, input position, top 32 stack symbols). At most `step_cap`
// configurations are expanded. Throws AlphabetError.
RunVerdict pda_accepts(const Pda& p, std::string_view w, std::size_t step_cap);

// Shortest accepting run (ties by transition declaration order); otherwise
// the deepest explored run with the final verdict.
PdaRun pda_trace(const Pda& p, std::string_view w, std::size_t step_cap);

// Step cap for enumeration: 200 * (|w| + 1).
inline std::size_t enumeration_step_cap(std::size_t word_length) { return 200 * (word_length + 1); }

struct PdaLengthResult {
  std::vector<Word> words;
  std::uint64_t cutoffs = 0;
};

// Accepted words of exactly `length`, or nullopt on deadline. OpenMP-parallel
// over candidate words.
std::optional<PdaLengthResult> pda_words_of_length(const Pda& p, const Alphabet& sigma, std::size_t length,
                                                   Deadline deadline);
// Serial reference for the kernel above.
PdaLengthResult pda_words_of_length_reference(const Pda& p, const Alphabet& sigma, std::size_t length);

struct PdaEnumeration : Enumeration {
  std::uint64_t cutoffs = 0;
};

// Mirrors enumerate_words with membership via pda_accepts.
PdaEnumeration pda_enumerate(const Pda& p, Deadline deadline, std::optional<int> max_len = std::nullopt,
                             const Alphabet& alphabet = {});

}  // namespace formalgrade
