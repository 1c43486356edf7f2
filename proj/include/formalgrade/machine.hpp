#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "formalgrade/word.hpp"

namespace formalgrade {

using Natural = std::uint64_t;
using Valuation = std::vector<Natural>;

// ---------------------------------------------------------------------------
// While programs

struct Stmt;
using StmtList = std::vector<Stmt>;

// target := source + constant, or target := source - constant (monus).
struct Assign {
  int target = 0;
  int source = 0;
  bool subtract = false;
  Natural constant = 0;
  bool operator==(const Assign&) const = default;
};

struct Loop {
  int var = 0;  // while x_var != 0
  StmtList body;
  bool operator==(const Loop&) const;
};

struct Branch {
  int var = 0;  // if x_var != 0
  StmtList then_branch;
  StmtList else_branch;
  bool operator==(const Branch&) const;
};

struct Stmt {
  std::variant<Assign, Loop, Branch> node;
  bool operator==(const Stmt&) const = default;
};

struct WhileProgram {
  int var_count = 1;
  StmtList body;
  bool operator==(const WhileProgram&) const = default;
};

// Concrete syntax:
//   prog := stmt (";" stmt)*
//   stmt := var ":=" var ("+"|"-") nat
//         | "while" var "!=" "0" "do" prog "end"
//         | "if" var "!=" "0" "then" prog "else" prog "end"
// `var_count` defaults to one more than the highest variable index used.
WhileProgram parse_while(std::string_view text, std::optional<int> var_count = std::nullopt);
std::string print_while(const WhileProgram& p);

enum class IoStatus { Halted, Cutoff, Malformed };

std::string to_string(IoStatus s);

struct IoBehaviour {
  Valuation input;
  IoStatus status = IoStatus::Halted;
  Valuation output;  // meaningful when Halted
  std::uint64_t steps = 0;
};

// One step per executed assignment and per condition evaluation.
IoBehaviour run_while(const WhileProgram& p, const Valuation& input, std::uint64_t step_cap);

// ---------------------------------------------------------------------------
// Multi-tape Turing machines

enum class Move { Left, Right, Stay };

struct TmTransition {
  std::string from;
  std::string read;   // one symbol per tape
  std::string to;
  std::string write;  // one symbol per tape
  std::vector<Move> move;
  bool operator==(const TmTransition&) const = default;
};

// Deterministic k-tape machine. Values are unary: v ones starting under the
// head, blanks elsewhere. A machine with no applicable transition halts.
class MultiTapeTm {
public:
  MultiTapeTm(int tape_count, std::vector<std::string> states, std::string alphabet, char blank, std::string initial,
              std::vector<std::string> halting, std::vector<TmTransition> transitions);

  int tape_count() const noexcept { return tapes_; }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::string& alphabet() const noexcept { return alphabet_; }
  char blank() const noexcept { return blank_; }
  const std::string& initial() const noexcept { return states_[initial_]; }
  const std::vector<std::string>& halting() const noexcept { return halting_names_; }
  const std::vector<TmTransition>& transitions() const noexcept { return transitions_; }

  int initial_index() const noexcept { return initial_; }
  bool is_halting(int state) const noexcept { return halting_mask_[state]; }
  // Transition index for (state, read-vector), or -1.
  int lookup(int state, const std::string& read) const;
  int target_index(int transition) const noexcept { return targets_[transition]; }

private:
  int tapes_;
  std::vector<std::string> states_;
  std::string alphabet_;
  char blank_;
  int initial_ = 0;
  std::vector<std::string> halting_names_;
  std::vector<bool> halting_mask_;
  std::vector<TmTransition> transitions_;
  std::vector<int> targets_;
  std::map<std::pair<int, std::string>, int> index_;
};

struct TmSnapshot {
  std::string state;
  std::vector<std::string> tapes;  // visible window per tape
  std::vector<int> heads;          // head offset within each window
};

struct TmTrace {
  std::vector<TmSnapshot> steps;
  IoBehaviour result;
};

// Runs until a halting state, a missing transition, or `step_cap` steps.
// Throws EncodingError when a decoded tape holds a symbol other than 1/blank.
IoBehaviour run_tm(const MultiTapeTm& m, const Valuation& input, std::uint64_t step_cap);
// Same run with a per-step snapshot, for the simulator. Never throws on
// malformed output; the status says so instead.
TmTrace trace_tm(const MultiTapeTm& m, const Valuation& input, std::uint64_t step_cap);

// ---------------------------------------------------------------------------
// Input/output comparison

inline constexpr std::uint64_t kTmStepCap = 1000;
inline constexpr Natural kDefaultMaxInputValue = 5;
inline constexpr std::size_t kMaxCounterexamples = 5;

// Vectors of `arity` components in [0, max_value], by component sum, then
// lexicographically; starts with all zeros.
std::vector<Valuation> ordered_inputs(int arity, Natural max_value);

struct IoCounterexample {
  Valuation input;
  IoBehaviour expected;
  IoBehaviour computed;
};

struct ComparisonReport {
  std::uint64_t tested = 0;
  std::uint64_t correct = 0;
  std::vector<IoCounterexample> counterexamples;  // first five in input order
};

struct CompareOptions {
  std::uint64_t step_cap = kTmStepCap;
  Natural max_input_value = kDefaultMaxInputValue;
  std::uint64_t min_tests = 0;  // tested even after the deadline
  std::optional<std::uint64_t> max_tests;  // stop after this many inputs
};

// OpenMP-parallel in fixed-size batches; the deadline is checked between
// batches and only completed batches count. Throws ArityMismatch.
ComparisonReport compare_io(const WhileProgram& p, const MultiTapeTm& m, Deadline deadline,
                            const CompareOptions& options = {});
// Serial reference: one input at a time, deadline checked before each.
ComparisonReport compare_io_reference(const WhileProgram& p, const MultiTapeTm& m, Deadline deadline,
                                      const CompareOptions& options = {});

// A k-tape machine with the same input/output behaviour as `p`: one tape per
// variable, heads parked on the first cell of each value between statements.
MultiTapeTm compile_to_tm(const WhileProgram& p);

}  // namespace formalgrade
