#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "formalgrade/nfa.hpp"
#include "formalgrade/regex.hpp"

namespace formalgrade {

struct BlockNfa;

// A block state stands for the language of `label` between `entry` and
// `exit`. Once expanded, `contents` holds the sub-automaton the block was
// resolved into; it is wired in by epsilon edges entry -> contents.initial and
// contents.accepting -> exit.
struct BlockState {
  Regex label;
  StateId entry = 0;
  StateId exit = 0;
  std::shared_ptr<const BlockNfa> contents;  // null = not expanded yet
};

// An epsilon-NFA drawn with block states. State ids are local to one level.
struct BlockNfa {
  int state_count = 1;
  std::vector<Nfa::Transition> transitions;
  StateId initial = 0;
  std::vector<StateId> accepting;
  std::vector<BlockState> blocks;
};

// Immediate edit-time check: ok iff `label` is a structural subexpression of
// `goal`. Throws InvalidBlockLabel otherwise.
void validate_block_label(const Regex& goal, const Regex& label);

// Every block label in the tree, depth-first in declaration order.
std::vector<const BlockState*> all_blocks(const BlockNfa& a);

// Flattens the whole drawing into one epsilon-NFA. Unexpanded blocks
// contribute no path.
Nfa flatten(const BlockNfa& a, const Alphabet& alphabet);

// The fully expanded automaton between a block's entry and exit.
Nfa expand_block(const BlockState& block, const Alphabet& alphabet);

}  // namespace formalgrade
