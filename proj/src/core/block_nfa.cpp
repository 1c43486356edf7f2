#include "formalgrade/block_nfa.hpp"

namespace formalgrade {

void validate_block_label(const Regex& goal, const Regex& label) {
  if (!goal.has_subexpression(label)) throw InvalidBlockLabel(label.print());
}

namespace {

void collect(const BlockNfa& a, std::vector<const BlockState*>& out) {
  for (const auto& b : a.blocks) {
    out.push_back(&b);
    if (b.contents) collect(*b.contents, out);
  }
}

// Appends `a` to the flat transition list with ids shifted by `offset`;
// returns the next free id.
int emit(const BlockNfa& a, int offset, std::vector<Nfa::Transition>& out) {
  auto check = [&](StateId s) {
    if (s < 0 || s >= a.state_count) throw InvalidDocument("block automaton state out of range");
  };
  check(a.initial);
  for (StateId s : a.accepting) check(s);
  for (const auto& t : a.transitions) {
    check(t.from);
    check(t.to);
    out.push_back({t.from + offset, t.symbol, t.to + offset});
  }
  int next = offset + a.state_count;
  for (const auto& b : a.blocks) {
    check(b.entry);
    check(b.exit);
    if (!b.contents) continue;
    const int base = next;
    next = emit(*b.contents, base, out);
    out.push_back({b.entry + offset, std::nullopt, b.contents->initial + base});
    for (StateId acc : b.contents->accepting) out.push_back({acc + base, std::nullopt, b.exit + offset});
  }
  return next;
}

}  // namespace

std::vector<const BlockState*> all_blocks(const BlockNfa& a) {
  std::vector<const BlockState*> out;
  collect(a, out);
  return out;
}

Nfa flatten(const BlockNfa& a, const Alphabet& alphabet) {
  std::vector<Nfa::Transition> ts;
  const int count = emit(a, 0, ts);
  return Nfa(count, alphabet, std::move(ts), a.initial, a.accepting);
}

Nfa expand_block(const BlockState& block, const Alphabet& alphabet) {
  if (!block.contents) return empty_nfa(alphabet);
  return flatten(*block.contents, alphabet);
}

}  // namespace formalgrade
