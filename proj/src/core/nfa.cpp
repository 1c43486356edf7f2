#include "formalgrade/nfa.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace formalgrade {

Nfa::Nfa(int state_count, Alphabet alphabet, std::vector<Transition> transitions, StateId initial,
         std::vector<StateId> accepting)
    : state_count_(state_count),
      alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions)),
      initial_(initial),
      accepting_(std::move(accepting)) {
  if (state_count_ <= 0) throw InvalidDocument("an automaton needs at least one state");
  auto in_range = [&](StateId s) { return s >= 0 && s < state_count_; };
  if (!in_range(initial_)) throw InvalidDocument("initial state out of range");
  std::sort(accepting_.begin(), accepting_.end());
  accepting_.erase(std::unique(accepting_.begin(), accepting_.end()), accepting_.end());
  accepting_mask_.assign(state_count_, false);
  for (StateId s : accepting_) {
    if (!in_range(s)) throw InvalidDocument("accepting state out of range");
    accepting_mask_[s] = true;
  }
  out_.resize(state_count_);
  for (const auto& t : transitions_) {
    if (!in_range(t.from) || !in_range(t.to)) throw InvalidDocument("transition endpoint out of range");
    if (t.symbol && !alphabet_.contains(*t.symbol)) throw AlphabetError(*t.symbol);
    out_[t.from].push_back({t.symbol.value_or('\0'), t.to});
  }
}

std::vector<StateId> Nfa::closure(std::vector<StateId> states) const {
  std::vector<bool> seen(state_count_, false);
  std::vector<StateId> stack;
  for (StateId s : states)
    if (!seen[s]) { seen[s] = true; stack.push_back(s); }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (const Edge& e : out_[s])
      if (e.symbol == '\0' && !seen[e.to]) { seen[e.to] = true; stack.push_back(e.to); }
  }
  std::vector<StateId> out;
  for (StateId s = 0; s < state_count_; ++s)
    if (seen[s]) out.push_back(s);
  return out;
}

std::vector<StateId> Nfa::step(const std::vector<StateId>& states, char symbol) const {
  std::vector<StateId> next;
  for (StateId s : states)
    for (const Edge& e : out_[s])
      if (e.symbol == symbol) next.push_back(e.to);
  return closure(std::move(next));
}

bool Nfa::any_accepting(const std::vector<StateId>& states) const {
  return std::any_of(states.begin(), states.end(), [&](StateId s) { return accepting_mask_[s]; });
}

Nfa Nfa::with_alphabet(const Alphabet& alphabet) const {
  return Nfa(state_count_, alphabet_.merged(alphabet), transitions_, initial_, accepting_);
}

Nfa empty_nfa(const Alphabet& alphabet) { return Nfa(1, alphabet, {}, 0, {}); }

namespace {

struct Fragment {
  StateId start;
  StateId accept;
};

class ThompsonBuilder {
public:
  Fragment build(const Regex& re) {
    using K = Regex::Kind;
    switch (re.kind()) {
      case K::Empty: return {fresh(), fresh()};
      case K::Epsilon: {
        Fragment f{fresh(), fresh()};
        edge(f.start, std::nullopt, f.accept);
        return f;
      }
      case K::Literal: {
        Fragment f{fresh(), fresh()};
        edge(f.start, re.symbol(), f.accept);
        return f;
      }
      case K::Concat: {
        const Fragment l = build(re.left());
        const Fragment r = build(re.right());
        edge(l.accept, std::nullopt, r.start);
        return {l.start, r.accept};
      }
      case K::Union: {
        const StateId s = fresh();
        const Fragment l = build(re.left());
        const Fragment r = build(re.right());
        const StateId a = fresh();
        edge(s, std::nullopt, l.start);
        edge(s, std::nullopt, r.start);
        edge(l.accept, std::nullopt, a);
        edge(r.accept, std::nullopt, a);
        return {s, a};
      }
      case K::Star: {
        const StateId s = fresh();
        const Fragment i = build(re.inner());
        const StateId a = fresh();
        edge(s, std::nullopt, i.start);
        edge(s, std::nullopt, a);
        edge(i.accept, std::nullopt, i.start);
        edge(i.accept, std::nullopt, a);
        return {s, a};
      }
    }
    return {};
  }

  int count = 0;
  std::vector<Nfa::Transition> transitions;

private:
  StateId fresh() { return count++; }
  void edge(StateId from, std::optional<char> symbol, StateId to) { transitions.push_back({from, symbol, to}); }
};

Nfa to_nfa(const RegularLanguage& lang) {
  if (const auto* re = std::get_if<Regex>(&lang)) return thompson(*re);
  return std::get<Nfa>(lang);
}

}  // namespace

Nfa thompson(const Regex& re, const Alphabet& alphabet) {
  ThompsonBuilder b;
  const Fragment f = b.build(re);
  return Nfa(b.count, re.symbols().merged(alphabet), std::move(b.transitions), f.start, {f.accept});
}

Nfa thompson(const Regex& re) { return thompson(re, Alphabet{}); }

bool nfa_accepts(const Nfa& a, std::string_view w) {
  a.alphabet().check(w);
  std::vector<StateId> current = a.start_set();
  for (char c : w) {
    current = a.step(current, c);
    if (current.empty()) return false;
  }
  return a.any_accepting(current);
}

EquivResult regular_equiv(const RegularLanguage& x, const RegularLanguage& y) {
  const Nfa left0 = to_nfa(x);
  const Nfa right0 = to_nfa(y);
  const Alphabet sigma = left0.alphabet().merged(right0.alphabet());
  const Nfa left = left0.with_alphabet(sigma);
  const Nfa right = right0.with_alphabet(sigma);

  using Pair = std::pair<std::vector<StateId>, std::vector<StateId>>;
  std::map<Pair, bool> seen;
  std::deque<std::pair<Pair, Word>> queue;
  Pair start{left.start_set(), right.start_set()};
  seen.emplace(start, true);
  queue.emplace_back(std::move(start), Word{});

  // FIFO order with symbols tried in ascending order visits words in shortlex
  // order, so the first mismatch is the shortlex-least counterexample.
  while (!queue.empty()) {
    auto [pair, word] = std::move(queue.front());
    queue.pop_front();
    const bool in_l = left.any_accepting(pair.first);
    const bool in_r = right.any_accepting(pair.second);
    if (in_l != in_r) return {false, word, in_l, in_r};
    for (char c : sigma) {
      Pair next{left.step(pair.first, c), right.step(pair.second, c)};
      if (seen.emplace(next, true).second) queue.emplace_back(std::move(next), word + c);
    }
  }
  return {};
}

Nfa residual(const Nfa& a, std::string_view w) {
  a.alphabet().check(w);
  std::vector<StateId> current = a.start_set();
  for (char c : w) current = a.step(current, c);
  if (current.empty()) return empty_nfa(a.alphabet());
  // A fresh initial state with epsilon edges into the reached subset.
  std::vector<Nfa::Transition> ts = a.transitions();
  const StateId start = a.state_count();
  for (StateId s : current) ts.push_back({start, std::nullopt, s});
  return Nfa(a.state_count() + 1, a.alphabet(), std::move(ts), start, a.accepting());
}

Nfa residual(const Regex& re, std::string_view w) {
  return residual(thompson(re, Alphabet(w)), w);
}

}  // namespace formalgrade
