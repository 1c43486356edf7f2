#include "formalgrade/pda.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace formalgrade {

Pda::Pda(std::vector<std::string> states, Alphabet input_alphabet, std::string stack_alphabet, std::string initial,
         char initial_stack, Acceptance acceptance, std::vector<std::string> accepting,
         std::vector<PdaTransition> transitions)
    : states_(std::move(states)),
      input_(std::move(input_alphabet)),
      stack_(std::move(stack_alphabet)),
      initial_stack_(initial_stack),
      acceptance_(acceptance),
      accepting_names_(std::move(accepting)),
      transitions_(std::move(transitions)) {
  if (states_.empty()) throw InvalidDocument("a PDA needs at least one state");
  std::sort(stack_.begin(), stack_.end());
  stack_.erase(std::unique(stack_.begin(), stack_.end()), stack_.end());
  if (stack_.find(initial_stack_) == std::string::npos)
    throw InvalidDocument(std::string("initial stack symbol '") + initial_stack_ + "' not in the stack alphabet");
  initial_ = state_index(initial);
  accepting_mask_.assign(states_.size(), false);
  for (const auto& a : accepting_names_) accepting_mask_[state_index(a)] = true;
  outgoing_.assign(states_.size(), std::vector<std::vector<int>>(stack_.size()));
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    const int from = state_index(t.from);
    targets_.push_back(state_index(t.to));
    if (t.read && !input_.contains(*t.read)) throw AlphabetError(*t.read);
    const auto pop = stack_.find(t.pop);
    if (pop == std::string::npos) throw InvalidDocument(std::string("stack symbol '") + t.pop + "' not declared");
    for (char c : t.push)
      if (stack_.find(c) == std::string::npos) throw InvalidDocument(std::string("stack symbol '") + c + "' not declared");
    outgoing_[from][pop].push_back(static_cast<int>(i));
  }
}

int Pda::state_index(std::string_view name) const {
  const auto it = std::find(states_.begin(), states_.end(), name);
  if (it == states_.end()) throw InvalidDocument("undeclared PDA state '" + std::string(name) + "'");
  return static_cast<int>(it - states_.begin());
}

const std::vector<int>& Pda::outgoing(int state, char top) const {
  static const std::vector<int> none;
  const auto pos = stack_.find(top);
  if (pos == std::string::npos) return none;
  return outgoing_[state][pos];
}

std::string to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::Accepted: return "accepted";
    case RunVerdict::Rejected: return "rejected";
    case RunVerdict::Cutoff: return "cutoff";
  }
  return "rejected";
}

namespace {

struct Node {
  int state;
  std::size_t pos;
  std::string stack;  // bottom to top
  int parent;
  int via;
  std::size_t depth;
};

struct SearchResult {
  RunVerdict verdict;
  std::vector<Node> nodes;  // only kept when tracing
  int final_node = -1;
};

std::string visit_key(const Node& n) {
  std::string key;
  key.reserve(16 + kVisitedStackDepth);
  key.append(reinterpret_cast<const char*>(&n.state), sizeof n.state);
  key.append(reinterpret_cast<const char*>(&n.pos), sizeof n.pos);
  const std::size_t keep = std::min(n.stack.size(), kVisitedStackDepth);
  key.append(n.stack, n.stack.size() - keep, keep);
  return key;
}

bool accepting(const Pda& p, const Node& n, std::size_t word_len) {
  if (n.pos != word_len) return false;
  return p.acceptance() == Acceptance::FinalState ? p.is_accepting(n.state) : n.stack.empty();
}

SearchResult search(const Pda& p, std::string_view w, std::size_t step_cap, bool trace) {
  if (step_cap == 0) throw std::invalid_argument("step_cap must be at least 1");
  p.input_alphabet().check(w);
  std::vector<Node> nodes;
  std::deque<int> queue;
  std::unordered_set<std::string> visited;

  nodes.push_back({p.initial_index(), 0, std::string(1, p.initial_stack()), -1, -1, 0});
  visited.insert(visit_key(nodes[0]));
  queue.push_back(0);
  int deepest = 0;
  std::size_t expansions = 0;

  while (!queue.empty()) {
    if (expansions == step_cap) return {RunVerdict::Cutoff, trace ? std::move(nodes) : std::vector<Node>{}, deepest};
    const int id = queue.front();
    queue.pop_front();
    ++expansions;
    if (accepting(p, nodes[id], w.size()))
      return {RunVerdict::Accepted, trace ? std::move(nodes) : std::vector<Node>{}, id};
    if (nodes[id].stack.empty()) continue;
    const char top = nodes[id].stack.back();
    for (int t : p.outgoing(nodes[id].state, top)) {
      const PdaTransition& tr = p.transitions()[t];
      std::size_t pos = nodes[id].pos;
      if (tr.read) {
        if (pos >= w.size() || w[pos] != *tr.read) continue;
        ++pos;
      }
      Node next{p.target_index(t), pos, nodes[id].stack, id, t, nodes[id].depth + 1};
      next.stack.pop_back();
      next.stack.append(tr.push.rbegin(), tr.push.rend());
      if (!visited.insert(visit_key(next)).second) continue;
      nodes.push_back(std::move(next));
      const int nid = static_cast<int>(nodes.size()) - 1;
      if (nodes[nid].depth > nodes[deepest].depth) deepest = nid;
      queue.push_back(nid);
    }
  }
  return {RunVerdict::Rejected, trace ? std::move(nodes) : std::vector<Node>{}, deepest};
}

}  // namespace

RunVerdict pda_accepts(const Pda& p, std::string_view w, std::size_t step_cap) {
  return search(p, w, step_cap, false).verdict;
}

PdaRun pda_trace(const Pda& p, std::string_view w, std::size_t step_cap) {
  SearchResult r = search(p, w, step_cap, true);
  PdaRun run{Word(w), {}, {}, r.verdict};
  std::vector<int> path;
  for (int id = r.final_node; id >= 0; id = r.nodes[id].parent) path.push_back(id);
  std::reverse(path.begin(), path.end());
  for (int id : path) {
    const Node& n = r.nodes[id];
    run.steps.push_back({p.states()[n.state], Word(w.substr(n.pos)), n.stack});
    if (n.via >= 0) run.via.push_back(n.via);
  }
  return run;
}

std::optional<PdaLengthResult> pda_words_of_length(const Pda& p, const Alphabet& sigma, std::size_t length,
                                                   Deadline deadline) {
  const std::vector<Word> candidates = words_of_length(sigma, length);
  const std::size_t cap = enumeration_step_cap(length);
  std::vector<char> verdict(candidates.size(), 0);
  std::atomic<bool> stop{false};

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(candidates.size()); ++i) {
    if (stop.load(std::memory_order_relaxed)) continue;
    if (deadline.expired()) {
      stop.store(true, std::memory_order_relaxed);
      continue;
    }
    const Word& w = candidates[static_cast<std::size_t>(i)];
    if (!p.input_alphabet().admits(w)) continue;
    const RunVerdict v = pda_accepts(p, w, cap);
    verdict[static_cast<std::size_t>(i)] = v == RunVerdict::Accepted ? 1 : v == RunVerdict::Cutoff ? 2 : 0;
  }
  if (stop.load()) return std::nullopt;

  PdaLengthResult out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (verdict[i] == 1) out.words.push_back(candidates[i]);
    if (verdict[i] == 2) ++out.cutoffs;
  }
  return out;
}

PdaLengthResult pda_words_of_length_reference(const Pda& p, const Alphabet& sigma, std::size_t length) {
  PdaLengthResult out;
  for (const Word& w : words_of_length(sigma, length)) {
    if (!p.input_alphabet().admits(w)) continue;
    const RunVerdict v = pda_accepts(p, w, enumeration_step_cap(length));
    if (v == RunVerdict::Accepted) out.words.push_back(w);
    if (v == RunVerdict::Cutoff) ++out.cutoffs;
  }
  return out;
}

PdaEnumeration pda_enumerate(const Pda& p, Deadline deadline, std::optional<int> max_len, const Alphabet& alphabet) {
  if (deadline.unlimited() && !max_len) throw std::invalid_argument("unbounded enumeration needs max_len");
  const Alphabet sigma = alphabet.empty() ? p.input_alphabet() : alphabet.merged(p.input_alphabet());
  PdaEnumeration e;
  constexpr int kHardCap = 64;
  const int limit = max_len ? std::min(*max_len, kHardCap) : kHardCap;
  for (int len = 0; len <= limit; ++len) {
    auto result = pda_words_of_length(p, sigma, static_cast<std::size_t>(len), len == 0 ? Deadline::never() : deadline);
    if (!result) break;
    e.words.insert(result->words.begin(), result->words.end());
    e.cutoffs += result->cutoffs;
    e.lengths_completed = len;
    e.words_tested = count_words_up_to(sigma.size(), static_cast<std::size_t>(len));
  }
  return e;
}

}  // namespace formalgrade
