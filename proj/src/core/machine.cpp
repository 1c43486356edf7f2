#include "formalgrade/machine.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

namespace formalgrade {

bool Loop::operator==(const Loop& o) const { return var == o.var && body == o.body; }
bool Branch::operator==(const Branch& o) const {
  return var == o.var && then_branch == o.then_branch && else_branch == o.else_branch;
}

std::string to_string(IoStatus s) {
  switch (s) {
    case IoStatus::Halted: return "halted";
    case IoStatus::Cutoff: return "cutoff";
    case IoStatus::Malformed: return "malformed";
  }
  return "halted";
}

// ---------------------------------------------------------------------------
// While parser

namespace {

struct Token {
  enum Kind { Ident, Number, Symbol, End } kind;
  std::string text;
  std::size_t column;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
    const std::size_t start = i, start_col = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Token::Ident, std::string(text.substr(start, i - start)), start_col, line});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Token::Number, std::string(text.substr(start, i - start)), start_col, line});
    } else if (text.substr(i, 2) == ":=" || text.substr(i, 2) == "!=") {
      i += 2;
      out.push_back({Token::Symbol, std::string(text.substr(start, 2)), start_col, line});
    } else if (c == ';' || c == '+' || c == '-') {
      ++i;
      out.push_back({Token::Symbol, std::string(1, c), start_col, line});
    } else {
      throw SyntaxError(start_col, "a keyword, variable, number or one of ':= != ; + -'", line);
    }
    col += i - start;
  }
  out.push_back({Token::End, "", col, line});
  return out;
}

class WhileParser {
public:
  explicit WhileParser(std::string_view text) : tokens_(tokenize(text)) {}

  StmtList parse_program() {
    StmtList body = parse_list();
    if (peek().kind != Token::End) fail("';' or end of input");
    return body;
  }

  int max_var = -1;

private:
  const Token& peek() const { return tokens_[pos_]; }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(peek().column, expected, peek().line);
  }
  bool at(std::string_view text) const { return peek().kind != Token::End && peek().text == text; }
  void expect(std::string_view text) {
    if (!at(text)) fail("'" + std::string(text) + "'");
    ++pos_;
  }

  int parse_var() {
    const Token& t = peek();
    if (t.kind != Token::Ident || t.text.size() < 2 || t.text[0] != 'x' ||
        !std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      fail("a variable x0, x1, ...");
    const int v = std::stoi(t.text.substr(1));
    max_var = std::max(max_var, v);
    ++pos_;
    return v;
  }

  Natural parse_nat() {
    if (peek().kind != Token::Number) fail("a natural number");
    const Natural n = std::stoull(peek().text);
    ++pos_;
    return n;
  }

  // A trailing ';' before `end`, `else` or the end of input is tolerated.
  StmtList parse_list() {
    StmtList out;
    out.push_back(parse_stmt());
    while (at(";")) {
      ++pos_;
      if (at("end") || at("else") || peek().kind == Token::End) break;
      out.push_back(parse_stmt());
    }
    return out;
  }

  Stmt parse_stmt() {
    if (at("while")) {
      ++pos_;
      Loop loop;
      loop.var = parse_var();
      expect("!=");
      expect("0");
      expect("do");
      loop.body = parse_list();
      expect("end");
      return {std::move(loop)};
    }
    if (at("if")) {
      ++pos_;
      Branch b;
      b.var = parse_var();
      expect("!=");
      expect("0");
      expect("then");
      b.then_branch = parse_list();
      expect("else");
      b.else_branch = parse_list();
      expect("end");
      return {std::move(b)};
    }
    if (peek().kind != Token::Ident) fail("'while', 'if' or an assignment");
    Assign a;
    a.target = parse_var();
    expect(":=");
    a.source = parse_var();
    if (at("+")) ++pos_;
    else if (at("-")) { ++pos_; a.subtract = true; }
    else fail("'+' or '-'");
    a.constant = parse_nat();
    return {a};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void print_list(const StmtList& list, int indent, std::string& out);

void print_stmt(const Stmt& s, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (const auto* a = std::get_if<Assign>(&s.node)) {
    out += pad + "x" + std::to_string(a->target) + " := x" + std::to_string(a->source) + (a->subtract ? " - " : " + ") +
           std::to_string(a->constant);
  } else if (const auto* l = std::get_if<Loop>(&s.node)) {
    out += pad + "while x" + std::to_string(l->var) + " != 0 do\n";
    print_list(l->body, indent + 1, out);
    out += "\n" + pad + "end";
  } else if (const auto* b = std::get_if<Branch>(&s.node)) {
    out += pad + "if x" + std::to_string(b->var) + " != 0 then\n";
    print_list(b->then_branch, indent + 1, out);
    out += "\n" + pad + "else\n";
    print_list(b->else_branch, indent + 1, out);
    out += "\n" + pad + "end";
  }
}

void print_list(const StmtList& list, int indent, std::string& out) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ";\n";
    print_stmt(list[i], indent, out);
  }
}

}  // namespace

WhileProgram parse_while(std::string_view text, std::optional<int> var_count) {
  WhileParser parser(text);
  WhileProgram p;
  p.body = parser.parse_program();
  p.var_count = var_count.value_or(parser.max_var + 1);
  if (parser.max_var >= p.var_count)
    throw InvalidDocument("program uses x" + std::to_string(parser.max_var) + " but declares " +
                          std::to_string(p.var_count) + " variables");
  return p;
}

std::string print_while(const WhileProgram& p) {
  std::string out;
  print_list(p.body, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// While interpreter

namespace {

class Interpreter {
public:
  Interpreter(Valuation& vars, std::uint64_t cap) : vars_(vars), cap_(cap) {}

  // False once the step cap is exceeded.
  bool run(const StmtList& list) {
    for (const Stmt& s : list)
      if (!exec(s)) return false;
    return true;
  }

  std::uint64_t steps = 0;

private:
  bool tick() { return ++steps <= cap_; }

  bool exec(const Stmt& s) {
    if (const auto* a = std::get_if<Assign>(&s.node)) {
      if (!tick()) return false;
      const Natural src = vars_[a->source];
      vars_[a->target] = a->subtract ? (src > a->constant ? src - a->constant : 0) : src + a->constant;
      return true;
    }
    if (const auto* l = std::get_if<Loop>(&s.node)) {
      while (true) {
        if (!tick()) return false;
        if (vars_[l->var] == 0) return true;
        if (!run(l->body)) return false;
      }
    }
    const auto& b = std::get<Branch>(s.node);
    if (!tick()) return false;
    return run(vars_[b.var] != 0 ? b.then_branch : b.else_branch);
  }

  Valuation& vars_;
  std::uint64_t cap_;
};

}  // namespace

IoBehaviour run_while(const WhileProgram& p, const Valuation& input, std::uint64_t step_cap) {
  if (input.size() != static_cast<std::size_t>(p.var_count)) throw ArityMismatch(p.var_count, input.size());
  IoBehaviour r{input, IoStatus::Halted, input, 0};
  Interpreter interp(r.output, step_cap);
  if (!interp.run(p.body)) {
    r.status = IoStatus::Cutoff;
    r.output.clear();
  }
  r.steps = std::min(interp.steps, step_cap);
  return r;
}

// ---------------------------------------------------------------------------
// Turing machines

MultiTapeTm::MultiTapeTm(int tape_count, std::vector<std::string> states, std::string alphabet, char blank,
                         std::string initial, std::vector<std::string> halting, std::vector<TmTransition> transitions)
    : tapes_(tape_count),
      states_(std::move(states)),
      alphabet_(std::move(alphabet)),
      blank_(blank),
      halting_names_(std::move(halting)),
      transitions_(std::move(transitions)) {
  if (tapes_ < 1) throw InvalidDocument("a Turing machine needs at least one tape");
  if (states_.empty()) throw InvalidDocument("a Turing machine needs at least one state");
  if (alphabet_.find(blank_) == std::string::npos) alphabet_.push_back(blank_);
  if (alphabet_.find('1') == std::string::npos) alphabet_.push_back('1');
  auto index_of = [&](const std::string& name) {
    const auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end()) throw InvalidDocument("undeclared TM state '" + name + "'");
    return static_cast<int>(it - states_.begin());
  };
  initial_ = index_of(initial);
  halting_mask_.assign(states_.size(), false);
  for (const auto& h : halting_names_) halting_mask_[index_of(h)] = true;
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    const auto k = static_cast<std::size_t>(tapes_);
    if (t.read.size() != k || t.write.size() != k || t.move.size() != k)
      throw InvalidDocument("transition " + std::to_string(i + 1) + " does not have one entry per tape");
    for (char c : t.read + t.write)
      if (alphabet_.find(c) == std::string::npos)
        throw InvalidDocument(std::string("tape symbol '") + c + "' is not in the alphabet");
    const int from = index_of(t.from);
    targets_.push_back(index_of(t.to));
    if (!index_.emplace(std::make_pair(from, t.read), static_cast<int>(i)).second)
      throw InvalidDocument("machine is not deterministic: two transitions from '" + t.from + "' on [" + t.read + "]");
  }
}

int MultiTapeTm::lookup(int state, const std::string& read) const {
  const auto it = index_.find({state, read});
  return it == index_.end() ? -1 : it->second;
}

namespace {

struct Tape {
  std::deque<char> cells;
  std::size_t head = 0;
};

class TmRunner {
public:
  TmRunner(const MultiTapeTm& m, const Valuation& input) : m_(m), tapes_(static_cast<std::size_t>(m.tape_count())) {
    if (input.size() != tapes_.size()) throw ArityMismatch(tapes_.size(), input.size());
    for (std::size_t k = 0; k < tapes_.size(); ++k) {
      tapes_[k].cells.assign(input[k], '1');
      tapes_[k].cells.push_back(m.blank());
    }
    state_ = m.initial_index();
  }

  // False when the machine halts.
  bool step() {
    if (m_.is_halting(state_)) return false;
    std::string read;
    for (const auto& t : tapes_) read.push_back(t.cells[t.head]);
    const int idx = m_.lookup(state_, read);
    if (idx < 0) return false;
    const TmTransition& tr = m_.transitions()[idx];
    for (std::size_t k = 0; k < tapes_.size(); ++k) {
      Tape& t = tapes_[k];
      t.cells[t.head] = tr.write[k];
      if (tr.move[k] == Move::Left) {
        if (t.head == 0) t.cells.push_front(m_.blank());
        else --t.head;
      } else if (tr.move[k] == Move::Right) {
        if (++t.head == t.cells.size()) t.cells.push_back(m_.blank());
      }
    }
    state_ = m_.target_index(idx);
    return true;
  }

  // Unary value under each head; nullopt on a foreign symbol.
  std::optional<Valuation> decode() const {
    Valuation out;
    for (const auto& t : tapes_) {
      Natural v = 0;
      for (std::size_t i = t.head; i < t.cells.size() && t.cells[i] != m_.blank(); ++i) {
        if (t.cells[i] != '1') return std::nullopt;
        ++v;
      }
      out.push_back(v);
    }
    return out;
  }

  TmSnapshot snapshot() const {
    TmSnapshot s{m_.states()[state_], {}, {}};
    for (const auto& t : tapes_) {
      s.tapes.emplace_back(t.cells.begin(), t.cells.end());
      s.heads.push_back(static_cast<int>(t.head));
    }
    return s;
  }

private:
  const MultiTapeTm& m_;
  std::vector<Tape> tapes_;
  int state_;
};

IoBehaviour simulate(const MultiTapeTm& m, const Valuation& input, std::uint64_t step_cap, TmTrace* trace) {
  TmRunner runner(m, input);
  IoBehaviour r{input, IoStatus::Halted, {}, 0};
  if (trace) trace->steps.push_back(runner.snapshot());
  while (true) {
    if (r.steps == step_cap) {
      // One more probe: a machine that halts exactly at the cap is not cut off.
      TmRunner probe = runner;
      if (probe.step()) {
        r.status = IoStatus::Cutoff;
        return r;
      }
      break;
    }
    if (!runner.step()) break;
    ++r.steps;
    if (trace) trace->steps.push_back(runner.snapshot());
  }
  if (auto out = runner.decode()) r.output = std::move(*out);
  else r.status = IoStatus::Malformed;
  return r;
}

}  // namespace

IoBehaviour run_tm(const MultiTapeTm& m, const Valuation& input, std::uint64_t step_cap) {
  IoBehaviour r = simulate(m, input, step_cap, nullptr);
  if (r.status == IoStatus::Malformed) throw EncodingError("a halted tape holds a symbol other than 1 before the first blank");
  return r;
}

TmTrace trace_tm(const MultiTapeTm& m, const Valuation& input, std::uint64_t step_cap) {
  TmTrace t;
  t.result = simulate(m, input, step_cap, &t);
  return t;
}

// ---------------------------------------------------------------------------
// I/O comparison

std::vector<Valuation> ordered_inputs(int arity, Natural max_value) {
  std::vector<Valuation> out;
  const auto k = static_cast<std::size_t>(arity);
  const Natural max_sum = max_value * k;
  Valuation v(k, 0);
  // Lexicographic vectors with a fixed component sum.
  auto fill = [&](auto&& self, std::size_t pos, Natural remaining) -> void {
    if (pos + 1 == k) {
      if (remaining <= max_value) {
        v[pos] = remaining;
        out.push_back(v);
      }
      return;
    }
    for (Natural x = 0; x <= std::min(max_value, remaining); ++x) {
      v[pos] = x;
      self(self, pos + 1, remaining - x);
    }
  };
  for (Natural sum = 0; sum <= max_sum; ++sum) {
    if (k == 0) break;
    fill(fill, 0, sum);
  }
  return out;
}

namespace {

struct IoTest {
  IoBehaviour expected;
  IoBehaviour computed;
  bool correct() const {
    return expected.status == IoStatus::Halted && computed.status == IoStatus::Halted &&
           expected.output == computed.output;
  }
};

IoTest run_test(const WhileProgram& p, const MultiTapeTm& m, const Valuation& input, std::uint64_t cap) {
  return {run_while(p, input, cap), simulate(m, input, cap, nullptr)};
}

void tally(ComparisonReport& r, IoTest&& t) {
  ++r.tested;
  if (t.correct()) ++r.correct;
  else if (r.counterexamples.size() < kMaxCounterexamples)
    r.counterexamples.push_back({t.expected.input, std::move(t.expected), std::move(t.computed)});
}

void check_arity(const WhileProgram& p, const MultiTapeTm& m) {
  if (p.var_count != m.tape_count())
    throw ArityMismatch(static_cast<std::size_t>(p.var_count), static_cast<std::size_t>(m.tape_count()));
}

}  // namespace

ComparisonReport compare_io(const WhileProgram& p, const MultiTapeTm& m, Deadline deadline,
                            const CompareOptions& options) {
  check_arity(p, m);
  std::vector<Valuation> inputs = ordered_inputs(p.var_count, options.max_input_value);
  if (options.max_tests && inputs.size() > *options.max_tests) inputs.resize(*options.max_tests);
  constexpr std::size_t kBatch = 32;
  ComparisonReport report;
  for (std::size_t begin = 0; begin < inputs.size(); begin += kBatch) {
    if (deadline.expired() && report.tested >= options.min_tests) break;
    const std::size_t end = std::min(inputs.size(), begin + kBatch);
    std::vector<IoTest> results(end - begin);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(end - begin); ++i)
      results[static_cast<std::size_t>(i)] = run_test(p, m, inputs[begin + static_cast<std::size_t>(i)], options.step_cap);
    for (auto& r : results) tally(report, std::move(r));
  }
  return report;
}

ComparisonReport compare_io_reference(const WhileProgram& p, const MultiTapeTm& m, Deadline deadline,
                                      const CompareOptions& options) {
  check_arity(p, m);
  ComparisonReport report;
  for (const Valuation& input : ordered_inputs(p.var_count, options.max_input_value)) {
    if (options.max_tests && report.tested >= *options.max_tests) break;
    if (deadline.expired() && report.tested >= options.min_tests) break;
    tally(report, run_test(p, m, input, options.step_cap));
  }
  return report;
}

// ---------------------------------------------------------------------------
// While -> TM compiler

namespace {

struct TapeAction {
  std::optional<char> read;   // nullopt = 1 or blank
  std::optional<char> write;  // nullopt = leave as read
  Move move = Move::Stay;
};

class TmCompiler {
public:
  explicit TmCompiler(int tapes) : k_(tapes) {}

  MultiTapeTm build(const WhileProgram& p) {
    const std::string start = fresh();
    compile_list(p.body, start, "halt");
    states_.push_back("halt");
    return MultiTapeTm(k_, states_, "1_", '_', start, {"halt"}, std::move(transitions_));
  }

private:
  std::string fresh() {
    states_.push_back("q" + std::to_string(states_.size()));
    return states_.back();
  }

  // Tapes absent from `actions` are read as either symbol, left unchanged and unmoved.
  void add(const std::string& from, const std::string& to, const std::map<int, TapeAction>& actions) {
    std::vector<TapeAction> per(static_cast<std::size_t>(k_));
    for (const auto& [tape, a] : actions) per[static_cast<std::size_t>(tape)] = a;
    std::string read(static_cast<std::size_t>(k_), '_');
    expand(from, to, per, read, 0);
  }

  void expand(const std::string& from, const std::string& to, const std::vector<TapeAction>& per, std::string& read,
              std::size_t tape) {
    if (tape == per.size()) {
      TmTransition t{from, read, to, read, {}};
      for (std::size_t i = 0; i < per.size(); ++i) {
        if (per[i].write) t.write[i] = *per[i].write;
        t.move.push_back(per[i].move);
      }
      transitions_.push_back(std::move(t));
      return;
    }
    for (char c : {'1', '_'}) {
      if (per[tape].read && *per[tape].read != c) continue;
      read[tape] = c;
      expand(from, to, per, read, tape + 1);
    }
  }

  void nop(const std::string& from, const std::string& to) { add(from, to, {}); }

  // Prepends a one: step left, write 1.
  void increment(int t, const std::string& from, const std::string& to) {
    const std::string mid = fresh();
    add(from, mid, {{t, {std::nullopt, std::nullopt, Move::Left}}});
    add(mid, to, {{t, {'_', '1', Move::Stay}}});
  }

  // Erases the first one, if any.
  void decrement(int t, const std::string& from, const std::string& to) {
    add(from, to, {{t, {'1', '_', Move::Right}}});
    add(from, to, {{t, {'_', '_', Move::Stay}}});
  }

  void repeat(Natural times, int t, bool subtract, const std::string& from, const std::string& to) {
    if (times == 0) return nop(from, to);
    std::string cur = from;
    for (Natural i = 0; i < times; ++i) {
      const std::string next = i + 1 == times ? to : fresh();
      if (subtract) decrement(t, cur, next);
      else increment(t, cur, next);
      cur = next;
    }
  }

  void compile_assign(const Assign& a, const std::string& from, const std::string& to) {
    const int t = a.target, s = a.source;
    if (t == s) return repeat(a.constant, t, a.subtract, from, to);
    // Erase the target by walking over it; its new start is the blank reached.
    const std::string copy = fresh(), back = fresh(), done = fresh();
    add(from, from, {{t, {'1', '_', Move::Right}}});
    add(from, copy, {{t, {'_', '_', Move::Stay}}});
    // Copy source ones onto the target in lockstep, then return both heads.
    add(copy, copy, {{s, {'1', '1', Move::Right}}, {t, {std::nullopt, '1', Move::Right}}});
    add(copy, back, {{s, {'_', '_', Move::Left}}, {t, {std::nullopt, '_', Move::Left}}});
    add(back, back, {{s, {'1', '1', Move::Left}}, {t, {std::nullopt, std::nullopt, Move::Left}}});
    add(back, done, {{s, {'_', '_', Move::Right}}, {t, {std::nullopt, std::nullopt, Move::Right}}});
    repeat(a.constant, t, a.subtract, done, to);
  }

  void compile_stmt(const Stmt& stmt, const std::string& from, const std::string& to) {
    if (const auto* a = std::get_if<Assign>(&stmt.node)) return compile_assign(*a, from, to);
    if (const auto* l = std::get_if<Loop>(&stmt.node)) {
      const std::string body = fresh();
      add(from, body, {{l->var, {'1', '1', Move::Stay}}});
      add(from, to, {{l->var, {'_', '_', Move::Stay}}});
      return compile_list(l->body, body, from);
    }
    const auto& b = std::get<Branch>(stmt.node);
    const std::string then_entry = fresh(), else_entry = fresh();
    add(from, then_entry, {{b.var, {'1', '1', Move::Stay}}});
    add(from, else_entry, {{b.var, {'_', '_', Move::Stay}}});
    compile_list(b.then_branch, then_entry, to);
    compile_list(b.else_branch, else_entry, to);
  }

  void compile_list(const StmtList& list, const std::string& from, const std::string& to) {
    std::string cur = from;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string next = i + 1 == list.size() ? to : fresh();
      compile_stmt(list[i], cur, next);
      cur = next;
    }
  }

  int k_;
  std::vector<std::string> states_;
  std::vector<TmTransition> transitions_;
};

}  // namespace

MultiTapeTm compile_to_tm(const WhileProgram& p) { return TmCompiler(p.var_count).build(p); }

}  // namespace formalgrade
