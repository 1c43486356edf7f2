#include "formalgrade/cfg.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <tuple>

namespace formalgrade {

Cfg::Cfg(char start, std::vector<Production> productions, const Alphabet& extra_terminals,
         int* duplicates_dropped)
    : start_(start) {
  if (!is_nonterminal(start)) throw InvalidDocument(std::string("start symbol '") + start + "' is not a nonterminal");
  std::string nts(1, start), ts = extra_terminals.symbols();
  int dropped = 0;
  for (auto& p : productions) {
    if (!is_nonterminal(p.head)) throw InvalidDocument(std::string("production head '") + p.head + "' is not a nonterminal");
    for (char c : p.body) {
      if (is_nonterminal(c)) nts.push_back(c);
      else if (is_symbol_char(c)) ts.push_back(c);
      else throw InvalidDocument(std::string("invalid grammar symbol '") + c + "'");
    }
    nts.push_back(p.head);
    if (std::find(productions_.begin(), productions_.end(), p) != productions_.end()) {
      ++dropped;
      continue;
    }
    productions_.push_back(std::move(p));
  }
  std::sort(nts.begin(), nts.end());
  nts.erase(std::unique(nts.begin(), nts.end()), nts.end());
  nonterminals_ = std::move(nts);
  terminals_ = Alphabet(ts);
  if (duplicates_dropped) *duplicates_dropped = dropped;
}

std::string Cfg::print() const {
  std::string heads(1, start_);
  for (const auto& p : productions_)
    if (heads.find(p.head) == std::string::npos) heads.push_back(p.head);
  std::string out;
  for (char h : heads) {
    std::string line;
    for (const auto& p : productions_) {
      if (p.head != h) continue;
      line += line.empty() ? std::string(1, h) + " ->" : " |";
      if (p.body.empty()) {
        line += " eps";
      } else {
        for (char c : p.body) {
          line += ' ';
          line += c;
        }
      }
    }
    if (!line.empty()) out += line + "\n";
  }
  return out;
}

Cfg parse_cfg(std::string_view text, std::vector<Diagnostic>* warnings) {
  std::vector<Production> productions;
  std::optional<char> start;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = std::min(text.find('\n', begin), text.size());
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = line.substr(0, line.find('#'));

    std::size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    };
    auto fail = [&](const std::string& expected) { throw SyntaxError(pos + 1, expected, line_no); };

    skip_ws();
    if (pos == line.size()) continue;
    if (!is_nonterminal(line[pos])) fail("an uppercase nonterminal");
    const char head = line[pos++];
    if (!start) start = head;
    skip_ws();
    if (line.substr(pos, 2) != "->") fail("'->'");
    pos += 2;
    while (true) {
      skip_ws();
      std::string body;
      bool any = false;
      while (pos < line.size() && line[pos] != '|') {
        if (std::isspace(static_cast<unsigned char>(line[pos]))) { ++pos; continue; }
        if (line.substr(pos, 3) == "eps") {
          pos += 3;
        } else if (is_nonterminal(line[pos]) || is_symbol_char(line[pos])) {
          body.push_back(line[pos++]);
        } else {
          fail("a grammar symbol or 'eps'");
        }
        any = true;
      }
      if (!any) fail("a grammar symbol or 'eps'");
      productions.push_back({head, std::move(body)});
      if (pos == line.size()) break;
      ++pos;  // '|'
    }
    if (end == text.size()) break;
  }
  if (!start) throw SyntaxError(1, "at least one production", 1);
  int dropped = 0;
  Cfg g(*start, std::move(productions), {}, &dropped);
  if (dropped > 0 && warnings)
    warnings->push_back({"duplicate-production", std::to_string(dropped) + " duplicate production(s) dropped", 0});
  return g;
}

namespace {

std::set<char> generating_set(const std::vector<Production>& ps) {
  std::set<char> gen;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : ps) {
      if (gen.count(p.head)) continue;
      const bool all = std::all_of(p.body.begin(), p.body.end(),
                                   [&](char c) { return !is_nonterminal(c) || gen.count(c); });
      if (all) { gen.insert(p.head); changed = true; }
    }
  }
  return gen;
}

}  // namespace

Cfg sanitize(const Cfg& g) {
  const std::set<char> gen = generating_set(g.productions());
  if (!gen.count(g.start())) throw EmptyLanguage();
  std::vector<Production> useful;
  for (const auto& p : g.productions()) {
    if (!gen.count(p.head)) continue;
    if (std::all_of(p.body.begin(), p.body.end(), [&](char c) { return !is_nonterminal(c) || gen.count(c); }))
      useful.push_back(p);
  }
  std::set<char> reach{g.start()};
  std::vector<char> stack{g.start()};
  while (!stack.empty()) {
    const char a = stack.back();
    stack.pop_back();
    for (const auto& p : useful) {
      if (p.head != a) continue;
      for (char c : p.body)
        if (is_nonterminal(c) && reach.insert(c).second) stack.push_back(c);
    }
  }
  std::vector<Production> kept;
  for (const auto& p : useful)
    if (reach.count(p.head)) kept.push_back(p);
  return Cfg(g.start(), std::move(kept), g.terminals());
}

std::string to_string(CnfReason r) {
  switch (r) {
    case CnfReason::BodyTooLong: return "body-length";
    case CnfReason::MixedBody: return "terminal-nonterminal-mix";
    case CnfReason::UnitProduction: return "unit-production";
    case CnfReason::IllegalEpsilon: return "illegal-epsilon";
    case CnfReason::StartOnRightSide: return "start-on-rhs";
  }
  return "unknown";
}

CnfCheck is_cnf(const Cfg& g) {
  CnfCheck check;
  const auto& ps = g.productions();
  bool start_epsilon = false;
  for (const auto& p : ps)
    if (p.head == g.start() && p.body.empty()) start_epsilon = true;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& b = ps[i].body;
    if (b.empty()) {
      if (ps[i].head != g.start()) check.violations.push_back({i, CnfReason::IllegalEpsilon});
    } else if (b.size() == 1) {
      if (is_nonterminal(b[0])) check.violations.push_back({i, CnfReason::UnitProduction});
    } else if (b.size() == 2) {
      if (!is_nonterminal(b[0]) || !is_nonterminal(b[1])) check.violations.push_back({i, CnfReason::MixedBody});
    } else {
      check.violations.push_back({i, CnfReason::BodyTooLong});
    }
    if (start_epsilon && b.find(g.start()) != std::string::npos)
      check.violations.push_back({i, CnfReason::StartOnRightSide});
  }
  return check;
}

// ---------------------------------------------------------------------------
// CNF conversion on integer symbols: nonterminals >= 0, terminal c -> ~c.

namespace {

using Sym = int;
inline Sym term(char c) { return ~static_cast<int>(static_cast<unsigned char>(c)); }
inline bool is_term(Sym s) { return s < 0; }
inline char term_char(Sym s) { return static_cast<char>(~s); }

struct IntRule {
  int head;
  std::vector<Sym> body;
  bool operator<(const IntRule& o) const { return std::tie(head, body) < std::tie(o.head, o.body); }
  bool operator==(const IntRule& o) const { return head == o.head && body == o.body; }
};

struct ConversionResult {
  CompiledCnf cnf;
  std::vector<char> original_name;  // per id; 0 for fresh nonterminals
};

void prune_useless(CompiledCnf& c, std::vector<char>& names) {
  const int n = c.nonterminal_count;
  std::vector<bool> gen(n, false);
  for (auto [a, h] : c.terminal_rules) gen[h] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : c.binary_rules)
      if (!gen[r.head] && gen[r.left] && gen[r.right]) { gen[r.head] = true; changed = true; }
  }
  std::vector<bool> reach(n, false);
  std::vector<int> stack;
  if (gen[c.start]) { reach[c.start] = true; stack.push_back(c.start); }
  while (!stack.empty()) {
    const int a = stack.back();
    stack.pop_back();
    for (const auto& r : c.binary_rules) {
      if (r.head != a || !gen[r.left] || !gen[r.right]) continue;
      for (int s : {r.left, r.right})
        if (!reach[s]) { reach[s] = true; stack.push_back(s); }
    }
  }
  // Keep the start id even when useless so `start` stays meaningful.
  std::vector<int> remap(n, -1);
  int next = 0;
  std::vector<char> new_names;
  for (int i = 0; i < n; ++i) {
    if (reach[i] || i == c.start) { remap[i] = next++; new_names.push_back(names[i]); }
  }
  CompiledCnf out;
  out.nonterminal_count = next;
  out.start = remap[c.start];
  out.accepts_empty = c.accepts_empty;
  for (auto [a, h] : c.terminal_rules)
    if (reach[h]) out.terminal_rules.push_back({a, remap[h]});
  for (const auto& r : c.binary_rules)
    if (reach[r.head] && reach[r.left] && reach[r.right])
      out.binary_rules.push_back({remap[r.head], remap[r.left], remap[r.right]});
  c = std::move(out);
  names = std::move(new_names);
}

ConversionResult convert(const Cfg& g) {
  const std::string& nts = g.nonterminals();
  std::map<char, int> id;
  std::vector<char> names(nts.begin(), nts.end());
  for (std::size_t i = 0; i < nts.size(); ++i) id[nts[i]] = static_cast<int>(i);
  int count = static_cast<int>(nts.size());

  std::set<IntRule> rules;
  for (const auto& p : g.productions()) {
    IntRule r{id.at(p.head), {}};
    for (char c : p.body) r.body.push_back(is_nonterminal(c) ? id.at(c) : term(c));
    rules.insert(std::move(r));
  }

  // Nullable nonterminals.
  std::vector<bool> nullable(count, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules) {
      if (nullable[r.head]) continue;
      if (std::all_of(r.body.begin(), r.body.end(), [&](Sym s) { return !is_term(s) && nullable[s]; })) {
        nullable[r.head] = true;
        changed = true;
      }
    }
  }
  const int start = id.at(g.start());

  // Epsilon removal: every way of omitting nullable occurrences.
  std::set<IntRule> no_eps;
  for (const auto& r : rules) {
    std::vector<std::size_t> opt;
    for (std::size_t i = 0; i < r.body.size(); ++i)
      if (!is_term(r.body[i]) && nullable[r.body[i]]) opt.push_back(i);
    const std::size_t combos = std::size_t{1} << opt.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      IntRule v{r.head, {}};
      std::size_t k = 0;
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        if (k < opt.size() && opt[k] == i) {
          const bool omit = (mask >> k) & 1;
          ++k;
          if (omit) continue;
        }
        v.body.push_back(r.body[i]);
      }
      if (!v.body.empty()) no_eps.insert(std::move(v));
    }
  }

  // Unit removal via the unit-pair closure.
  std::vector<std::set<int>> unit(count);
  for (int a = 0; a < count; ++a) unit[a].insert(a);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : no_eps) {
      if (r.body.size() != 1 || is_term(r.body[0])) continue;
      for (int a = 0; a < count; ++a) {
        if (!unit[a].count(r.head)) continue;
        if (unit[a].insert(r.body[0]).second) changed = true;
      }
    }
  }
  std::set<IntRule> no_unit;
  for (int a = 0; a < count; ++a)
    for (const auto& r : no_eps) {
      if (!unit[a].count(r.head)) continue;
      if (r.body.size() == 1 && !is_term(r.body[0])) continue;
      no_unit.insert({a, r.body});
    }

  CompiledCnf cnf;
  cnf.start = start;
  cnf.accepts_empty = nullable[start];
  std::map<char, int> lifted;
  auto lift = [&](Sym s) -> int {
    if (!is_term(s)) return s;
    const char c = term_char(s);
    auto it = lifted.find(c);
    if (it != lifted.end()) return it->second;
    const int fresh = count++;
    names.push_back(0);
    lifted[c] = fresh;
    cnf.terminal_rules.push_back({c, fresh});
    return fresh;
  };
  std::set<std::tuple<int, int, int>> binaries;
  std::set<std::pair<char, int>> units;
  for (const auto& r : no_unit) {
    if (r.body.size() == 1) {
      units.insert({term_char(r.body[0]), r.head});
      continue;
    }
    std::vector<int> syms;
    for (Sym s : r.body) syms.push_back(lift(s));
    int head = r.head;
    for (std::size_t i = 0; i + 2 < syms.size(); ++i) {
      const int fresh = count++;
      names.push_back(0);
      binaries.insert({head, syms[i], fresh});
      head = fresh;
    }
    binaries.insert({head, syms[syms.size() - 2], syms.back()});
  }
  for (auto u : units) cnf.terminal_rules.push_back(u);
  for (auto [h, l, r] : binaries) cnf.binary_rules.push_back({h, l, r});
  cnf.nonterminal_count = count;
  prune_useless(cnf, names);
  return {std::move(cnf), std::move(names)};
}

}  // namespace

CompiledCnf compile_cnf(const Cfg& g) { return convert(g).cnf; }

Cfg to_cnf(const Cfg& g) {
  ConversionResult conv = convert(g);
  const CompiledCnf& c = conv.cnf;
  std::string unused;
  for (char l = 'A'; l <= 'Z'; ++l)
    if (std::find(conv.original_name.begin(), conv.original_name.end(), l) == conv.original_name.end())
      unused.push_back(l);
  std::reverse(unused.begin(), unused.end());  // hand out from 'Z' downwards
  auto take = [&]() {
    if (unused.empty()) throw InvalidPayload("CNF conversion needs more than 26 nonterminals");
    const char l = unused.back();
    unused.pop_back();
    return l;
  };
  std::vector<char> name = conv.original_name;
  for (auto& n : name)
    if (n == 0) n = take();

  std::vector<Production> out;
  char start = name[c.start];
  const bool start_on_rhs = std::any_of(c.binary_rules.begin(), c.binary_rules.end(),
                                        [&](const auto& r) { return r.left == c.start || r.right == c.start; });
  if (c.accepts_empty && start_on_rhs) {
    const char fresh_start = take();
    out.push_back({fresh_start, ""});
    for (const auto& r : c.binary_rules)
      if (r.head == c.start) out.push_back({fresh_start, std::string{name[r.left], name[r.right]}});
    for (auto [a, h] : c.terminal_rules)
      if (h == c.start) out.push_back({fresh_start, std::string(1, a)});
    start = fresh_start;
  } else if (c.accepts_empty) {
    out.push_back({start, ""});
  }
  for (const auto& r : c.binary_rules) out.push_back({name[r.head], std::string{name[r.left], name[r.right]}});
  for (auto [a, h] : c.terminal_rules) out.push_back({name[h], std::string(1, a)});
  std::stable_sort(out.begin(), out.end(), [&](const Production& x, const Production& y) {
    return (x.head == start) > (y.head == start);
  });
  return Cfg(start, std::move(out), g.terminals());
}

bool cnf_accepts(const CompiledCnf& g, std::string_view w) {
  const std::size_t n = w.size();
  if (n == 0) return g.accepts_empty;
  const int nt = g.nonterminal_count;
  // table[len-1][i][A]
  std::vector<std::vector<std::vector<char>>> table(n, std::vector<std::vector<char>>(n, std::vector<char>(nt, 0)));
  for (std::size_t i = 0; i < n; ++i)
    for (auto [a, h] : g.terminal_rules)
      if (a == w[i]) table[0][i][h] = 1;
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i)
      for (std::size_t k = 1; k < len; ++k)
        for (const auto& r : g.binary_rules)
          if (table[k - 1][i][r.left] && table[len - k - 1][i + k][r.right]) table[len - 1][i][r.head] = 1;
  return table[n - 1][0][g.start] != 0;
}

CykTable::CykTable(Word word) : word_(std::move(word)) {
  const std::size_t n = word_.size();
  rows_.resize(n);
  for (std::size_t len = 1; len <= n; ++len) rows_[len - 1].resize(n - len + 1);
}

CykTable cyk_decide(const Cfg& g, std::string_view w) {
  const CnfCheck check = is_cnf(g);
  if (!check.ok())
    throw NotCnf("production " + std::to_string(check.violations.front().production + 1) + " violates CNF (" +
                 to_string(check.violations.front().reason) + ")");
  if (w.empty()) throw InvalidPayload("CYK needs a nonempty word");
  CykTable t{Word(w)};
  const std::size_t n = w.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::set<char> cell;
    for (const auto& p : g.productions())
      if (p.body.size() == 1 && p.body[0] == w[i]) cell.insert(p.head);
    t.cell(i, 1) = std::string(cell.begin(), cell.end());
  }
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i) {
      std::set<char> cell;
      for (std::size_t k = 1; k < len; ++k) {
        const std::string& left = t.cell(i, k);
        const std::string& right = t.cell(i + k, len - k);
        for (const auto& p : g.productions())
          if (p.body.size() == 2 && left.find(p.body[0]) != std::string::npos &&
              right.find(p.body[1]) != std::string::npos)
            cell.insert(p.head);
      }
      t.cell(i, len) = std::string(cell.begin(), cell.end());
    }
  return t;
}

}  // namespace formalgrade
