#include "formalgrade/pumping.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace formalgrade {

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Cursor {
public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ == text_.size();
  }
  char peek() {
    skip();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool eat(std::string_view token) {
    skip();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }
  char take() {
    skip();
    return text_[pos_++];
  }
  std::int64_t number() {
    skip();
    if (pos_ >= text_.size() || !is_digit(text_[pos_])) fail("a number");
    std::int64_t v = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      v = v * 10 + (text_[pos_++] - '0');
      if (v > 1000000) fail("a smaller number");
    }
    return v;
  }
  [[noreturn]] void fail(const std::string& expected) {
    skip();
    throw SyntaxError(pos_ + 1, expected);
  }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

// term := [nat] ["*"] var | nat
void parse_term(Cursor& c, std::int64_t sign, LinearExpr& e) {
  std::int64_t coeff = 1;
  bool have_number = false;
  if (is_digit(c.peek())) {
    coeff = c.number();
    have_number = true;
    c.eat("*");
  }
  if (is_lower(c.peek())) {
    e.terms.push_back({sign * coeff, c.take()});
  } else if (have_number) {
    e.constant += sign * coeff;
  } else {
    c.fail("a number or a variable");
  }
}

LinearExpr parse_expr(Cursor& c) {
  LinearExpr e;
  std::int64_t sign = 1;
  if (c.eat("-")) sign = -1;
  parse_term(c, sign, e);
  while (true) {
    if (c.eat("+")) parse_term(c, 1, e);
    else if (c.eat("-")) parse_term(c, -1, e);
    else break;
  }
  return e;
}

Relation parse_relation(Cursor& c) {
  if (c.eat("<=")) return Relation::Le;
  if (c.eat(">=")) return Relation::Ge;
  if (c.eat("!=")) return Relation::Ne;
  if (c.eat("<")) return Relation::Lt;
  if (c.eat(">")) return Relation::Gt;
  if (c.eat("=")) return Relation::Eq;
  c.fail("one of = != < <= > >=");
}

std::string print_expr(const LinearExpr& e) {
  std::string out;
  for (const auto& t : e.terms) {
    const std::int64_t mag = t.coeff < 0 ? -t.coeff : t.coeff;
    if (out.empty()) out += t.coeff < 0 ? "-" : "";
    else out += t.coeff < 0 ? " - " : " + ";
    if (mag != 1) out += std::to_string(mag);
    out += t.var;
  }
  if (e.constant != 0 || out.empty()) {
    const std::int64_t mag = e.constant < 0 ? -e.constant : e.constant;
    if (out.empty()) out += (e.constant < 0 ? "-" : "") + std::to_string(mag);
    else out += (e.constant < 0 ? " - " : " + ") + std::to_string(mag);
  }
  return out;
}

const char* relation_text(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Ne: return "!=";
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Gt: return ">";
    case Relation::Ge: return ">=";
  }
  return "=";
}

using Assignment = std::map<char, std::int64_t>;

std::int64_t eval(const LinearExpr& e, const Assignment& a) {
  std::int64_t v = e.constant;
  for (const auto& t : e.terms) v += t.coeff * a.at(t.var);
  return v;
}

bool holds(const Constraint& c, const Assignment& a) {
  const std::int64_t l = eval(c.lhs, a), r = eval(c.rhs, a);
  switch (c.rel) {
    case Relation::Eq: return l == r;
    case Relation::Ne: return l != r;
    case Relation::Lt: return l < r;
    case Relation::Le: return l <= r;
    case Relation::Gt: return l > r;
    case Relation::Ge: return l >= r;
  }
  return false;
}

bool satisfied(const ArithLang& lang, const Assignment& a) {
  return std::all_of(lang.constraints.begin(), lang.constraints.end(), [&](const Constraint& c) { return holds(c, a); });
}

}  // namespace

Alphabet ArithLang::alphabet() const {
  std::string s;
  for (const auto& b : blocks) s.push_back(b.symbol);
  return Alphabet(s);
}

std::string ArithLang::variables() const {
  std::string s;
  for (const auto& b : blocks)
    if (b.var) s.push_back(*b.var);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::int64_t ArithLang::max_constant() const {
  std::int64_t m = 0;
  for (const auto& b : blocks)
    if (!b.var) m = std::max(m, b.constant);
  for (const auto& c : constraints)
    for (const LinearExpr* e : {&c.lhs, &c.rhs}) {
      m = std::max(m, e->constant < 0 ? -e->constant : e->constant);
      for (const auto& t : e->terms) m = std::max(m, (t.coeff < 0 ? -t.coeff : t.coeff) - 1);
    }
  return m;
}

ArithLang parse_arith_lang(std::string_view text) {
  Cursor c(text);
  ArithLang lang;
  while (!c.done() && c.peek() != '|') {
    const char sym = c.peek();
    if (!is_symbol_char(sym)) c.fail("a terminal symbol");
    c.take();
    PatternBlock b{sym, std::nullopt, 1};
    if (c.eat("^")) {
      if (c.eat("(")) {
        if (is_lower(c.peek())) b.var = c.take();
        else b.constant = c.number();
        if (!c.eat(")")) c.fail("')'");
      } else if (is_lower(c.peek())) {
        b.var = c.take();
      } else {
        b.constant = c.number();
      }
    }
    lang.blocks.push_back(b);
  }
  if (lang.blocks.empty()) c.fail("a terminal symbol");
  if (c.eat("|")) {
    do {
      Constraint k;
      k.lhs = parse_expr(c);
      k.rel = parse_relation(c);
      k.rhs = parse_expr(c);
      lang.constraints.push_back(std::move(k));
    } while (c.eat(","));
  }
  if (!c.done()) c.fail("',' or end of input");
  const std::string vars = lang.variables();
  for (const auto& k : lang.constraints)
    for (const LinearExpr* e : {&k.lhs, &k.rhs})
      for (const auto& t : e->terms)
        if (vars.find(t.var) == std::string::npos)
          throw InvalidDocument(std::string("constraint variable '") + t.var + "' is not an exponent of any block");
  return lang;
}

std::string print_arith_lang(const ArithLang& lang) {
  std::string out;
  for (const auto& b : lang.blocks) {
    if (!out.empty()) out += ' ';
    out += b.symbol;
    if (b.var) out += std::string("^") + *b.var;
    else if (b.constant != 1) out += "^" + std::to_string(b.constant);
  }
  for (std::size_t i = 0; i < lang.constraints.size(); ++i) {
    out += i ? ", " : " | ";
    const auto& k = lang.constraints[i];
    out += print_expr(k.lhs) + " " + relation_text(k.rel) + " " + print_expr(k.rhs);
  }
  return out;
}

bool arith_member(const ArithLang& lang, std::string_view w) {
  Assignment a;
  // Try every run length for each block in turn; words are short.
  std::function<bool(std::size_t, std::size_t)> match = [&](std::size_t k, std::size_t pos) -> bool {
    if (k == lang.blocks.size()) return pos == w.size() && satisfied(lang, a);
    const PatternBlock& b = lang.blocks[k];
    std::size_t run = 0;
    while (pos + run < w.size() && w[pos + run] == b.symbol) ++run;
    auto fits = [&](std::int64_t len) { return len >= 0 && static_cast<std::size_t>(len) <= run; };
    if (!b.var) return fits(b.constant) && match(k + 1, pos + static_cast<std::size_t>(b.constant));
    if (auto it = a.find(*b.var); it != a.end()) return fits(it->second) && match(k + 1, pos + static_cast<std::size_t>(it->second));
    for (std::size_t len = 0; len <= run; ++len) {
      a[*b.var] = static_cast<std::int64_t>(len);
      if (match(k + 1, pos + len)) {
        a.erase(*b.var);
        return true;
      }
    }
    a.erase(*b.var);
    return false;
  };
  return match(0, 0);
}

std::vector<Word> arith_words(const ArithLang& lang, std::size_t min_len, std::size_t max_len) {
  const std::string vars = lang.variables();
  std::vector<Word> out;
  Assignment a;
  std::function<void(std::size_t)> assign = [&](std::size_t v) {
    // length so far with unassigned variables at zero
    std::size_t len = 0;
    for (const auto& b : lang.blocks) {
      if (!b.var) len += static_cast<std::size_t>(b.constant);
      else if (auto it = a.find(*b.var); it != a.end()) len += static_cast<std::size_t>(it->second);
    }
    if (len > max_len) return;
    if (v == vars.size()) {
      if (len < min_len || !satisfied(lang, a)) return;
      Word w;
      for (const auto& b : lang.blocks)
        w.append(static_cast<std::size_t>(b.var ? a.at(*b.var) : b.constant), b.symbol);
      out.push_back(std::move(w));
      return;
    }
    for (std::int64_t x = 0; x <= static_cast<std::int64_t>(max_len); ++x) {
      a[vars[v]] = x;
      std::size_t grown = 0;
      for (const auto& b : lang.blocks)
        if (b.var == vars[v]) grown += static_cast<std::size_t>(x);
      if (x > 0 && grown == 0) break;
      if (len + grown > max_len) break;
      assign(v + 1);
    }
    a.erase(vars[v]);
  };
  assign(0);
  std::sort(out.begin(), out.end(), ShortLex{});
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Word WordTemplate::instantiate(std::int64_t n) const {
  Word w;
  for (const auto& b : blocks) {
    const std::int64_t len = b.coeff * n + b.constant;
    if (len > 0) w.append(static_cast<std::size_t>(len), b.symbol);
  }
  return w;
}

WordTemplate parse_word_template(std::string_view text) {
  Cursor c(text);
  WordTemplate t;
  auto affine = [&](TemplateBlock& b) {
    b.constant = 0;
    std::int64_t sign = 1;
    do {
      std::int64_t k = 1;
      bool number = false;
      if (is_digit(c.peek())) {
        k = c.number();
        number = true;
        c.eat("*");
      }
      if (c.eat("n")) b.coeff += sign * k;
      else if (number) b.constant += sign * k;
      else c.fail("a number or 'n'");
      if (c.eat("+")) sign = 1;
      else if (c.eat("-")) sign = -1;
      else break;
    } while (true);
  };
  while (!c.done()) {
    const char sym = c.peek();
    if (!is_symbol_char(sym)) c.fail("a terminal symbol");
    c.take();
    TemplateBlock b{sym, 0, 1};
    if (c.eat("^")) {
      if (c.eat("(")) {
        affine(b);
        if (!c.eat(")")) c.fail("')'");
      } else if (c.eat("n")) {
        b.coeff = 1;
        b.constant = 0;
      } else {
        b.constant = c.number();
      }
    }
    t.blocks.push_back(b);
  }
  if (t.blocks.empty()) c.fail("a terminal symbol");
  return t;
}

std::string print_word_template(const WordTemplate& t) {
  std::string out;
  for (const auto& b : t.blocks) {
    if (!out.empty()) out += ' ';
    out += b.symbol;
    if (b.coeff == 0) {
      if (b.constant != 1) out += "^" + std::to_string(b.constant);
      continue;
    }
    std::string e = (b.coeff == 1 ? "" : std::to_string(b.coeff)) + "n";
    if (b.constant > 0) e += "+" + std::to_string(b.constant);
    if (b.constant < 0) e += "-" + std::to_string(-b.constant);
    out += (e == "n") ? "^n" : "^(" + e + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Game

std::string to_string(Claim c) { return c == Claim::Regular ? "regular" : "nonregular"; }

std::string to_string(GamePhase p) {
  switch (p) {
    case GamePhase::ChooseClaim: return "claim";
    case GamePhase::ChooseBound: return "bound";
    case GamePhase::ChooseWord: return "word";
    case GamePhase::ChooseSplit: return "split";
    case GamePhase::ChoosePump: return "pump";
    case GamePhase::Over: return "over";
  }
  return "claim";
}

std::string to_string(Winner w) {
  switch (w) {
    case Winner::Undecided: return "undecided";
    case Winner::Student: return "student";
    case Winner::Tutor: return "tutor";
  }
  return "undecided";
}

Word pump(const Word& w, const Split& s, int i) {
  Word out = w.substr(0, s.x);
  for (int k = 0; k < i; ++k) out += w.substr(s.x, s.y);
  out += w.substr(s.x + s.y);
  return out;
}

int tutor_bound(const ArithLang& lang) {
  return static_cast<int>(lang.blocks.size()) * static_cast<int>(lang.max_constant() + 1);
}

namespace {

std::string show(const Word& w) { return w.empty() ? "eps" : w; }

std::string describe_split(const Word& w, const Split& s) {
  return "x = " + show(w.substr(0, s.x)) + ", y = " + show(w.substr(s.x, s.y)) + ", z = " + show(w.substr(s.x + s.y));
}

std::vector<Split> legal_splits(const Word& w, int n) {
  std::vector<Split> out;
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t y = 1; x + y <= w.size() && x + y <= static_cast<std::size_t>(n); ++y) out.push_back({x, y});
  return out;
}

// Pump counts in [0, max_i] for which x y^i z leaves the language.
std::vector<int> breaking_pumps(const ArithLang& lang, const Word& w, const Split& s, int max_i) {
  std::vector<int> out;
  for (int i = 0; i <= max_i; ++i)
    if (!arith_member(lang, pump(w, s, i))) out.push_back(i);
  return out;
}

void finish(GameState& s, Winner w) {
  s.winner = w;
  s.phase = GamePhase::Over;
  s.transcript.push_back(to_string(w) + " wins");
}

// Tutor's word for a regular language under a student-chosen bound: the
// word with the fewest pumpable splits.
std::optional<Word> hardest_word(const ArithLang& lang, int n) {
  constexpr std::size_t kCandidates = 48;
  std::vector<Word> words = arith_words(lang, static_cast<std::size_t>(n), static_cast<std::size_t>(n) + kWordSearchSlack);
  if (words.empty()) return std::nullopt;
  if (words.size() > kCandidates) words.resize(kCandidates);
  std::optional<Word> best;
  std::size_t best_count = 0;
  for (const Word& w : words) {
    std::size_t count = 0;
    for (const Split& s : legal_splits(w, n))
      if (breaking_pumps(lang, w, s, n + 2).empty()) ++count;
    if (!best || count < best_count) {
      best = w;
      best_count = count;
      if (count == 0) break;
    }
  }
  return best;
}

}  // namespace

GameState pumping_game_step(const PumpingPayload& p, const GameState& state, const GameMove& move) {
  using K = GameMove::Kind;
  GameState s = state;
  const ArithLang& lang = p.language;
  auto expect = [&](GamePhase phase, K kind) {
    if (s.phase == GamePhase::Over) throw IllegalMove("the game is over");
    if (s.phase != phase || move.kind != kind)
      throw IllegalMove("a " + to_string(s.phase) + " move is expected now");
  };

  switch (s.phase) {
    case GamePhase::ChooseClaim: {
      expect(GamePhase::ChooseClaim, K::Claim);
      s.claim = move.claim;
      s.transcript.push_back(move.claim == Claim::Regular ? "student claims the language is regular"
                                                          : "student claims the language is not regular");
      if (move.claim == Claim::Regular) {
        s.phase = GamePhase::ChooseBound;
        return s;
      }
      const int n = tutor_bound(lang);
      s.n = n;
      s.transcript.push_back("tutor picks n = " + std::to_string(n));
      if (arith_words(lang, static_cast<std::size_t>(n), static_cast<std::size_t>(n) + kWordSearchSlack).empty()) {
        s.transcript.push_back("no word of the language has length at least n");
        finish(s, Winner::Tutor);
        return s;
      }
      s.phase = GamePhase::ChooseWord;
      return s;
    }
    case GamePhase::ChooseBound: {
      expect(GamePhase::ChooseBound, K::Bound);
      if (move.n < 1 || move.n > kMaxBound)
        throw IllegalMove("n must lie between 1 and " + std::to_string(kMaxBound));
      s.n = move.n;
      s.transcript.push_back("student picks n = " + std::to_string(move.n));
      std::optional<Word> w;
      if (!p.regular) {
        if (!p.unpumpable) throw InvalidPayload("a non-regular pumping language needs an unpumpable word");
        w = p.unpumpable->instantiate(move.n);
        if (!arith_member(lang, *w) || w->size() < static_cast<std::size_t>(move.n))
          throw InvalidPayload("the unpumpable word for n = " + std::to_string(move.n) + " is not a long enough member");
      } else {
        w = hardest_word(lang, move.n);
      }
      if (!w) {
        s.transcript.push_back("no word of the language has length at least n");
        finish(s, Winner::Student);
        return s;
      }
      s.w = *w;
      s.transcript.push_back("tutor picks w = " + show(*w));
      s.phase = GamePhase::ChooseSplit;
      return s;
    }
    case GamePhase::ChooseWord: {
      expect(GamePhase::ChooseWord, K::Word);
      if (!lang.alphabet().admits(move.word)) throw IllegalMove("w uses a symbol outside the alphabet");
      if (move.word.size() < static_cast<std::size_t>(*s.n))
        throw IllegalMove("w must have length at least n = " + std::to_string(*s.n));
      if (!arith_member(lang, move.word)) throw IllegalMove("w is not in the language");
      s.w = move.word;
      s.transcript.push_back("student picks w = " + show(move.word));
      // A split that pumps for every allowed i if one exists, otherwise the
      // one with the fewest breaking pump counts.
      std::optional<Split> choice;
      std::size_t fewest = 0;
      for (const Split& sp : legal_splits(move.word, *s.n)) {
        const std::size_t breaks = breaking_pumps(lang, move.word, sp, kMaxPump).size();
        if (!choice || breaks < fewest) {
          choice = sp;
          fewest = breaks;
          if (breaks == 0) break;
        }
      }
      s.split = *choice;
      s.transcript.push_back("tutor splits w into " + describe_split(move.word, *choice));
      s.phase = GamePhase::ChoosePump;
      return s;
    }
    case GamePhase::ChooseSplit: {
      expect(GamePhase::ChooseSplit, K::Split);
      const Word& w = *s.w;
      const Split sp = move.split;
      if (sp.y == 0) throw IllegalMove("y must not be empty");
      if (sp.x + sp.y > w.size()) throw IllegalMove("x y must be a prefix of w");
      if (sp.x + sp.y > static_cast<std::size_t>(*s.n)) throw IllegalMove("|xy| must not exceed n");
      s.split = sp;
      s.transcript.push_back("student splits w into " + describe_split(w, sp));
      const std::vector<int> breaks = breaking_pumps(lang, w, sp, *s.n + 2);
      if (breaks.empty()) {
        s.transcript.push_back("every i from 0 to " + std::to_string(*s.n + 2) + " keeps x y^i z in the language");
        finish(s, Winner::Student);
        return s;
      }
      s.i = breaks.front();
      s.transcript.push_back("tutor picks i = " + std::to_string(breaks.front()) + ": x y^i z = " +
                             show(pump(w, sp, breaks.front())) + " is not in the language");
      finish(s, Winner::Tutor);
      return s;
    }
    case GamePhase::ChoosePump: {
      expect(GamePhase::ChoosePump, K::Pump);
      if (move.i < 0 || move.i > kMaxPump) throw IllegalMove("i must lie between 0 and " + std::to_string(kMaxPump));
      s.i = move.i;
      const Word pumped = pump(*s.w, *s.split, move.i);
      const bool in = arith_member(lang, pumped);
      s.transcript.push_back("student picks i = " + std::to_string(move.i) + ": x y^i z = " + show(pumped) +
                             (in ? " is in the language" : " is not in the language"));
      finish(s, in ? Winner::Tutor : Winner::Student);
      return s;
    }
    case GamePhase::Over:
      throw IllegalMove("the game is over");
  }
  return s;
}

GameState replay_game(const PumpingPayload& p, const std::vector<GameMove>& moves) {
  GameState s;
  for (const GameMove& m : moves) s = pumping_game_step(p, s, m);
  return s;
}

const std::vector<SampleLanguage>& sample_languages() {
  static const std::vector<SampleLanguage> samples = {
      {"a^i", true, ""},
      {"a^i b^j", true, ""},
      {"a^2 b^i", true, ""},
      {"a^i b^j | i >= 3", true, ""},
      {"a^i b^j | i + j >= 2", true, ""},
      {"a^i b^j | i < j", false, "a^n b^(n+1)"},
      {"a^i b^j | i = j", false, "a^n b^n"},
      {"a^i b^j c^k | i = j, j = k", false, "a^n b^n c^n"},
      {"a^i b^j | j = 2i", false, "a^n b^(2n)"},
  };
  return samples;
}

PumpingPayload to_payload(const SampleLanguage& s) {
  PumpingPayload p{parse_arith_lang(s.language), s.regular, std::nullopt};
  if (!s.unpumpable.empty()) p.unpumpable = parse_word_template(s.unpumpable);
  return p;
}

}  // namespace formalgrade
