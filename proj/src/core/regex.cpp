#include "formalgrade/regex.hpp"

#include <cctype>

namespace formalgrade {

Regex Regex::make(Kind kind, char symbol, std::vector<Regex> children) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->symbol = symbol;
  for (const auto& c : children) node->size += c.size();
  node->children = std::move(children);
  return Regex(std::move(node));
}

Regex Regex::empty() { return make(Kind::Empty, 0, {}); }
Regex Regex::epsilon() { return make(Kind::Epsilon, 0, {}); }
Regex Regex::literal(char symbol) { return make(Kind::Literal, symbol, {}); }
Regex Regex::concat(Regex left, Regex right) {
  return make(Kind::Concat, 0, {std::move(left), std::move(right)});
}
Regex Regex::alt(Regex left, Regex right) {
  return make(Kind::Union, 0, {std::move(left), std::move(right)});
}
Regex Regex::star(Regex inner) { return make(Kind::Star, 0, {std::move(inner)}); }

bool Regex::operator==(const Regex& other) const noexcept {
  if (node_ == other.node_) return true;
  if (kind() != other.kind() || size() != other.size()) return false;
  switch (kind()) {
    case Kind::Empty:
    case Kind::Epsilon: return true;
    case Kind::Literal: return symbol() == other.symbol();
    case Kind::Star: return inner() == other.inner();
    case Kind::Concat:
    case Kind::Union: return left() == other.left() && right() == other.right();
  }
  return false;
}

bool Regex::has_subexpression(const Regex& candidate) const {
  if (*this == candidate) return true;
  for (const auto& c : node_->children)
    if (c.has_subexpression(candidate)) return true;
  return false;
}

Alphabet Regex::symbols() const {
  std::string out;
  std::vector<const Regex*> stack{this};
  while (!stack.empty()) {
    const Regex* r = stack.back();
    stack.pop_back();
    if (r->kind() == Kind::Literal) out.push_back(r->symbol());
    for (const auto& c : r->node_->children) stack.push_back(&c);
  }
  return Alphabet(out);
}

namespace {

// Keywords are lexed greedily, so juxtaposed literals such as e,p,s need a
// separating space. A space is needed exactly when a keyword occurrence
// would straddle the join point.
bool needs_separator(const std::string& left, const std::string& right) {
  const std::size_t keep = 4;
  const std::string tail = left.substr(left.size() > keep ? left.size() - keep : 0);
  const std::string joined = tail + right.substr(0, keep);
  const std::size_t boundary = tail.size();
  for (std::string_view kw : {std::string_view("eps"), std::string_view("empty")}) {
    for (std::size_t pos = joined.find(kw); pos != std::string::npos; pos = joined.find(kw, pos + 1)) {
      if (pos < boundary && pos + kw.size() > boundary) return true;
    }
  }
  return false;
}

std::string join(const std::string& left, const std::string& right) {
  return needs_separator(left, right) ? left + " " + right : left + right;
}

std::string print_node(const Regex& re) {
  using K = Regex::Kind;
  switch (re.kind()) {
    case K::Empty: return "empty";
    case K::Epsilon: return "eps";
    case K::Literal: return std::string(1, re.symbol());
    case K::Union: {
      std::string r = print_node(re.right());
      if (re.right().kind() == K::Union) r = "(" + r + ")";
      return print_node(re.left()) + "|" + r;
    }
    case K::Concat: {
      std::string l = print_node(re.left());
      std::string r = print_node(re.right());
      if (re.left().kind() == K::Union) l = "(" + l + ")";
      if (re.right().kind() == K::Union || re.right().kind() == K::Concat) r = "(" + r + ")";
      return join(l, r);
    }
    case K::Star: {
      std::string i = print_node(re.inner());
      if (re.inner().kind() == K::Union || re.inner().kind() == K::Concat) i = "(" + i + ")";
      return i + "*";
    }
  }
  return {};
}

class RegexParser {
public:
  RegexParser(std::string_view text, const Alphabet* alphabet) : text_(text), alphabet_(alphabet) {}

  Regex parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("a regular expression");
    Regex re = parse_alt();
    skip_ws();
    if (pos_ < text_.size()) fail(text_[pos_] == ')' ? "end of input (unbalanced ')')" : "'|', '*' or a symbol");
    return re;
  }

private:
  [[noreturn]] void fail(const std::string& expected) const { throw SyntaxError(pos_ + 1, expected); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_keyword(std::string_view kw) const { return text_.substr(pos_, kw.size()) == kw; }

  bool at_atom_start() {
    skip_ws();
    return pos_ < text_.size() && (text_[pos_] == '(' || is_symbol_char(text_[pos_]));
  }

  Regex parse_alt() {
    Regex re = parse_cat();
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '|') {
      ++pos_;
      re = Regex::alt(std::move(re), parse_cat());
      skip_ws();
    }
    return re;
  }

  Regex parse_cat() {
    if (!at_atom_start()) fail("a symbol, 'eps', 'empty' or '('");
    Regex re = parse_rep();
    while (at_atom_start()) re = Regex::concat(std::move(re), parse_rep());
    return re;
  }

  Regex parse_rep() {
    Regex re = parse_atom();
    skip_ws();
    while (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
      re = Regex::star(std::move(re));
      skip_ws();
    }
    return re;
  }

  Regex parse_atom() {
    skip_ws();
    if (text_[pos_] == '(') {
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size()) fail("a regular expression");
      Regex inner = parse_alt();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("')'");
      ++pos_;
      return inner;
    }
    if (at_keyword("empty")) { pos_ += 5; return Regex::empty(); }
    if (at_keyword("eps")) { pos_ += 3; return Regex::epsilon(); }
    const char c = text_[pos_];
    if (alphabet_ && !alphabet_->contains(c)) throw AlphabetError(c);
    ++pos_;
    return Regex::literal(c);
  }

  std::string_view text_;
  const Alphabet* alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Regex::print() const { return print_node(*this); }

Regex parse_regex(std::string_view text, const Alphabet& alphabet) {
  return RegexParser(text, &alphabet).parse();
}

Regex parse_regex(std::string_view text) { return RegexParser(text, nullptr).parse(); }

std::string to_tree_string(const Regex& re) {
  using K = Regex::Kind;
  switch (re.kind()) {
    case K::Empty: return "Empty";
    case K::Epsilon: return "Epsilon";
    case K::Literal: return std::string("Lit ") + re.symbol();
    case K::Star: return "Star(" + to_tree_string(re.inner()) + ")";
    case K::Concat: return "Concat(" + to_tree_string(re.left()) + ", " + to_tree_string(re.right()) + ")";
    case K::Union: return "Union(" + to_tree_string(re.left()) + ", " + to_tree_string(re.right()) + ")";
  }
  return {};
}

}  // namespace formalgrade
