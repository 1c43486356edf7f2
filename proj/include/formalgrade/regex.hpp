#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "formalgrade/word.hpp"

namespace formalgrade {

// Immutable regular-expression tree. Copies share structure.
//
// Concrete syntax:
//   re   := alt
//   alt  := cat ("|" cat)*
//   cat  := rep+
//   rep  := atom "*"*
//   atom := symbol | "eps" | "empty" | "(" alt ")"
// Symbols are single lowercase letters or digits; whitespace separates tokens
// and is otherwise ignored. Union and concatenation associate to the left.
class Regex {
public:
  enum class Kind { Empty, Epsilon, Literal, Concat, Union, Star };

  static Regex empty();
  static Regex epsilon();
  static Regex literal(char symbol);
  static Regex concat(Regex left, Regex right);
  static Regex alt(Regex left, Regex right);
  static Regex star(Regex inner);

  Kind kind() const noexcept { return node_->kind; }
  char symbol() const noexcept { return node_->symbol; }
  const Regex& left() const noexcept { return node_->children[0]; }
  const Regex& right() const noexcept { return node_->children[1]; }
  const Regex& inner() const noexcept { return node_->children[0]; }

  // Node count.
  std::size_t size() const noexcept { return node_->size; }
  // Symbols occurring in literals.
  Alphabet symbols() const;

  bool operator==(const Regex& other) const noexcept;

  // True iff `candidate` occurs as a subtree (structural equality).
  bool has_subexpression(const Regex& candidate) const;

  // Canonical concrete syntax with minimal parentheses; parse(print()) == *this.
  std::string print() const;

private:
  struct Node {
    Kind kind;
    char symbol = 0;
    std::vector<Regex> children;
    std::size_t size = 1;
  };
  explicit Regex(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Regex make(Kind kind, char symbol, std::vector<Regex> children);

  std::shared_ptr<const Node> node_;
};

// Parses concrete syntax. Throws SyntaxError (1-based column) on malformed
// input and AlphabetError when a symbol lies outside `alphabet`.
Regex parse_regex(std::string_view text, const Alphabet& alphabet);

// Parses without an alphabet restriction (any symbol character allowed).
Regex parse_regex(std::string_view text);

// Debug form, e.g. Concat(Star(Lit a), Lit b).
std::string to_tree_string(const Regex& re);

}  // namespace formalgrade
