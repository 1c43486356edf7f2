#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace formalgrade {

// Root of every error the engine raises. `code()` is a stable kebab-case tag
// that ends up in documents and HTTP responses.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

class SyntaxError : public Error {
public:
  // `column` is 1-based; `line` is 1-based, 0 when the input is single-line.
  SyntaxError(std::size_t column, std::string expected, std::size_t line = 0)
      : Error("syntax-error", format(column, expected, line)),
        column_(column), line_(line), expected_(std::move(expected)) {}

  std::size_t column() const noexcept { return column_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& expected() const noexcept { return expected_; }

private:
  static std::string format(std::size_t column, const std::string& expected, std::size_t line) {
    std::string where = line ? "line " + std::to_string(line) + ", column " + std::to_string(column)
                             : "column " + std::to_string(column);
    return "syntax error at " + where + ": expected " + expected;
  }

  std::size_t column_;
  std::size_t line_;
  std::string expected_;
};

class AlphabetError : public Error {
public:
  explicit AlphabetError(char symbol)
      : Error("alphabet-error", std::string("symbol '") + symbol + "' is not in the alphabet"),
        symbol_(symbol) {}
  char symbol() const noexcept { return symbol_; }

private:
  char symbol_;
};

class InvalidDocument : public Error {
public:
  explicit InvalidDocument(const std::string& what) : Error("invalid-document", what) {}
};

class EmptyLanguage : public Error {
public:
  EmptyLanguage() : Error("empty-language", "the start symbol derives no terminal word") {}
};

class NotCnf : public Error {
public:
  explicit NotCnf(const std::string& what) : Error("not-cnf", what) {}
};

class EncodingError : public Error {
public:
  explicit EncodingError(const std::string& what) : Error("encoding-error", what) {}
};

class ArityMismatch : public Error {
public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : Error("arity-mismatch", "expected " + std::to_string(expected) + " values, got " +
                                    std::to_string(got)) {}
};

class IllegalMove : public Error {
public:
  explicit IllegalMove(const std::string& reason) : Error("illegal-move", reason) {}
};

class InvalidBlockLabel : public Error {
public:
  explicit InvalidBlockLabel(const std::string& label)
      : Error("not-a-subexpression", "block label '" + label + "' is not a subexpression of the goal"),
        label_(label) {}
  const std::string& label() const noexcept { return label_; }

private:
  std::string label_;
};

class InvalidPayload : public Error {
public:
  explicit InvalidPayload(const std::string& what) : Error("invalid-payload", what) {}
};

class InvalidAttempt : public Error {
public:
  explicit InvalidAttempt(const std::string& what) : Error("invalid-attempt", what) {}
};

class BudgetTooSmall : public Error {
public:
  BudgetTooSmall()
      : Error("budget-too-small", "no word length beyond 0 could be decided within the budget") {}
};

class NoCandidateInBand : public Error {
public:
  NoCandidateInBand(int d_min, int d_max)
      : Error("no-candidate-in-band", "no usable candidate with difficulty in [" +
                                          std::to_string(d_min) + ", " + std::to_string(d_max) + "]") {}
};

}  // namespace formalgrade
