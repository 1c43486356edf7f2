#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "formalgrade/error.hpp"

namespace formalgrade {

// A word is a sequence of single-character symbols.
using Word = std::string;

// Shortlex order: shorter first, then lexicographic.
struct ShortLex {
  bool operator()(std::string_view a, std::string_view b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

using WordSet = std::set<Word, ShortLex>;

inline bool is_symbol_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

// Finite, sorted, duplicate-free symbol set.
class Alphabet {
public:
  Alphabet() = default;
  Alphabet(std::initializer_list<char> symbols) : Alphabet(std::string(symbols)) {}
  explicit Alphabet(std::string_view symbols) : symbols_(symbols) {
    std::sort(symbols_.begin(), symbols_.end());
    symbols_.erase(std::unique(symbols_.begin(), symbols_.end()), symbols_.end());
  }

  bool contains(char c) const noexcept {
    return std::binary_search(symbols_.begin(), symbols_.end(), c);
  }
  void check(std::string_view w) const {
    for (char c : w)
      if (!contains(c)) throw AlphabetError(c);
  }
  bool admits(std::string_view w) const noexcept {
    return std::all_of(w.begin(), w.end(), [&](char c) { return contains(c); });
  }
  Alphabet merged(const Alphabet& other) const { return Alphabet(symbols_ + other.symbols_); }

  const std::string& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }
  bool empty() const noexcept { return symbols_.empty(); }
  auto begin() const noexcept { return symbols_.begin(); }
  auto end() const noexcept { return symbols_.end(); }

  bool operator==(const Alphabet&) const = default;

private:
  std::string symbols_;
};

// All words of exactly `length` over `sigma`, in lexicographic order.
std::vector<Word> words_of_length(const Alphabet& sigma, std::size_t length);

// Number of words of length <= `length` over an alphabet of `k` symbols.
std::uint64_t count_words_up_to(std::size_t k, std::size_t length);

// Exact non-negative fraction, always normalized.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
    if (den < 0) { num = -num; den = -den; }
    if (den == 0) { num = 0; den = 1; }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
  friend bool operator<(Rational a, Rational b) { return a.num * b.den < b.num * a.den; }
};

// Integer points for `fraction` of `max_points`, rounding halves up.
inline int round_half_up(int max_points, Rational fraction) {
  const std::int64_t scaled = 2 * static_cast<std::int64_t>(max_points) * fraction.num + fraction.den;
  return static_cast<int>(scaled / (2 * fraction.den));
}

using Clock = std::chrono::steady_clock;

// A point in time after which budgeted work stops. Passed by value.
class Deadline {
public:
  static Deadline never() { return Deadline(Clock::time_point::max()); }
  static Deadline after(Clock::duration budget) {
    const auto now = Clock::now();
    if (budget >= Clock::time_point::max() - now) return never();
    return Deadline(now + budget);
  }
  explicit Deadline(Clock::time_point at) : at_(at) {}

  bool expired() const { return at_ != Clock::time_point::max() && Clock::now() >= at_; }
  bool unlimited() const { return at_ == Clock::time_point::max(); }
  Clock::time_point at() const { return at_; }

private:
  Clock::time_point at_;
};

}  // namespace formalgrade
