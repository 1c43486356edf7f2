#include "formalgrade/word.hpp"

namespace formalgrade {

std::vector<Word> words_of_length(const Alphabet& sigma, std::size_t length) {
  std::vector<Word> out;
  if (length == 0) return {Word{}};
  if (sigma.empty()) return out;
  const std::string& s = sigma.symbols();
  std::vector<std::size_t> digits(length, 0);
  Word w(length, s[0]);
  while (true) {
    out.push_back(w);
    std::size_t pos = length;
    while (pos > 0) {
      --pos;
      if (++digits[pos] < s.size()) { w[pos] = s[digits[pos]]; break; }
      digits[pos] = 0;
      w[pos] = s[0];
      if (pos == 0) return out;
    }
  }
}

std::uint64_t count_words_up_to(std::size_t k, std::size_t length) {
  std::uint64_t total = 0, power = 1;
  for (std::size_t l = 0; l <= length; ++l) {
    total += power;
    power *= k;
  }
  return total;
}

}  // namespace formalgrade
