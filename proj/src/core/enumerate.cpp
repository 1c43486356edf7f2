#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>

#include "formalgrade/cfg.hpp"

namespace formalgrade {

namespace {

// CYK table grown one column per appended symbol, so all words sharing a
// prefix share the work for it. Cell (i, j) holds the nonterminals deriving
// word[i, j) as a bitset of `words_` 64-bit blocks.
class IncrementalCyk {
public:
  IncrementalCyk(const CompiledCnf& g, std::size_t max_len)
      : g_(g), n_(max_len), words_((static_cast<std::size_t>(g.nonterminal_count) + 63) / 64),
        cells_((max_len + 1) * (max_len + 1) * words_, 0), by_left_(g.nonterminal_count) {
    for (const auto& r : g.binary_rules) by_left_[r.left].push_back({r.head, r.right});
    for (auto [a, h] : g.terminal_rules) {
      auto& mask = unit_[static_cast<unsigned char>(a)];
      if (mask.empty()) mask.assign(words_, 0);
      mask[h / 64] |= std::uint64_t{1} << (h % 64);
    }
  }

  // Places `c` at position `pos` and fills column pos+1.
  void push(std::size_t pos, char c) {
    const std::size_t j = pos + 1;
    std::uint64_t* diag = cell(pos, j);
    const auto& mask = unit_[static_cast<unsigned char>(c)];
    for (std::size_t k = 0; k < words_; ++k) diag[k] = mask.empty() ? 0 : mask[k];
    for (std::size_t i = pos; i-- > 0;) {
      std::uint64_t* out = cell(i, j);
      std::fill(out, out + words_, 0);
      for (std::size_t k = i + 1; k < j; ++k) combine(cell(i, k), cell(k, j), out);
    }
  }

  bool accepts(std::size_t len) const {
    const std::uint64_t* c = cell(0, len);
    return (c[g_.start / 64] >> (g_.start % 64)) & 1;
  }

private:
  std::uint64_t* cell(std::size_t i, std::size_t j) { return &cells_[(j * (n_ + 1) + i) * words_]; }
  const std::uint64_t* cell(std::size_t i, std::size_t j) const { return &cells_[(j * (n_ + 1) + i) * words_]; }

  void combine(const std::uint64_t* left, const std::uint64_t* right, std::uint64_t* out) const {
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = left[w];
      while (bits) {
        const int b = static_cast<int>(w * 64) + __builtin_ctzll(bits);
        bits &= bits - 1;
        for (auto [head, r] : by_left_[b])
          if ((right[r / 64] >> (r % 64)) & 1) out[head / 64] |= std::uint64_t{1} << (head % 64);
      }
    }
  }

  const CompiledCnf& g_;
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> cells_;
  std::vector<std::vector<std::pair<int, int>>> by_left_;
  std::vector<std::uint64_t> unit_[256];
};

struct PrefixJob {
  const CompiledCnf& g;
  const std::string& sigma;
  std::size_t length;
  Deadline deadline;
  std::atomic<bool>& stop;
};

void complete(const PrefixJob& job, IncrementalCyk& cyk, Word& w, std::size_t pos, std::vector<Word>& out,
              std::uint64_t& tick) {
  for (char c : job.sigma) {
    if (job.stop.load(std::memory_order_relaxed)) return;
    w[pos] = c;
    cyk.push(pos, c);
    if (pos + 1 == job.length) {
      if (cyk.accepts(job.length)) out.push_back(w);
      if ((++tick & 255) == 0 && job.deadline.expired()) job.stop.store(true, std::memory_order_relaxed);
    } else {
      complete(job, cyk, w, pos + 1, out, tick);
    }
  }
}

}  // namespace

std::optional<std::vector<Word>> cnf_words_of_length(const CompiledCnf& g, const Alphabet& sigma,
                                                     std::size_t length, Deadline deadline) {
  if (length == 0) return g.accepts_empty ? std::vector<Word>{Word{}} : std::vector<Word>{};
  if (sigma.empty() || (g.binary_rules.empty() && g.terminal_rules.empty())) return std::vector<Word>{};
  if (deadline.expired()) return std::nullopt;

  // Split the word space into prefixes of length `split`, one task each.
  const std::size_t k = sigma.size();
  std::size_t split = 0, tasks = 1;
  while (split < length && tasks < 64) { ++split; tasks *= k; }
  const std::vector<Word> prefixes = words_of_length(sigma, split);

  std::atomic<bool> stop{false};
  const PrefixJob job{g, sigma.symbols(), length, deadline, stop};
  std::vector<std::vector<Word>> found(prefixes.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(prefixes.size()); ++t) {
    if (stop.load(std::memory_order_relaxed)) continue;
    IncrementalCyk cyk(g, length);
    Word w(length, sigma.symbols()[0]);
    const Word& prefix = prefixes[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < split; ++i) {
      w[i] = prefix[i];
      cyk.push(i, prefix[i]);
    }
    std::uint64_t tick = 0;
    if (split == length) {
      if (cyk.accepts(length)) found[static_cast<std::size_t>(t)].push_back(w);
    } else {
      complete(job, cyk, w, split, found[static_cast<std::size_t>(t)], tick);
    }
  }
  if (stop.load()) return std::nullopt;

  std::vector<Word> out;
  for (auto& f : found) out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  return out;
}

std::vector<Word> cnf_words_of_length_reference(const CompiledCnf& g, const Alphabet& sigma, std::size_t length) {
  std::vector<Word> out;
  for (const Word& w : words_of_length(sigma, length))
    if (cnf_accepts(g, w)) out.push_back(w);
  return out;
}

Enumeration enumerate_words(const Cfg& g, Deadline deadline, std::optional<int> max_len, const Alphabet& alphabet) {
  if (deadline.unlimited() && !max_len) throw std::invalid_argument("unbounded enumeration needs max_len");
  const Alphabet sigma = g.terminals().merged(alphabet);
  const CompiledCnf cnf = compile_cnf(g);
  Enumeration e;
  constexpr int kHardCap = 64;
  const int limit = max_len ? std::min(*max_len, kHardCap) : kHardCap;
  for (int len = 0; len <= limit; ++len) {
    std::optional<std::vector<Word>> words =
        len == 0 ? cnf_words_of_length(cnf, sigma, 0, Deadline::never())
                 : cnf_words_of_length(cnf, sigma, static_cast<std::size_t>(len), deadline);
    if (!words) break;
    e.words.insert(words->begin(), words->end());
    e.lengths_completed = len;
    e.words_tested = count_words_up_to(sigma.size(), static_cast<std::size_t>(len));
  }
  return e;
}

}  // namespace formalgrade
