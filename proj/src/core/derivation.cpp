#include <algorithm>
#include <limits>
#include <map>

#include "formalgrade/cfg.hpp"

namespace formalgrade {

std::string to_string(DerivationMode m) {
  switch (m) {
    case DerivationMode::Any: return "any";
    case DerivationMode::Leftmost: return "leftmost";
    case DerivationMode::Rightmost: return "rightmost";
  }
  return "any";
}

DerivationMode derivation_mode_from_string(std::string_view s) {
  if (s == "any") return DerivationMode::Any;
  if (s == "leftmost") return DerivationMode::Leftmost;
  if (s == "rightmost") return DerivationMode::Rightmost;
  throw InvalidDocument("unknown derivation mode '" + std::string(s) + "'");
}

std::string to_string(DerivationError e) {
  switch (e) {
    case DerivationError::None: return "ok";
    case DerivationError::Empty: return "empty-derivation";
    case DerivationError::WrongStart: return "wrong-start";
    case DerivationError::NoSingleProduction: return "no-single-production";
    case DerivationError::WrongOccurrence: return "wrong-occurrence";
    case DerivationError::WrongResult: return "wrong-result";
  }
  return "unknown";
}

namespace {

// Positions p such that `next` is `prev` with prev[p] rewritten by a production.
std::vector<std::size_t> rewrite_positions(const Cfg& g, const std::string& prev, const std::string& next) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < prev.size(); ++p) {
    if (!is_nonterminal(prev[p])) continue;
    if (next.size() + 1 < prev.size()) continue;
    const std::size_t body_len = next.size() + 1 - prev.size();
    if (prev.compare(0, p, next, 0, p) != 0) continue;
    if (prev.compare(p + 1, std::string::npos, next, p + body_len, std::string::npos) != 0) continue;
    const std::string body = next.substr(p, body_len);
    for (const auto& prod : g.productions()) {
      if (prod.head == prev[p] && prod.body == body) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace

DerivationVerdict check_derivation(const Cfg& g, const Derivation& d, std::string_view target) {
  if (d.steps.empty()) return {DerivationError::Empty, 0};
  if (d.steps[0] != std::string(1, g.start())) return {DerivationError::WrongStart, 0};
  for (std::size_t i = 1; i < d.steps.size(); ++i) {
    const std::string& prev = d.steps[i - 1];
    const auto positions = rewrite_positions(g, prev, d.steps[i]);
    if (positions.empty()) return {DerivationError::NoSingleProduction, i};
    if (d.mode == DerivationMode::Any) continue;
    std::size_t required = std::string::npos;
    for (std::size_t p = 0; p < prev.size(); ++p) {
      if (!is_nonterminal(prev[p])) continue;
      if (required == std::string::npos || d.mode == DerivationMode::Rightmost) required = p;
      if (d.mode == DerivationMode::Leftmost) break;
    }
    if (std::find(positions.begin(), positions.end(), required) == positions.end())
      return {DerivationError::WrongOccurrence, i};
  }
  if (d.steps.back() != target) return {DerivationError::WrongResult, d.steps.size() - 1};
  return {};
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Fewest-step derivations by fixpoint relaxation over (nonterminal, span).
class DerivationSearch {
public:
  DerivationSearch(const Cfg& g, std::string_view w) : g_(g), w_(w), n_(w.size()) {
    for (char a : g.nonterminals()) index_[a] = static_cast<int>(index_.size());
    const std::size_t cells = index_.size() * (n_ + 1) * (n_ + 1);
    best_.assign(cells, kInf);
    choice_.resize(cells);
    relax();
  }

  int cost(char a, std::size_t i, std::size_t j) const { return best_[slot(index_.at(a), i, j)]; }

  struct Choice {
    std::size_t production = 0;
    std::vector<std::size_t> bounds;  // body symbol k spans [bounds[k], bounds[k+1])
  };
  const Choice& choice(char a, std::size_t i, std::size_t j) const { return choice_[slot(index_.at(a), i, j)]; }

private:
  std::size_t slot(int a, std::size_t i, std::size_t j) const { return (a * (n_ + 1) + i) * (n_ + 1) + j; }

  void relax() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t pi = 0; pi < g_.productions().size(); ++pi) {
        const auto& p = g_.productions()[pi];
        const int head = index_.at(p.head);
        const std::size_t k = p.body.size();
        for (std::size_t i = 0; i <= n_; ++i) {
          // seq[m][q]: cost of deriving w[i, q) from body[0, m).
          std::vector<std::vector<int>> seq(k + 1, std::vector<int>(n_ + 1, kInf));
          std::vector<std::vector<std::size_t>> from(k + 1, std::vector<std::size_t>(n_ + 1, 0));
          seq[0][i] = 0;
          for (std::size_t m = 0; m < k; ++m) {
            const char s = p.body[m];
            for (std::size_t q = i; q <= n_; ++q) {
              if (seq[m][q] >= kInf) continue;
              if (!is_nonterminal(s)) {
                if (q < n_ && w_[q] == s && seq[m][q] < seq[m + 1][q + 1]) {
                  seq[m + 1][q + 1] = seq[m][q];
                  from[m + 1][q + 1] = q;
                }
                continue;
              }
              const int x = index_.at(s);
              for (std::size_t r = q; r <= n_; ++r) {
                const int c = best_[slot(x, q, r)];
                if (c >= kInf) continue;
                if (seq[m][q] + c < seq[m + 1][r]) {
                  seq[m + 1][r] = seq[m][q] + c;
                  from[m + 1][r] = q;
                }
              }
            }
          }
          for (std::size_t j = i; j <= n_; ++j) {
            if (seq[k][j] >= kInf) continue;
            const int cand = seq[k][j] + 1;
            const std::size_t s = slot(head, i, j);
            if (cand < best_[s]) {
              best_[s] = cand;
              Choice c{pi, std::vector<std::size_t>(k + 1)};
              c.bounds[k] = j;
              for (std::size_t m = k; m > 0; --m) c.bounds[m - 1] = from[m][c.bounds[m]];
              choice_[s] = std::move(c);
              changed = true;
            }
          }
        }
      }
    }
  }

  const Cfg& g_;
  std::string_view w_;
  std::size_t n_;
  std::map<char, int> index_;
  std::vector<int> best_;
  std::vector<Choice> choice_;
};

}  // namespace

std::optional<Derivation> find_derivation(const Cfg& g, std::string_view w, DerivationMode mode) {
  DerivationSearch search(g, w);
  if (search.cost(g.start(), 0, w.size()) >= kInf) return std::nullopt;

  // A sentential form item: a terminal, or a nonterminal with the span it derives.
  struct Item {
    char symbol;
    std::size_t i, j;
  };
  std::vector<Item> form{{g.start(), 0, w.size()}};
  auto render = [&] {
    std::string s;
    for (const auto& it : form) s.push_back(it.symbol);
    return s;
  };
  Derivation d{mode, {render()}};
  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t k = 0; k < form.size(); ++k) {
      if (!is_nonterminal(form[k].symbol)) continue;
      pick = k;
      if (mode != DerivationMode::Rightmost) break;
    }
    if (!pick) break;
    const Item item = form[*pick];
    const auto& c = search.choice(item.symbol, item.i, item.j);
    const auto& body = g.productions()[c.production].body;
    std::vector<Item> replacement;
    for (std::size_t m = 0; m < body.size(); ++m) replacement.push_back({body[m], c.bounds[m], c.bounds[m + 1]});
    form.erase(form.begin() + static_cast<std::ptrdiff_t>(*pick));
    form.insert(form.begin() + static_cast<std::ptrdiff_t>(*pick), replacement.begin(), replacement.end());
    d.steps.push_back(render());
  }
  return d;
}

}  // namespace formalgrade
