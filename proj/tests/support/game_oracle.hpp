// Exhaustive exploration of the pumping game from the student's side, with
// membership re-decided by brute force instead of the engine's matcher.
#pragma once

#include <functional>
#include <map>
#include <string>

#include "formalgrade/pumping.hpp"

namespace oracle {

using formalgrade::ArithLang;
using formalgrade::Word;

// Build every word the pattern yields with exponents up to |w| and compare.
inline bool arith_member_brute(const ArithLang& lang, const Word& w) {
  const std::string vars = lang.variables();
  std::map<char, std::int64_t> a;
  std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
    if (k == vars.size()) {
      Word built;
      for (const auto& b : lang.blocks) {
        const std::int64_t len = b.var ? a[*b.var] : b.constant;
        built.append(static_cast<std::size_t>(len), b.symbol);
        if (built.size() > w.size()) return false;
      }
      if (built != w) return false;
      for (const auto& c : lang.constraints) {
        auto eval = [&](const formalgrade::LinearExpr& e) {
          std::int64_t v = e.constant;
          for (const auto& t : e.terms) v += t.coeff * a[t.var];
          return v;
        };
        const std::int64_t l = eval(c.lhs), r = eval(c.rhs);
        bool ok = false;
        switch (c.rel) {
          case formalgrade::Relation::Eq: ok = l == r; break;
          case formalgrade::Relation::Ne: ok = l != r; break;
          case formalgrade::Relation::Lt: ok = l < r; break;
          case formalgrade::Relation::Le: ok = l <= r; break;
          case formalgrade::Relation::Gt: ok = l > r; break;
          case formalgrade::Relation::Ge: ok = l >= r; break;
        }
        if (!ok) return false;
      }
      return true;
    }
    for (std::int64_t x = 0; x <= static_cast<std::int64_t>(w.size()); ++x) {
      a[vars[k]] = x;
      if (go(k + 1)) return true;
    }
    return false;
  };
  return go(0);
}

struct GameSweep {
  std::size_t games = 0;
  std::size_t student_wins = 0;
  std::size_t oracle_disagreements = 0;  // tutor's final claim not confirmed by brute force
};

// Plays every student line against the tutor in which the student's claim
// is wrong. Bounds: n <= max_n for student-chosen bounds, |w| <= max_word.
inline GameSweep sweep_wrong_claims(const formalgrade::PumpingPayload& p, int max_n, std::size_t max_word) {
  using namespace formalgrade;
  GameSweep out;
  auto move = [](GameMove::Kind k) {
    GameMove m;
    m.kind = k;
    return m;
  };
  const std::string sigma = p.language.alphabet().symbols();

  if (p.regular) {
    GameMove claim = move(GameMove::Kind::Claim);
    claim.claim = Claim::NonRegular;
    const GameState s1 = pumping_game_step(p, GameState{}, claim);
    if (s1.phase == GamePhase::Over) {
      ++out.games;
      out.student_wins += s1.winner != Winner::Tutor;
      return out;
    }
    // all words over the alphabet of length n..max_word that are in L
    std::vector<Word> frontier{""};
    for (std::size_t len = 1; len <= max_word; ++len) {
      std::vector<Word> next;
      for (const Word& w : frontier)
        for (char c : sigma) next.push_back(w + c);
      frontier = std::move(next);
      if (len < static_cast<std::size_t>(*s1.n)) continue;
      for (const Word& w : frontier) {
        if (!arith_member_brute(p.language, w)) continue;
        GameMove pick = move(GameMove::Kind::Word);
        pick.word = w;
        const GameState s2 = pumping_game_step(p, s1, pick);
        for (int i = 0; i <= kMaxPump; ++i) {
          GameMove pm = move(GameMove::Kind::Pump);
          pm.i = i;
          const GameState s3 = pumping_game_step(p, s2, pm);
          ++out.games;
          out.student_wins += s3.winner != Winner::Tutor;
          const Split sp = *s2.split;
          const bool legal = sp.y > 0 && sp.x + sp.y <= static_cast<std::size_t>(*s1.n);
          if (!legal || !arith_member_brute(p.language, pump(w, sp, i))) ++out.oracle_disagreements;
        }
      }
    }
    return out;
  }

  GameMove claim = move(GameMove::Kind::Claim);
  claim.claim = Claim::Regular;
  const GameState s1 = pumping_game_step(p, GameState{}, claim);
  for (int n = 1; n <= max_n; ++n) {
    GameMove bound = move(GameMove::Kind::Bound);
    bound.n = n;
    const GameState s2 = pumping_game_step(p, s1, bound);
    if (s2.phase == GamePhase::Over) {
      ++out.games;
      out.student_wins += s2.winner != Winner::Tutor;
      continue;
    }
    const Word& w = *s2.w;
    if (!arith_member_brute(p.language, w) || w.size() < static_cast<std::size_t>(n)) ++out.oracle_disagreements;
    for (std::size_t x = 0; x < w.size(); ++x)
      for (std::size_t y = 1; x + y <= w.size() && x + y <= static_cast<std::size_t>(n); ++y) {
        GameMove sp = move(GameMove::Kind::Split);
        sp.split = {x, y};
        const GameState s3 = pumping_game_step(p, s2, sp);
        ++out.games;
        out.student_wins += s3.winner != Winner::Tutor;
        if (s3.i && arith_member_brute(p.language, pump(w, {x, y}, *s3.i))) ++out.oracle_disagreements;
      }
  }
  return out;
}

}  // namespace oracle
