#include "formalgrade/grading.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <set>

namespace formalgrade {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const std::vector<std::pair<ProblemKind, const char*>>& kind_names() {
  static const std::vector<std::pair<ProblemKind, const char*>> names = {
      {ProblemKind::ReWords, "re-words"},
      {ProblemKind::CfgWords, "cfg-words"},
      {ProblemKind::PdaWords, "pda-words"},
      {ProblemKind::ReConstruction, "re-construction"},
      {ProblemKind::CfgConstruction, "cfg-construction"},
      {ProblemKind::PdaConstruction, "pda-construction"},
      {ProblemKind::ReToNfa, "re-to-nfa"},
      {ProblemKind::EquivClassesDecide, "equiv-classes-decide"},
      {ProblemKind::EquivClassesFind, "equiv-classes-find"},
      {ProblemKind::PumpingGame, "pumping-game"},
      {ProblemKind::FindDerivation, "find-derivation"},
      {ProblemKind::CnfTransform, "cnf"},
      {ProblemKind::Cyk, "cyk"},
      {ProblemKind::WhileToTm, "while-to-tm"},
  };
  return names;
}

std::string quoted(const Word& w) { return w.empty() ? "the empty word" : "'" + w + "'"; }

std::string values(const Valuation& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

Feedback note(Severity s, std::string text, std::optional<std::string> cex = std::nullopt,
              std::optional<std::string> location = std::nullopt) {
  return {s, std::move(text), std::move(cex), std::move(location)};
}

using Membership = std::function<bool(const Word&)>;

Membership membership_of(const WordsLanguage& lang, const Alphabet& alphabet) {
  return std::visit(overloaded{
                        [&](const Regex& r) -> Membership {
                          auto n = std::make_shared<Nfa>(thompson(r, alphabet.merged(r.symbols())));
                          return [n](const Word& w) { return nfa_accepts(*n, w); };
                        },
                        [](const Cfg& g) -> Membership {
                          auto c = std::make_shared<CompiledCnf>(compile_cnf(g));
                          return [c](const Word& w) { return cnf_accepts(*c, w); };
                        },
                        [](const Pda& p) -> Membership {
                          return [p](const Word& w) {
                            return p.input_alphabet().admits(w) &&
                                   pda_accepts(p, w, kGradingPdaStepCap) == RunVerdict::Accepted;
                          };
                        },
                    },
                    lang);
}

std::string strip_spaces(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

// Words of one length for either formalism; nullopt once the deadline passes.
class LengthOracle {
public:
  explicit LengthOracle(const ContextFree& lang) : lang_(lang) {
    if (const Cfg* g = std::get_if<Cfg>(&lang)) cnf_ = compile_cnf(*g);
  }

  Alphabet alphabet() const {
    return std::visit(overloaded{[](const Cfg& g) { return g.terminals(); },
                                 [](const Pda& p) { return p.input_alphabet(); }},
                      lang_);
  }

  std::optional<std::vector<Word>> words(const Alphabet& sigma, std::size_t len, Deadline deadline) {
    if (cnf_) return cnf_words_of_length(*cnf_, sigma, len, deadline);
    auto r = pda_words_of_length(std::get<Pda>(lang_), sigma, len, deadline);
    if (!r) return std::nullopt;
    cutoffs += r->cutoffs;
    return std::move(r->words);
  }

  std::uint64_t cutoffs = 0;

private:
  const ContextFree& lang_;
  std::optional<CompiledCnf> cnf_;
};

Deadline deadline_for(const GradeOptions& o) {
  return o.budget ? Deadline::after(*o.budget) : Deadline::never();
}

}  // namespace

std::string to_string(ProblemKind k) {
  for (const auto& [kind, name] : kind_names())
    if (kind == k) return name;
  return "re-words";
}

ProblemKind problem_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kind_names())
    if (s == name) return kind;
  throw InvalidDocument("unknown problem kind '" + std::string(s) + "'");
}

const std::vector<ProblemKind>& all_problem_kinds() {
  static const std::vector<ProblemKind> kinds = [] {
    std::vector<ProblemKind> out;
    for (const auto& entry : kind_names()) out.push_back(entry.first);
    return out;
  }();
  return kinds;
}

std::string to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "info";
}

Severity severity_from_string(std::string_view s) {
  if (s == "info") return Severity::Info;
  if (s == "warning") return Severity::Warning;
  if (s == "error") return Severity::Error;
  throw InvalidDocument("unknown severity '" + std::string(s) + "'");
}

GradeReport make_report(int max_points, Rational fraction) {
  GradeReport r;
  r.max_points = max_points;
  r.fraction = fraction;
  r.points = round_half_up(max_points, fraction);
  return r;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// ---------------------------------------------------------------------------
// Words

GradeReport grade_words(const WordsPayload& p, const WordsAttempt& a, int max_points) {
  if (a.in.size() > static_cast<std::size_t>(p.in_count) || a.out.size() > static_cast<std::size_t>(p.out_count))
    throw InvalidAttempt("asked for " + std::to_string(p.in_count) + " words in and " + std::to_string(p.out_count) +
                         " words out of the language");
  const Membership member = membership_of(p.language, p.alphabet);
  std::vector<Feedback> fb;
  std::int64_t correct = 0;

  auto check_list = [&](const std::vector<Word>& list, bool want_in) {
    // shortlex order keeps the report independent of the submission order
    std::map<Word, int, ShortLex> times;
    for (const Word& w : list) ++times[w];
    for (const auto& [w, n] : times) {
      if (n > 1) fb.push_back(note(Severity::Warning, quoted(w) + " was given more than once and counts once", w));
      if (!p.alphabet.admits(w)) {
        fb.push_back(note(Severity::Error, quoted(w) + " uses a symbol outside the alphabet", w));
        continue;
      }
      const bool in = member(w);
      if (in == want_in) {
        ++correct;
      } else {
        fb.push_back(note(Severity::Error, quoted(w) + (in ? " is in the language" : " is not in the language"), w));
      }
    }
  };
  check_list(a.in, true);
  check_list(a.out, false);

  const std::int64_t asked = p.in_count + p.out_count;
  GradeReport r = make_report(max_points, Rational(correct, std::max<std::int64_t>(asked, 1)));
  r.feedback.push_back(note(Severity::Info, std::to_string(correct) + " of " + std::to_string(asked) + " words correct"));
  r.feedback.insert(r.feedback.end(), fb.begin(), fb.end());
  r.metadata["correct"] = correct;
  r.metadata["requested"] = asked;
  return r;
}

// ---------------------------------------------------------------------------
// RE construction

GradeReport grade_re_construction(const ReConstructionPayload& p, const RegexAttempt& a, int max_points) {
  if (p.solutions.empty()) throw InvalidPayload("no solution expression");
  std::optional<Regex> attempt;
  try {
    attempt = parse_regex(a.text, p.alphabet);
  } catch (const SyntaxError& e) {
    GradeReport r = make_report(max_points, Rational(0));
    r.feedback.push_back(note(Severity::Error, e.what(), std::nullopt, "column " + std::to_string(e.column())));
    return r;
  } catch (const AlphabetError& e) {
    GradeReport r = make_report(max_points, Rational(0));
    r.feedback.push_back(note(Severity::Error, e.what()));
    return r;
  }

  const EquivResult eq = regular_equiv(*attempt, p.solutions.front());
  if (eq.equal) {
    GradeReport r = make_report(max_points, Rational(1));
    r.feedback.push_back(note(Severity::Info, "your expression describes the required language"));
    r.metadata["distance"] = 0;
    return r;
  }
  std::size_t d = std::numeric_limits<std::size_t>::max();
  const std::string mine = strip_spaces(attempt->print());
  for (const Regex& s : p.solutions) d = std::min(d, levenshtein(mine, strip_spaces(s.print())));
  const std::int64_t kept = d >= 5 ? 0 : static_cast<std::int64_t>(5 - d);
  GradeReport r = make_report(max_points, Rational(kept, 5));
  const Word& w = *eq.counterexample;
  r.feedback.push_back(note(Severity::Error,
                            quoted(w) + (eq.in_left ? " is in your language but not in the required one"
                                                    : " is in the required language but not in yours"),
                            w));
  r.feedback.push_back(note(Severity::Info, std::to_string(d) + (d == 1 ? " edit" : " edits") +
                                                " away from a correct expression"));
  r.metadata["distance"] = static_cast<std::int64_t>(d);
  return r;
}

// ---------------------------------------------------------------------------
// CFG / PDA construction

GradeReport grade_bounded_construction(const ContextFree& solution, const ContextFree& attempt, int max_points,
                                       const GradeOptions& options) {
  if (!options.budget && !options.max_length) throw std::invalid_argument("an unbounded check needs max_length");
  LengthOracle sol(solution), att(attempt);
  const Alphabet sigma = sol.alphabet().merged(att.alphabet());
  const Deadline deadline = deadline_for(options);
  const int limit = std::min(options.max_length.value_or(kMaxEnumeratedLength), kMaxEnumeratedLength);

  WordSet a, b;
  int completed = -1;
  for (int len = 0; len <= limit; ++len) {
    const Deadline d = len == 0 ? Deadline::never() : deadline;
    auto wa = sol.words(sigma, static_cast<std::size_t>(len), d);
    if (!wa) break;
    auto wb = att.words(sigma, static_cast<std::size_t>(len), d);
    if (!wb) break;
    a.insert(wa->begin(), wa->end());
    b.insert(wb->begin(), wb->end());
    completed = len;
  }
  if (completed < 1 && limit >= 1) throw BudgetTooSmall();

  std::vector<Word> missing, extra;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(missing), ShortLex{});
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(extra), ShortLex{});
  const std::int64_t uni = static_cast<std::int64_t>(a.size() + extra.size());
  const std::int64_t common = static_cast<std::int64_t>(a.size() - missing.size());
  const std::uint64_t tested = count_words_up_to(sigma.size(), static_cast<std::size_t>(std::max(completed, 0)));
  const std::string scope = std::to_string(tested) + " words up to length " + std::to_string(completed);

  GradeReport r = make_report(max_points, uni == 0 ? Rational(1) : Rational(common, uni));
  if (uni == 0) {
    r.feedback.push_back(note(Severity::Warning, "neither language has a word up to length " +
                                                     std::to_string(completed) + ", so the tests prove little"));
  } else if (a.empty()) {
    r.feedback.push_back(note(Severity::Warning, "the reference language has no word up to length " +
                                                     std::to_string(completed)));
  }
  if (missing.empty() && extra.empty()) {
    r.feedback.push_back(note(Severity::Info, "passed all tests: " + scope));
  } else {
    r.feedback.push_back(note(Severity::Info, "tested " + scope));
    for (std::size_t k = 0; k < missing.size() && k < kMaxListedWords; ++k)
      r.feedback.push_back(note(Severity::Error, "missing: " + quoted(missing[k]) +
                                                     " is in the required language but not in yours",
                                missing[k]));
    for (std::size_t k = 0; k < extra.size() && k < kMaxListedWords; ++k)
      r.feedback.push_back(note(Severity::Error, "extra: " + quoted(extra[k]) +
                                                     " is in your language but not in the required one",
                                extra[k]));
  }
  if (sol.cutoffs + att.cutoffs > 0)
    r.feedback.push_back(note(Severity::Warning, std::to_string(sol.cutoffs + att.cutoffs) +
                                                     " runs hit the step limit and were counted as rejecting"));
  r.metadata["lengths_completed"] = completed;
  r.metadata["words_tested"] = static_cast<std::int64_t>(tested);
  r.metadata["reference_words"] = static_cast<std::int64_t>(a.size());
  r.metadata["attempt_words"] = static_cast<std::int64_t>(b.size());
  r.metadata["common_words"] = common;
  r.metadata["cutoffs"] = static_cast<std::int64_t>(sol.cutoffs + att.cutoffs);
  return r;
}

// ---------------------------------------------------------------------------
// RE to NFA

GradeReport grade_re_to_nfa(const ReToNfaPayload& p, const BlockNfaAttempt& a, int max_points) {
  const Alphabet sigma = p.alphabet.merged(p.goal.symbols());
  const std::vector<const BlockState*> blocks = all_blocks(a.nfa);
  for (const BlockState* b : blocks) validate_block_label(p.goal, b->label);

  std::vector<Feedback> fb;
  std::int64_t correct = 0;
  const EquivResult whole = regular_equiv(flatten(a.nfa, sigma), p.goal);
  if (whole.equal) {
    ++correct;
  } else {
    const Word& w = *whole.counterexample;
    fb.push_back(note(Severity::Error,
                      "the automaton " + std::string(whole.in_left ? "accepts " : "rejects ") + quoted(w) +
                          ", which " + (whole.in_left ? "is not" : "is") + " in the language of " + p.goal.print(),
                      w, "automaton"));
  }
  for (const BlockState* b : blocks) {
    const std::string label = b->label.print();
    if (!b->contents) {
      fb.push_back(note(Severity::Error, "block " + label + " is not expanded", std::nullopt, "block " + label));
      continue;
    }
    const EquivResult eq = regular_equiv(expand_block(*b, sigma), b->label);
    if (eq.equal) {
      ++correct;
      continue;
    }
    const Word& w = *eq.counterexample;
    fb.push_back(note(Severity::Error,
                      "block " + label + (eq.in_left ? " accepts " : " rejects ") + quoted(w) + ", which " +
                          (eq.in_left ? "is not" : "is") + " in the language of its label",
                      w, "block " + label));
  }
  const std::int64_t used = 1 + static_cast<std::int64_t>(blocks.size());
  GradeReport r = make_report(max_points, Rational(correct, used));
  r.feedback.push_back(note(Severity::Info, std::to_string(correct) + " of " + std::to_string(used) +
                                                " blocks correct, counting the whole automaton"));
  r.feedback.insert(r.feedback.end(), fb.begin(), fb.end());
  r.metadata["blocks_used"] = used;
  r.metadata["blocks_correct"] = correct;
  return r;
}

// ---------------------------------------------------------------------------
// Equivalence classes

GradeReport grade_equiv_decide(const EquivDecidePayload& p, const EquivDecideAttempt& a, int max_points) {
  const Alphabet sigma = p.alphabet.merged(p.re.symbols());
  const Nfa whole = thompson(p.re, sigma);
  const Nfa r1 = residual(whole, p.w1), r2 = residual(whole, p.w2);
  const EquivResult truth = regular_equiv(r1, r2);

  std::vector<Feedback> fb;
  std::int64_t halves = 0;
  const bool assessment = a.equivalent == truth.equal;
  if (!assessment) {
    if (truth.equal) {
      fb.push_back(note(Severity::Error, quoted(p.w1) + " and " + quoted(p.w2) + " are in the same class"));
    } else {
      const Word& x = *truth.counterexample;
      fb.push_back(note(Severity::Error,
                        "the words are in different classes: appending " + quoted(x) + " gives a word " +
                            (truth.in_left ? "in" : "not in") + " the language after " + quoted(p.w1) + " and " +
                            (truth.in_left ? "not in" : "in") + " it after " + quoted(p.w2),
                        x));
    }
  } else {
    ++halves;
    fb.push_back(note(Severity::Info, "the assessment is correct"));
    if (truth.equal) {
      try {
        const Regex suffixes = parse_regex(a.justification, sigma);
        const EquivResult j = regular_equiv(suffixes, r1);
        if (j.equal) {
          ++halves;
          fb.push_back(note(Severity::Info, "the suffix language is correct"));
        } else {
          const Word& x = *j.counterexample;
          fb.push_back(note(Severity::Error,
                            quoted(x) + (j.in_left ? " is in your suffix language but appending it leaves the language"
                                                   : " is missing from your suffix language although appending it "
                                                     "stays in the language"),
                            x));
        }
      } catch (const SyntaxError& e) {
        fb.push_back(note(Severity::Error, e.what(), std::nullopt, "column " + std::to_string(e.column())));
      } catch (const AlphabetError& e) {
        fb.push_back(note(Severity::Error, e.what()));
      }
    } else {
      const Word& x = a.justification;
      if (!sigma.admits(x)) {
        fb.push_back(note(Severity::Error, "the suffix uses a symbol outside the alphabet", x));
      } else {
        const bool in1 = nfa_accepts(whole, p.w1 + x), in2 = nfa_accepts(whole, p.w2 + x);
        const std::string detail = quoted(p.w1 + x) + (in1 ? " is" : " is not") + " in the language and " +
                                   quoted(p.w2 + x) + (in2 ? " is" : " is not");
        if (in1 != in2) {
          ++halves;
          fb.push_back(note(Severity::Info, "the suffix separates the words: " + detail));
        } else {
          fb.push_back(note(Severity::Error, "the suffix does not separate the words: " + detail, x));
        }
      }
    }
  }
  GradeReport r = make_report(max_points, Rational(halves, 2));
  r.feedback = std::move(fb);
  return r;
}

GradeReport grade_equiv_find(const EquivFindPayload& p, const WordListAttempt& a, int max_points) {
  if (a.words.size() > static_cast<std::size_t>(p.count))
    throw InvalidAttempt("asked for " + std::to_string(p.count) + " words");
  const Alphabet sigma = p.alphabet.merged(p.re.symbols());
  const Nfa whole = thompson(p.re, sigma);
  const Nfa base = residual(whole, p.base);
  std::vector<Feedback> fb;
  std::int64_t correct = 0;
  WordSet seen;
  for (const Word& w : a.words) {
    if (w == p.base) {
      fb.push_back(note(Severity::Warning, "the given word itself does not count", w));
      continue;
    }
    if (!seen.insert(w).second) {
      fb.push_back(note(Severity::Warning, quoted(w) + " was given more than once and counts once", w));
      continue;
    }
    if (!sigma.admits(w)) {
      fb.push_back(note(Severity::Error, quoted(w) + " uses a symbol outside the alphabet", w));
      continue;
    }
    const EquivResult eq = regular_equiv(residual(whole, w), base);
    if (eq.equal) {
      ++correct;
    } else {
      const Word& x = *eq.counterexample;
      fb.push_back(note(Severity::Error,
                        quoted(w) + " is in a different class: appending " + quoted(x) + " gives a word " +
                            (eq.in_left ? "in" : "not in") + " the language, but not so for " + quoted(p.base),
                        w));
    }
  }
  GradeReport r = make_report(max_points, Rational(correct, std::max(p.count, 1)));
  r.feedback.push_back(note(Severity::Info, std::to_string(correct) + " of " + std::to_string(p.count) +
                                                " words correct"));
  r.feedback.insert(r.feedback.end(), fb.begin(), fb.end());
  r.metadata["correct"] = correct;
  return r;
}

// ---------------------------------------------------------------------------
// Pumping game

GradeReport grade_pumping_game(const GameState& s, int max_points) {
  if (s.winner == Winner::Undecided) throw InvalidAttempt("the game is not over yet");
  GradeReport r = make_report(max_points, Rational(s.winner == Winner::Student ? 1 : 0));
  for (const std::string& line : s.transcript) r.feedback.push_back(note(Severity::Info, line));
  if (s.winner == Winner::Tutor)
    r.feedback.push_back(note(Severity::Error, "the tutor won; the moves above show where it took advantage"));
  return r;
}

// ---------------------------------------------------------------------------
// Derivations

GradeReport grade_find_derivation(const DerivationPayload& p, const DerivationAttempt& a, int max_points) {
  const DerivationVerdict v = check_derivation(p.grammar, Derivation{p.mode, a.steps}, p.word);
  GradeReport r = make_report(max_points, Rational(v.ok() ? 1 : 0));
  r.metadata["steps"] = static_cast<std::int64_t>(a.steps.size());
  if (v.ok()) {
    r.feedback.push_back(note(Severity::Info, "the derivation is correct"));
    return r;
  }
  const std::string where = "step " + std::to_string(v.bad_step);
  switch (v.error) {
    case DerivationError::Empty:
      r.feedback.push_back(note(Severity::Error, "the derivation has no steps"));
      break;
    case DerivationError::WrongStart:
      r.feedback.push_back(note(Severity::Error,
                                std::string("a derivation starts with the start symbol ") + p.grammar.start(),
                                std::nullopt, where));
      break;
    case DerivationError::NoSingleProduction:
      r.feedback.push_back(note(Severity::Error,
                                where + " does not follow from the step before by applying one production",
                                std::nullopt, where));
      break;
    case DerivationError::WrongOccurrence:
      r.feedback.push_back(note(Severity::Error,
                                where + " rewrites the wrong nonterminal: a " + to_string(p.mode) +
                                    " derivation always rewrites the " +
                                    (p.mode == DerivationMode::Leftmost ? "leftmost" : "rightmost") + " nonterminal",
                                std::nullopt, where));
      break;
    case DerivationError::WrongResult:
      r.feedback.push_back(note(Severity::Error, "the derivation does not end in " + quoted(p.word), std::nullopt,
                                where));
      break;
    case DerivationError::None:
      break;
  }
  r.metadata["bad_step"] = static_cast<std::int64_t>(v.bad_step);
  return r;
}

// ---------------------------------------------------------------------------
// CNF

GradeReport grade_cnf(const CnfPayload& p, const CfgAttempt& a, int max_points, const GradeOptions& options) {
  Cfg g = [&] {
    try {
      return parse_cfg(a.text);
    } catch (const SyntaxError& e) {
      throw InvalidAttempt(e.what());
    }
  }();
  const CnfCheck check = is_cnf(g);
  if (!check.ok()) {
    GradeReport r = make_report(max_points, Rational(0));
    r.not_counted = true;
    r.feedback.push_back(note(Severity::Error, "the grammar is not in Chomsky normal form, so it was not graded"));
    for (const CnfViolation& v : check.violations) {
      const Production& prod = g.productions()[v.production];
      r.feedback.push_back(note(Severity::Error,
                                std::string(1, prod.head) + " -> " + (prod.body.empty() ? "eps" : prod.body) + ": " +
                                    to_string(v.reason),
                                std::nullopt, "production " + std::to_string(v.production)));
    }
    return r;
  }
  return grade_bounded_construction(p.original, g, max_points, options);
}

// ---------------------------------------------------------------------------
// CYK

GradeReport grade_cyk(const CykPayload& p, const CykAttempt& a, int max_points) {
  const CykTable truth = cyk_decide(p.grammar, p.word);
  const std::size_t n = truth.size();
  if (a.rows.size() != n) throw InvalidAttempt("the table needs " + std::to_string(n) + " rows");
  for (std::size_t len = 1; len <= n; ++len)
    if (a.rows[len - 1].size() != n - len + 1)
      throw InvalidAttempt("row " + std::to_string(len) + " needs " + std::to_string(n - len + 1) + " cells");

  auto normal = [](const std::string& cell) {
    std::string s;
    for (char c : cell)
      if (is_nonterminal(c)) s.push_back(c);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };

  std::size_t good = 0;
  std::vector<Feedback> fb;
  for (std::size_t len = 1; len <= n; ++len) {
    bool row_ok = true;
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::string given = normal(a.rows[len - 1][i]);
      const std::string& want = truth.cell(i, len);
      if (given == want) continue;
      row_ok = false;
      const bool extra = !std::includes(want.begin(), want.end(), given.begin(), given.end());
      const bool missing = !std::includes(given.begin(), given.end(), want.begin(), want.end());
      std::string text = "cell (" + std::to_string(i) + ", " + std::to_string(len) + ")";
      if (extra) text += " contains nonterminals that do not belong";
      if (extra && missing) text += " and";
      if (missing) text += " is missing some nonterminal";
      fb.push_back(note(Severity::Error, text, std::nullopt,
                        "cell (" + std::to_string(i) + ", " + std::to_string(len) + ")"));
    }
    if (!row_ok) break;
    ++good;
  }
  GradeReport r = make_report(max_points, Rational(static_cast<std::int64_t>(good), static_cast<std::int64_t>(n)));
  r.feedback.push_back(note(Severity::Info, std::to_string(good) + " of " + std::to_string(n) +
                                                " rows correct, counting from the bottom"));
  r.feedback.insert(r.feedback.end(), fb.begin(), fb.end());
  r.metadata["rows_correct"] = static_cast<std::int64_t>(good);
  r.metadata["rows"] = static_cast<std::int64_t>(n);
  return r;
}

// ---------------------------------------------------------------------------
// While to TM

GradeReport grade_while_to_tm(const WhileToTmPayload& p, const TmAttempt& a, int max_points,
                              const GradeOptions& options) {
  if (!options.budget && !options.max_tests) throw std::invalid_argument("an unbounded check needs max_tests");
  CompareOptions co;
  co.min_tests = 1;
  co.max_tests = options.max_tests;
  const ComparisonReport c = compare_io(p.program, a.tm, deadline_for(options), co);
  GradeReport r = make_report(max_points, Rational(static_cast<std::int64_t>(c.correct),
                                                   static_cast<std::int64_t>(std::max<std::uint64_t>(c.tested, 1))));
  if (c.correct == c.tested)
    r.feedback.push_back(note(Severity::Info, "passed all tests: " + std::to_string(c.tested) + " inputs"));
  else
    r.feedback.push_back(note(Severity::Info, std::to_string(c.correct) + " of " + std::to_string(c.tested) +
                                                  " inputs correct"));
  auto describe = [](const IoBehaviour& b) -> std::string {
    switch (b.status) {
      case IoStatus::Halted: return "(" + values(b.output) + ")";
      case IoStatus::Cutoff: return "no halt within " + std::to_string(kTmStepCap) + " steps";
      case IoStatus::Malformed: return "a tape that is not a unary number";
    }
    return "";
  };
  for (const IoCounterexample& x : c.counterexamples)
    r.feedback.push_back(note(Severity::Error,
                              "input (" + values(x.input) + "): expected " + describe(x.expected) + ", computed " +
                                  describe(x.computed),
                              values(x.input)));
  r.metadata["tested"] = static_cast<std::int64_t>(c.tested);
  r.metadata["correct"] = static_cast<std::int64_t>(c.correct);
  return r;
}

// ---------------------------------------------------------------------------
// Dispatch

namespace {

template <class A>
const A& attempt_as(const Attempt& a, ProblemKind k) {
  if (const A* x = std::get_if<A>(&a)) return *x;
  throw InvalidAttempt("this attempt does not fit a " + to_string(k) + " problem");
}

template <class P>
const P& payload_as(const Problem& p) {
  if (const P* x = std::get_if<P>(&p.payload)) return *x;
  throw InvalidPayload("the payload does not fit a " + to_string(p.kind) + " problem");
}

Cfg parse_attempt_grammar(const CfgAttempt& a) {
  try {
    return parse_cfg(a.text);
  } catch (const SyntaxError& e) {
    throw InvalidAttempt(e.what());
  }
}

GradeReport grade_once(const Problem& pr, const Attempt& at, const GradeOptions& o) {
  const int mp = pr.max_points;
  const ProblemKind k = pr.kind;
  switch (k) {
    case ProblemKind::ReWords:
    case ProblemKind::CfgWords:
    case ProblemKind::PdaWords:
      return grade_words(payload_as<WordsPayload>(pr), attempt_as<WordsAttempt>(at, k), mp);
    case ProblemKind::ReConstruction:
      return grade_re_construction(payload_as<ReConstructionPayload>(pr), attempt_as<RegexAttempt>(at, k), mp);
    case ProblemKind::CfgConstruction:
      return grade_bounded_construction(payload_as<ConstructionPayload>(pr).solution,
                                        parse_attempt_grammar(attempt_as<CfgAttempt>(at, k)), mp, o);
    case ProblemKind::PdaConstruction:
      return grade_bounded_construction(payload_as<ConstructionPayload>(pr).solution,
                                        attempt_as<PdaAttempt>(at, k).pda, mp, o);
    case ProblemKind::ReToNfa:
      return grade_re_to_nfa(payload_as<ReToNfaPayload>(pr), attempt_as<BlockNfaAttempt>(at, k), mp);
    case ProblemKind::EquivClassesDecide:
      return grade_equiv_decide(payload_as<EquivDecidePayload>(pr), attempt_as<EquivDecideAttempt>(at, k), mp);
    case ProblemKind::EquivClassesFind:
      return grade_equiv_find(payload_as<EquivFindPayload>(pr), attempt_as<WordListAttempt>(at, k), mp);
    case ProblemKind::PumpingGame: {
      const GameAttempt& g = attempt_as<GameAttempt>(at, k);
      GameState s;
      try {
        s = replay_game(payload_as<PumpingPayload>(pr), g.moves);
      } catch (const IllegalMove& e) {
        throw InvalidAttempt(std::string("illegal move: ") + e.what());
      }
      return grade_pumping_game(s, mp);
    }
    case ProblemKind::FindDerivation:
      return grade_find_derivation(payload_as<DerivationPayload>(pr), attempt_as<DerivationAttempt>(at, k), mp);
    case ProblemKind::CnfTransform:
      return grade_cnf(payload_as<CnfPayload>(pr), attempt_as<CfgAttempt>(at, k), mp, o);
    case ProblemKind::Cyk:
      return grade_cyk(payload_as<CykPayload>(pr), attempt_as<CykAttempt>(at, k), mp);
    case ProblemKind::WhileToTm:
      return grade_while_to_tm(payload_as<WhileToTmPayload>(pr), attempt_as<TmAttempt>(at, k), mp, o);
  }
  throw InvalidPayload("unknown problem kind");
}

}  // namespace

GradeReport grade(const Problem& problem, const Attempt& attempt, const GradeOptions& options) {
  GradeOptions o = options;
  for (int round = 0;; ++round) {
    try {
      return grade_once(problem, attempt, o);
    } catch (const BudgetTooSmall&) {
      if (round == 2 || !o.budget) throw;
      *o.budget *= 4;
    }
  }
}

GradeReport regrade(const Problem& problem, const Attempt& attempt, const GradeReport& stored) {
  GradeOptions o;
  o.budget = std::nullopt;
  if (auto it = stored.metadata.find("lengths_completed"); it != stored.metadata.end())
    o.max_length = static_cast<int>(it->second);
  if (auto it = stored.metadata.find("tested"); it != stored.metadata.end())
    o.max_tests = static_cast<std::uint64_t>(it->second);
  // Graders without a budget ignore both bounds.
  if (!o.max_length) o.max_length = 0;
  if (!o.max_tests) o.max_tests = 0;
  return grade_once(problem, attempt, o);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void require_symbols(const Alphabet& alphabet, const Alphabet& used, const std::string& what) {
  for (char c : used)
    if (!alphabet.contains(c))
      throw InvalidPayload(what + " uses '" + std::string(1, c) + "', which is not in the alphabet");
}

void require_word(const Alphabet& alphabet, const Word& w, const std::string& what) {
  if (!alphabet.admits(w)) throw InvalidPayload(what + " " + quoted(w) + " uses a symbol outside the alphabet");
}

void require_nonempty_cfg(const Cfg& g) {
  try {
    sanitize(g);
  } catch (const EmptyLanguage&) {
    throw InvalidPayload("the grammar generates no word");
  }
}

}  // namespace

std::vector<std::string> validate_problem(const Problem& pr) {
  std::vector<std::string> warnings;
  if (pr.max_points < 1) throw InvalidPayload("max_points must be positive");
  switch (pr.kind) {
    case ProblemKind::ReWords:
    case ProblemKind::CfgWords:
    case ProblemKind::PdaWords: {
      const auto& p = payload_as<WordsPayload>(pr);
      const std::size_t want = pr.kind == ProblemKind::ReWords ? 0 : pr.kind == ProblemKind::CfgWords ? 1 : 2;
      if (p.language.index() != want) throw InvalidPayload("the language formalism does not fit " + to_string(pr.kind));
      if (p.in_count < 0 || p.out_count < 0 || p.in_count + p.out_count < 1)
        throw InvalidPayload("at least one word must be requested");
      if (p.alphabet.empty()) throw InvalidPayload("the alphabet is empty");
      std::visit(overloaded{[&](const Regex& r) { require_symbols(p.alphabet, r.symbols(), "the expression"); },
                            [&](const Cfg& g) {
                              require_symbols(p.alphabet, g.terminals(), "the grammar");
                              if (p.in_count > 0) require_nonempty_cfg(g);
                            },
                            [&](const Pda& a) { require_symbols(p.alphabet, a.input_alphabet(), "the automaton"); }},
                 p.language);
      break;
    }
    case ProblemKind::ReConstruction: {
      const auto& p = payload_as<ReConstructionPayload>(pr);
      if (p.solutions.empty()) throw InvalidPayload("at least one solution expression is needed");
      for (const Regex& s : p.solutions) require_symbols(p.alphabet, s.symbols(), "a solution");
      for (std::size_t k = 1; k < p.solutions.size(); ++k)
        if (!regular_equiv(p.solutions[k], p.solutions[0]).equal)
          warnings.push_back("solution " + std::to_string(k) + " is not equivalent to the first solution");
      break;
    }
    case ProblemKind::CfgConstruction:
    case ProblemKind::PdaConstruction: {
      const auto& p = payload_as<ConstructionPayload>(pr);
      const std::size_t want = pr.kind == ProblemKind::CfgConstruction ? 0 : 1;
      if (p.solution.index() != want) throw InvalidPayload("the solution formalism does not fit " + to_string(pr.kind));
      if (const Cfg* g = std::get_if<Cfg>(&p.solution)) {
        require_nonempty_cfg(*g);
      } else {
        const PdaEnumeration e = pda_enumerate(std::get<Pda>(p.solution), Deadline::after(std::chrono::seconds(1)), 8);
        if (e.words.empty())
          warnings.push_back("the automaton accepts no word up to length " + std::to_string(e.lengths_completed));
      }
      break;
    }
    case ProblemKind::ReToNfa: {
      const auto& p = payload_as<ReToNfaPayload>(pr);
      require_symbols(p.alphabet, p.goal.symbols(), "the goal expression");
      break;
    }
    case ProblemKind::EquivClassesDecide: {
      const auto& p = payload_as<EquivDecidePayload>(pr);
      require_symbols(p.alphabet, p.re.symbols(), "the expression");
      require_word(p.alphabet, p.w1, "the word");
      require_word(p.alphabet, p.w2, "the word");
      break;
    }
    case ProblemKind::EquivClassesFind: {
      const auto& p = payload_as<EquivFindPayload>(pr);
      require_symbols(p.alphabet, p.re.symbols(), "the expression");
      require_word(p.alphabet, p.base, "the base word");
      if (p.count < 1) throw InvalidPayload("at least one word must be requested");
      break;
    }
    case ProblemKind::PumpingGame: {
      const auto& p = payload_as<PumpingPayload>(pr);
      if (!p.regular) {
        if (!p.unpumpable) throw InvalidPayload("a non-regular language needs an unpumpable word template");
        for (int n = 1; n <= kMaxBound; ++n) {
          const Word w = p.unpumpable->instantiate(n);
          if (w.size() < static_cast<std::size_t>(n) || !arith_member(p.language, w))
            throw InvalidPayload("the unpumpable word for n = " + std::to_string(n) + " is not a long enough member");
        }
      }
      break;
    }
    case ProblemKind::FindDerivation: {
      const auto& p = payload_as<DerivationPayload>(pr);
      require_word(p.grammar.terminals(), p.word, "the word");
      if (!cnf_accepts(compile_cnf(p.grammar), p.word))
        throw InvalidPayload(quoted(p.word) + " is not generated by the grammar");
      if (p.mode == DerivationMode::Any) warnings.push_back("any derivation order is accepted");
      break;
    }
    case ProblemKind::CnfTransform: {
      const auto& p = payload_as<CnfPayload>(pr);
      require_nonempty_cfg(p.original);
      if (is_cnf(p.original).ok()) warnings.push_back("the grammar is already in Chomsky normal form");
      break;
    }
    case ProblemKind::Cyk: {
      const auto& p = payload_as<CykPayload>(pr);
      if (!is_cnf(p.grammar).ok()) throw InvalidPayload("the grammar is not in Chomsky normal form");
      if (p.word.empty()) throw InvalidPayload("the word must not be empty");
      require_word(p.grammar.terminals(), p.word, "the word");
      break;
    }
    case ProblemKind::WhileToTm: {
      const auto& p = payload_as<WhileToTmPayload>(pr);
      if (p.program.var_count < 1) throw InvalidPayload("the program needs at least one variable");
      if (run_while(p.program, Valuation(static_cast<std::size_t>(p.program.var_count), 0), kTmStepCap).status !=
          IoStatus::Halted)
        warnings.push_back("the program does not halt on the all-zero input within " + std::to_string(kTmStepCap) +
                           " steps");
      break;
    }
  }
  return warnings;
}

}  // namespace formalgrade
