#include "formalgrade/apg.hpp"

#include <algorithm>
#include <set>

namespace formalgrade {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Per-kind raw difficulty ranges for the 1..10 scale.
struct Range {
  int lo, hi;
};
Range raw_range(ProblemKind k) {
  switch (k) {
    case ProblemKind::CfgWords: return {3, 16};
    case ProblemKind::FindDerivation: return {4, 22};
    case ProblemKind::CnfTransform: return {4, 20};
    case ProblemKind::Cyk: return {6, 17};
    default: return {1, 10};
  }
}

std::string used_terminals(const Cfg& g) {
  std::set<char> used;
  for (const Production& p : g.productions())
    for (char c : p.body)
      if (!is_nonterminal(c)) used.insert(c);
  return std::string(used.begin(), used.end());
}

Cfg draw_grammar(ProblemKind kind, std::mt19937_64& rng, int& terminals_drawn) {
  const int nts = uniform(rng, apg::kMinNonterminals, apg::kMaxNonterminals);
  const int ts = uniform(rng, apg::kMinTerminals, apg::kMaxTerminals);
  const int prods = uniform(rng, apg::kMinProductions, apg::kMaxProductions);
  terminals_drawn = ts;
  const std::string nonterminals = std::string("SABCDE").substr(0, static_cast<std::size_t>(nts));
  const std::string terminals = std::string("abc").substr(0, static_cast<std::size_t>(ts));

  std::vector<Production> out;
  for (int k = 0; k < prods; ++k) {
    const char head = k == 0 ? 'S' : nonterminals[static_cast<std::size_t>(uniform(rng, 0, nts - 1))];
    std::string body;
    if (kind == ProblemKind::Cyk) {
      // A -> a or A -> BC with the start symbol kept off right-hand sides
      if (uniform(rng, 0, 2) == 0) {
        body.push_back(terminals[static_cast<std::size_t>(uniform(rng, 0, ts - 1))]);
      } else {
        for (int m = 0; m < 2; ++m) body.push_back(nonterminals[static_cast<std::size_t>(uniform(rng, 1, nts - 1))]);
      }
    } else {
      const std::string pool = nonterminals + terminals;
      const int len = uniform(rng, 0, apg::kMaxBody);
      for (int m = 0; m < len; ++m) body.push_back(pool[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(pool.size()) - 1))]);
    }
    out.push_back({head, body});
  }
  return Cfg('S', std::move(out), Alphabet(terminals));
}

std::string cfg_description(ProblemKind k, const Cfg& g, const Word& w) {
  const std::string grammar = g.print();
  switch (k) {
    case ProblemKind::CfgWords:
      return "Give " + std::to_string(apg::kWordsIn) + " words generated by the grammar and " +
             std::to_string(apg::kWordsOut) + " words it does not generate.\n" + grammar;
    case ProblemKind::FindDerivation:
      return "Give a leftmost derivation of " + (w.empty() ? std::string("the empty word") : w) + ".\n" + grammar;
    case ProblemKind::CnfTransform:
      return "Convert the grammar into Chomsky normal form.\n" + grammar;
    case ProblemKind::Cyk:
      return "Fill in the CYK table for " + w + ".\n" + grammar;
    default:
      return grammar;
  }
}

// ---------------------------------------------------------------------------
// While mutations

void collect(StmtList& list, std::vector<Assign*>& assigns, std::vector<Branch*>& branches) {
  for (Stmt& s : list) {
    if (auto* a = std::get_if<Assign>(&s.node)) assigns.push_back(a);
    if (auto* l = std::get_if<Loop>(&s.node)) collect(l->body, assigns, branches);
    if (auto* b = std::get_if<Branch>(&s.node)) {
      branches.push_back(b);
      collect(b->then_branch, assigns, branches);
      collect(b->else_branch, assigns, branches);
    }
  }
}

void rename(StmtList& list, int u, int v) {
  auto swap = [&](int& x) {
    if (x == u) x = v;
    else if (x == v) x = u;
  };
  for (Stmt& s : list) {
    if (auto* a = std::get_if<Assign>(&s.node)) {
      swap(a->target);
      swap(a->source);
    }
    if (auto* l = std::get_if<Loop>(&s.node)) {
      swap(l->var);
      rename(l->body, u, v);
    }
    if (auto* b = std::get_if<Branch>(&s.node)) {
      swap(b->var);
      rename(b->then_branch, u, v);
      rename(b->else_branch, u, v);
    }
  }
}

void mutate(WhileProgram& p, std::mt19937_64& rng) {
  std::vector<Assign*> assigns;
  std::vector<Branch*> branches;
  collect(p.body, assigns, branches);
  switch (uniform(rng, 0, 3)) {
    case 0: {
      if (p.var_count < 2) return;
      const int u = uniform(rng, 0, p.var_count - 1);
      int v = uniform(rng, 0, p.var_count - 2);
      if (v >= u) ++v;
      rename(p.body, u, v);
      return;
    }
    case 1:
      if (branches.empty()) return;
      {
        Branch* b = branches[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(branches.size()) - 1))];
        std::swap(b->then_branch, b->else_branch);
      }
      return;
    case 2:
      if (assigns.empty()) return;
      {
        Assign* a = assigns[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(assigns.size()) - 1))];
        a->subtract = !a->subtract;
      }
      return;
    default:
      if (assigns.empty()) return;
      {
        Assign* a = assigns[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(assigns.size()) - 1))];
        if (uniform(rng, 0, 1) == 0) ++a->constant;
        else if (a->constant > 0) --a->constant;
      }
      return;
  }
}

// ---------------------------------------------------------------------------
// Pipeline

ScoredCandidate draw(ProblemKind kind, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  try {
    return kind == ProblemKind::WhileToTm ? gen_while_candidate(rng) : gen_cfg_candidate(kind, rng);
  } catch (const std::exception&) {
    return {};
  }
}

void check_request(const GenerationRequest& req) {
  if (!apg_supports(req.kind)) throw InvalidPayload("no generator for " + to_string(req.kind) + " problems");
  if (req.d_min < 1 || req.d_max > 10 || req.d_min > req.d_max)
    throw InvalidPayload("difficulty bounds must satisfy 1 <= min <= max <= 10");
}

std::vector<std::uint64_t> candidate_seeds(std::uint64_t seed) {
  std::mt19937_64 master(seed);
  std::vector<std::uint64_t> seeds(apg::kCandidates);
  for (auto& s : seeds) s = master();
  return seeds;
}

Problem select(const GenerationRequest& req, std::vector<ScoredCandidate>& scored, GenerationStats* stats) {
  GenerationStats st;
  st.candidates = static_cast<int>(scored.size());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    const ScoredCandidate& c = scored[i];
    st.quals.push_back(c.problem ? c.qual : Rational(0));
    st.diffs.push_back(c.diff);
    if (!(Rational(0) < c.qual) || !c.problem) continue;
    ++st.usable;
    if (c.diff < Rational(req.d_min) || Rational(req.d_max) < c.diff) continue;
    ++st.in_band;
    if (st.chosen < 0 || scored[static_cast<std::size_t>(st.chosen)].qual < c.qual) st.chosen = static_cast<int>(i);
  }
  if (stats) *stats = st;
  if (st.chosen < 0) throw NoCandidateInBand(req.d_min, req.d_max);
  return std::move(*scored[static_cast<std::size_t>(st.chosen)].problem);
}

}  // namespace

Rational normalize_difficulty(int raw, int lo, int hi) {
  if (raw <= lo) return Rational(1);
  if (raw >= hi) return Rational(10);
  return Rational(1) + Rational(9 * (raw - lo), hi - lo);
}

bool apg_supports(ProblemKind kind) {
  return kind == ProblemKind::CfgWords || kind == ProblemKind::FindDerivation || kind == ProblemKind::CnfTransform ||
         kind == ProblemKind::Cyk || kind == ProblemKind::WhileToTm;
}

ScoredCandidate score_cfg(ProblemKind kind, const Cfg& drawn, std::mt19937_64& rng) {
  ScoredCandidate c;
  Cfg g = drawn;
  try {
    g = sanitize(drawn);
  } catch (const EmptyLanguage&) {
    return c;
  }
  const int prods = static_cast<int>(g.productions().size());
  if (prods < apg::kMinSurvivingProductions) return c;

  const Enumeration e = enumerate_words(g, Deadline::never(), apg::kWordLengthProbe);
  const std::int64_t count = static_cast<std::int64_t>(e.words.size());
  if (count == 0) return c;
  const std::string used = used_terminals(g);
  const std::int64_t all_used = used.size() == drawn.terminals().size() ? 1 : 0;
  const std::int64_t spread = count > 1 && count < (1 << apg::kWordLengthProbe) ? 1 : 0;

  int extra = 0;
  Word w;
  switch (kind) {
    case ProblemKind::CfgWords:
      if (count < apg::kWordsIn) return c;
      extra = static_cast<int>(e.words.begin()->size());
      break;
    case ProblemKind::FindDerivation: {
      std::vector<Word> nonempty;
      for (const Word& x : e.words)
        if (!x.empty()) nonempty.push_back(x);
      if (nonempty.empty()) return c;
      w = nonempty[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(nonempty.size()) - 1))];
      const auto d = find_derivation(g, w, DerivationMode::Leftmost);
      if (!d) return c;
      extra = static_cast<int>(d->steps.size()) - 1;
      break;
    }
    case ProblemKind::CnfTransform:
      extra = static_cast<int>(is_cnf(g).violations.size());
      if (extra == 0) return c;
      break;
    case ProblemKind::Cyk: {
      if (!is_cnf(g).ok() || used.empty()) return c;
      const int len = uniform(rng, apg::kCykMinWord, apg::kCykMaxWord);
      for (int k = 0; k < len; ++k)
        w.push_back(used[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(used.size()) - 1))]);
      extra = len;
      break;
    }
    default:
      throw InvalidPayload("no grammar generator for " + to_string(kind) + " problems");
  }

  c.raw_diff = prods + extra;
  const Range r = raw_range(kind);
  c.diff = normalize_difficulty(c.raw_diff, r.lo, r.hi);
  c.qual = Rational(1 + spread + all_used);

  Problem p;
  p.kind = kind;
  p.max_points = 10;
  p.title = "Generated " + to_string(kind) + " exercise";
  p.description = cfg_description(kind, g, w);
  switch (kind) {
    case ProblemKind::CfgWords: p.payload = WordsPayload{g, g.terminals(), apg::kWordsIn, apg::kWordsOut}; break;
    case ProblemKind::FindDerivation: p.payload = DerivationPayload{g, w, DerivationMode::Leftmost}; break;
    case ProblemKind::CnfTransform: p.payload = CnfPayload{g}; break;
    default: p.payload = CykPayload{g, w}; break;
  }
  c.problem = std::move(p);
  return c;
}

ScoredCandidate gen_cfg_candidate(ProblemKind kind, std::mt19937_64& rng) {
  int terminals = 0;
  const Cfg g = draw_grammar(kind, rng, terminals);
  return score_cfg(kind, g, rng);
}

const std::vector<BaseProgram>& base_programs() {
  static const std::vector<BaseProgram> programs = {
      {"copy", "x1 := x0 + 0", 1},
      {"if", "if x0 != 0 then x1 := x0 - 1 else x1 := x0 + 1 end", 2},
      {"doubling", "x1 := x0 + 0; while x0 != 0 do x1 := x1 + 1; x0 := x0 - 1 end", 3},
      {"add", "while x1 != 0 do x0 := x0 + 1; x1 := x1 - 1 end", 3},
      {"monus", "while x1 != 0 do x0 := x0 - 1; x1 := x1 - 1 end", 4},
      {"min",
       "while x0 != 0 do if x1 != 0 then x2 := x2 + 1; x0 := x0 - 1; x1 := x1 - 1 else x0 := x1 + 0 end end", 5},
      {"multiplication",
       "while x0 != 0 do x3 := x1 + 0; while x3 != 0 do x2 := x2 + 1; x3 := x3 - 1 end; x0 := x0 - 1 end", 8},
  };
  return programs;
}

Rational while_quality(const WhileProgram& p) {
  const Deadline deadline = Deadline::after(apg::kWhileBudget);
  std::set<Valuation> outputs;
  std::int64_t tested = 0;
  for (const Valuation& in : ordered_inputs(p.var_count, apg::kWhileInputBound)) {
    if (deadline.expired()) return Rational(0);
    const IoBehaviour r = run_while(p, in, apg::kWhileStepCap);
    if (r.status != IoStatus::Halted) return Rational(0);
    outputs.insert(r.output);
    ++tested;
  }
  if (outputs.size() < 2) return Rational(0);
  return Rational(static_cast<std::int64_t>(outputs.size()), tested);
}

ScoredCandidate gen_while_candidate(std::mt19937_64& rng) {
  const auto& bases = base_programs();
  const BaseProgram& base = bases[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(bases.size()) - 1))];
  WhileProgram p = parse_while(base.text);
  const int mutations = uniform(rng, apg::kMinMutations, apg::kMaxMutations);
  for (int k = 0; k < mutations; ++k) mutate(p, rng);

  ScoredCandidate c;
  c.raw_diff = base.difficulty;
  c.diff = Rational(base.difficulty);
  c.qual = while_quality(p);
  if (!(Rational(0) < c.qual)) return c;
  Problem prob;
  prob.kind = ProblemKind::WhileToTm;
  prob.max_points = 10;
  prob.title = "Generated while-to-tm exercise";
  prob.description = "Build a " + std::to_string(p.var_count) +
                     "-tape Turing machine with the same input/output behaviour as this program.\n" + print_while(p);
  prob.payload = WhileToTmPayload{std::move(p)};
  c.problem = std::move(prob);
  return c;
}

Problem generate(const GenerationRequest& req, GenerationStats* stats) {
  check_request(req);
  const std::vector<std::uint64_t> seeds = candidate_seeds(req.seed);
  std::vector<ScoredCandidate> scored(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(seeds.size()); ++i)
    scored[static_cast<std::size_t>(i)] = draw(req.kind, seeds[static_cast<std::size_t>(i)]);
  return select(req, scored, stats);
}

Problem generate_reference(const GenerationRequest& req, GenerationStats* stats) {
  check_request(req);
  std::vector<ScoredCandidate> scored;
  for (std::uint64_t s : candidate_seeds(req.seed)) scored.push_back(draw(req.kind, s));
  return select(req, scored, stats);
}

}  // namespace formalgrade
