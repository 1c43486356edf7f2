#include "formalgrade/documents.hpp"

namespace formalgrade::doc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw InvalidDocument(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw InvalidDocument(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const Json::exception&) {
    throw InvalidDocument(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

char single(const std::string& s, const char* what) {
  if (s.size() != 1) throw InvalidDocument(std::string(what) + " must be a single symbol, got '" + s + "'");
  return s[0];
}

std::string show_split(const Word& w, const Split& s) { return w.substr(0, s.x) + "|" + w.substr(s.x, s.y) + "|" + w.substr(s.x + s.y); }

const char* move_name(Move m) { return m == Move::Left ? "L" : m == Move::Right ? "R" : "S"; }

Move move_from(const std::string& s) {
  if (s == "L") return Move::Left;
  if (s == "R") return Move::Right;
  if (s == "S") return Move::Stay;
  throw InvalidDocument("a head move is one of L, R, S, got '" + s + "'");
}

Json words_json(const std::vector<Word>& ws) { return Json(ws); }

ContextFree context_free_from(const Json& j, bool pda) {
  if (pda) return pda_from_json(j);
  return parse_cfg(j.get<std::string>());
}

Json context_free_json(const ContextFree& c) {
  return std::visit(overloaded{[](const Cfg& g) { return Json(g.print()); }, [](const Pda& p) { return to_json(p); }},
                    c);
}

}  // namespace

Json parse(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidDocument(std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// PDA

Json to_json(const Pda& p) {
  Json ts = Json::array();
  for (const PdaTransition& t : p.transitions())
    ts.push_back({{"from", t.from},
                  {"read", t.read ? std::string(1, *t.read) : "eps"},
                  {"pop", std::string(1, t.pop)},
                  {"to", t.to},
                  {"push", t.push}});
  return {{"states", p.states()},
          {"input_alphabet", p.input_alphabet().symbols()},
          {"stack_alphabet", p.stack_alphabet()},
          {"initial", p.initial()},
          {"initial_stack", std::string(1, p.initial_stack())},
          {"acceptance", p.acceptance() == Acceptance::FinalState ? "final" : "empty"},
          {"accepting", p.accepting()},
          {"transitions", ts}};
}

Pda pda_from_json(const Json& j) {
  const std::string acc = get<std::string>(j, "acceptance");
  if (acc != "final" && acc != "empty") throw InvalidDocument("acceptance is \"final\" or \"empty\"");
  std::vector<PdaTransition> ts;
  for (const Json& t : field(j, "transitions")) {
    const std::string read = get<std::string>(t, "read");
    ts.push_back({get<std::string>(t, "from"),
                  read == "eps" ? std::nullopt : std::optional<char>(single(read, "read")),
                  single(get<std::string>(t, "pop"), "pop"), get<std::string>(t, "to"),
                  get_or<std::string>(t, "push", "")});
  }
  return Pda(get<std::vector<std::string>>(j, "states"), Alphabet(get<std::string>(j, "input_alphabet")),
             get<std::string>(j, "stack_alphabet"), get<std::string>(j, "initial"),
             single(get<std::string>(j, "initial_stack"), "initial_stack"),
             acc == "final" ? Acceptance::FinalState : Acceptance::EmptyStack,
             get_or<std::vector<std::string>>(j, "accepting", {}), std::move(ts));
}

// ---------------------------------------------------------------------------
// Turing machines

Json to_json(const MultiTapeTm& m) {
  Json ts = Json::array();
  for (const TmTransition& t : m.transitions()) {
    Json read = Json::array(), write = Json::array(), move = Json::array();
    for (char c : t.read) read.push_back(std::string(1, c));
    for (char c : t.write) write.push_back(std::string(1, c));
    for (Move mv : t.move) move.push_back(move_name(mv));
    ts.push_back({{"from", t.from}, {"read", read}, {"to", t.to}, {"write", write}, {"move", move}});
  }
  return {{"tapes", m.tape_count()},
          {"states", m.states()},
          {"alphabet", m.alphabet()},
          {"blank", std::string(1, m.blank())},
          {"initial", m.initial()},
          {"halting", m.halting()},
          {"transitions", ts}};
}

MultiTapeTm tm_from_json(const Json& j) {
  std::vector<TmTransition> ts;
  for (const Json& t : field(j, "transitions")) {
    TmTransition tr;
    tr.from = get<std::string>(t, "from");
    tr.to = get<std::string>(t, "to");
    for (const auto& s : get<std::vector<std::string>>(t, "read")) tr.read.push_back(single(s, "read"));
    for (const auto& s : get<std::vector<std::string>>(t, "write")) tr.write.push_back(single(s, "write"));
    for (const auto& s : get<std::vector<std::string>>(t, "move")) tr.move.push_back(move_from(s));
    ts.push_back(std::move(tr));
  }
  return MultiTapeTm(get<int>(j, "tapes"), get<std::vector<std::string>>(j, "states"),
                     get_or<std::string>(j, "alphabet", "1_"), single(get_or<std::string>(j, "blank", "_"), "blank"),
                     get<std::string>(j, "initial"), get<std::vector<std::string>>(j, "halting"), std::move(ts));
}

// ---------------------------------------------------------------------------
// Block automata

Json to_json(const BlockNfa& a) {
  Json ts = Json::array(), blocks = Json::array();
  for (const auto& t : a.transitions)
    ts.push_back({{"from", t.from}, {"read", t.symbol ? std::string(1, *t.symbol) : "eps"}, {"to", t.to}});
  for (const BlockState& b : a.blocks)
    blocks.push_back({{"label", b.label.print()},
                      {"entry", b.entry},
                      {"exit", b.exit},
                      {"contents", b.contents ? to_json(*b.contents) : Json(nullptr)}});
  return {{"states", a.state_count},
          {"initial", a.initial},
          {"accepting", a.accepting},
          {"transitions", ts},
          {"blocks", blocks}};
}

BlockNfa block_nfa_from_json(const Json& j) {
  BlockNfa a;
  a.state_count = get<int>(j, "states");
  a.initial = get_or<int>(j, "initial", 0);
  a.accepting = get<std::vector<int>>(j, "accepting");
  auto in_range = [&](int s) {
    if (s < 0 || s >= a.state_count) throw InvalidDocument("state " + std::to_string(s) + " is out of range");
    return s;
  };
  in_range(a.initial);
  for (int s : a.accepting) in_range(s);
  for (const Json& t : get_or<Json>(j, "transitions", Json::array())) {
    const std::string read = get<std::string>(t, "read");
    a.transitions.push_back({in_range(get<int>(t, "from")),
                             read == "eps" ? std::nullopt : std::optional<char>(single(read, "read")),
                             in_range(get<int>(t, "to"))});
  }
  for (const Json& b : get_or<Json>(j, "blocks", Json::array())) {
    BlockState s{parse_regex(get<std::string>(b, "label")), in_range(get<int>(b, "entry")),
                 in_range(get<int>(b, "exit")), nullptr};
    if (b.contains("contents") && !b.at("contents").is_null())
      s.contents = std::make_shared<BlockNfa>(block_nfa_from_json(b.at("contents")));
    a.blocks.push_back(std::move(s));
  }
  return a;
}

Json to_json(const CykTable& t) {
  Json rows = Json::array();
  for (std::size_t len = 1; len <= t.size(); ++len) rows.push_back(t.row(len));
  return {{"word", t.word()}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const GradeReport& r) {
  Json fb = Json::array();
  for (const Feedback& f : r.feedback) {
    Json x = {{"severity", to_string(f.severity)}, {"text", f.text}};
    if (f.counterexample) x["counterexample"] = *f.counterexample;
    if (f.location) x["location"] = *f.location;
    fb.push_back(std::move(x));
  }
  return {{"points", r.points},
          {"max_points", r.max_points},
          {"fraction", std::to_string(r.fraction.num) + "/" + std::to_string(r.fraction.den)},
          {"not_counted", r.not_counted},
          {"feedback", fb},
          {"metadata", r.metadata}};
}

GradeReport report_from_json(const Json& j) {
  GradeReport r;
  r.points = get<int>(j, "points");
  r.max_points = get<int>(j, "max_points");
  const std::string frac = get<std::string>(j, "fraction");
  const auto slash = frac.find('/');
  if (slash == std::string::npos) throw InvalidDocument("fraction is written p/q");
  try {
    r.fraction = Rational(std::stoll(frac.substr(0, slash)), std::stoll(frac.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw InvalidDocument("fraction is written p/q");
  }
  r.not_counted = get_or<bool>(j, "not_counted", false);
  for (const Json& f : get_or<Json>(j, "feedback", Json::array())) {
    Feedback x;
    x.severity = severity_from_string(get<std::string>(f, "severity"));
    x.text = get<std::string>(f, "text");
    if (f.contains("counterexample")) x.counterexample = get<std::string>(f, "counterexample");
    if (f.contains("location")) x.location = get<std::string>(f, "location");
    r.feedback.push_back(std::move(x));
  }
  r.metadata = get_or<std::map<std::string, std::int64_t>>(j, "metadata", {});
  return r;
}

// ---------------------------------------------------------------------------
// Pumping game

Json to_json(const GameMove& m) {
  switch (m.kind) {
    case GameMove::Kind::Claim: return {{"claim", to_string(m.claim)}};
    case GameMove::Kind::Bound: return {{"bound", m.n}};
    case GameMove::Kind::Word: return {{"word", m.word}};
    case GameMove::Kind::Split: return {{"split", {{"x", m.split.x}, {"y", m.split.y}}}};
    case GameMove::Kind::Pump: return {{"pump", m.i}};
  }
  return {};
}

GameMove game_move_from_json(const Json& j) {
  GameMove m;
  if (!j.is_object() || j.size() != 1) throw InvalidDocument("a move is an object with exactly one field");
  if (j.contains("claim")) {
    m.kind = GameMove::Kind::Claim;
    const std::string c = get<std::string>(j, "claim");
    if (c != "regular" && c != "nonregular") throw InvalidDocument("claim is \"regular\" or \"nonregular\"");
    m.claim = c == "regular" ? Claim::Regular : Claim::NonRegular;
  } else if (j.contains("bound")) {
    m.kind = GameMove::Kind::Bound;
    m.n = get<int>(j, "bound");
  } else if (j.contains("word")) {
    m.kind = GameMove::Kind::Word;
    m.word = get<std::string>(j, "word");
  } else if (j.contains("split")) {
    m.kind = GameMove::Kind::Split;
    const Json& s = j.at("split");
    const int x = get<int>(s, "x"), y = get<int>(s, "y");
    if (x < 0 || y < 0) throw InvalidDocument("split lengths are non-negative");
    m.split = {static_cast<std::size_t>(x), static_cast<std::size_t>(y)};
  } else if (j.contains("pump")) {
    m.kind = GameMove::Kind::Pump;
    m.i = get<int>(j, "pump");
  } else {
    throw InvalidDocument("a move is one of claim, bound, word, split, pump");
  }
  return m;
}

Json to_json(const GameState& s) {
  Json j = {{"phase", to_string(s.phase)}, {"winner", to_string(s.winner)}, {"transcript", s.transcript}};
  if (s.claim) j["claim"] = to_string(*s.claim);
  if (s.n) j["n"] = *s.n;
  if (s.w) j["w"] = *s.w;
  if (s.split) {
    j["split"] = {{"x", s.split->x}, {"y", s.split->y}};
    if (s.w) j["split"]["parts"] = show_split(*s.w, *s.split);
  }
  if (s.i) j["i"] = *s.i;
  return j;
}

GameState game_state_from_json(const Json& j) {
  GameState s;
  const std::string phase = get<std::string>(j, "phase");
  const GamePhase phases[] = {GamePhase::ChooseClaim, GamePhase::ChooseBound, GamePhase::ChooseWord,
                              GamePhase::ChooseSplit, GamePhase::ChoosePump,  GamePhase::Over};
  bool known = false;
  for (GamePhase p : phases)
    if (to_string(p) == phase) {
      s.phase = p;
      known = true;
    }
  if (!known) throw InvalidDocument("unknown game phase '" + phase + "'");
  const std::string winner = get<std::string>(j, "winner");
  for (Winner w : {Winner::Undecided, Winner::Student, Winner::Tutor})
    if (to_string(w) == winner) s.winner = w;
  s.transcript = get_or<std::vector<std::string>>(j, "transcript", {});
  if (j.contains("claim")) s.claim = get<std::string>(j, "claim") == "regular" ? Claim::Regular : Claim::NonRegular;
  if (j.contains("n")) s.n = get<int>(j, "n");
  if (j.contains("w")) s.w = get<std::string>(j, "w");
  if (j.contains("split"))
    s.split = Split{get<std::size_t>(j.at("split"), "x"), get<std::size_t>(j.at("split"), "y")};
  if (j.contains("i")) s.i = get<int>(j, "i");
  return s;
}

// ---------------------------------------------------------------------------
// Problems

Json to_json(const Problem& p, Audience audience) {
  const bool teacher = audience == Audience::Teacher;
  Json payload = std::visit(
      overloaded{
          [](const std::monostate&) { return Json::object(); },
          [](const WordsPayload& x) {
            Json j = {{"alphabet", x.alphabet.symbols()}, {"in_count", x.in_count}, {"out_count", x.out_count}};
            std::visit(overloaded{[&](const Regex& r) { j["regex"] = r.print(); },
                                  [&](const Cfg& g) { j["grammar"] = g.print(); },
                                  [&](const Pda& a) { j["pda"] = to_json(a); }},
                       x.language);
            return j;
          },
          [&](const ReConstructionPayload& x) {
            Json j = {{"alphabet", x.alphabet.symbols()}};
            if (teacher) {
              j["solutions"] = Json::array();
              for (const Regex& r : x.solutions) j["solutions"].push_back(r.print());
            }
            return j;
          },
          [&](const ConstructionPayload& x) {
            Json j = Json::object();
            if (teacher) j["solution"] = context_free_json(x.solution);
            return j;
          },
          [](const ReToNfaPayload& x) { return Json{{"goal", x.goal.print()}, {"alphabet", x.alphabet.symbols()}}; },
          [](const EquivDecidePayload& x) {
            return Json{{"regex", x.re.print()}, {"alphabet", x.alphabet.symbols()}, {"w1", x.w1}, {"w2", x.w2}};
          },
          [](const EquivFindPayload& x) {
            return Json{
                {"regex", x.re.print()}, {"alphabet", x.alphabet.symbols()}, {"base", x.base}, {"count", x.count}};
          },
          [&](const PumpingPayload& x) {
            Json j = {{"language", print_arith_lang(x.language)}};
            if (teacher) {
              j["regular"] = x.regular;
              if (x.unpumpable) j["unpumpable"] = print_word_template(*x.unpumpable);
            }
            return j;
          },
          [](const DerivationPayload& x) {
            return Json{{"grammar", x.grammar.print()}, {"word", x.word}, {"mode", to_string(x.mode)}};
          },
          [](const CnfPayload& x) { return Json{{"grammar", x.original.print()}}; },
          [](const CykPayload& x) { return Json{{"grammar", x.grammar.print()}, {"word", x.word}}; },
          [](const WhileToTmPayload& x) {
            return Json{{"program", print_while(x.program)}, {"variables", x.program.var_count}};
          },
      },
      p.payload);
  return {{"kind", to_string(p.kind)},
          {"title", p.title},
          {"description", p.description},
          {"max_points", p.max_points},
          {"payload", payload}};
}

Problem problem_from_json(const Json& j) {
  Problem p;
  p.kind = problem_kind_from_string(get<std::string>(j, "kind"));
  p.title = get_or<std::string>(j, "title", "");
  p.description = get_or<std::string>(j, "description", "");
  p.max_points = get_or<int>(j, "max_points", 10);
  const Json& x = field(j, "payload");
  auto alphabet = [&](const Alphabet& fallback) {
    return x.contains("alphabet") ? Alphabet(get<std::string>(x, "alphabet")) : fallback;
  };
  auto regex = [&](const char* key) { return parse_regex(get<std::string>(x, key)); };

  switch (p.kind) {
    case ProblemKind::ReWords: {
      const Regex r = regex("regex");
      p.payload = WordsPayload{r, alphabet(r.symbols()), get_or<int>(x, "in_count", 1), get_or<int>(x, "out_count", 1)};
      break;
    }
    case ProblemKind::CfgWords: {
      const Cfg g = parse_cfg(get<std::string>(x, "grammar"));
      p.payload = WordsPayload{g, alphabet(g.terminals()), get_or<int>(x, "in_count", 1), get_or<int>(x, "out_count", 1)};
      break;
    }
    case ProblemKind::PdaWords: {
      const Pda a = pda_from_json(field(x, "pda"));
      p.payload = WordsPayload{a, alphabet(a.input_alphabet()), get_or<int>(x, "in_count", 1),
                               get_or<int>(x, "out_count", 1)};
      break;
    }
    case ProblemKind::ReConstruction: {
      ReConstructionPayload r;
      for (const auto& s : get<std::vector<std::string>>(x, "solutions")) r.solutions.push_back(parse_regex(s));
      Alphabet used;
      for (const Regex& s : r.solutions) used = used.merged(s.symbols());
      r.alphabet = alphabet(used);
      p.payload = std::move(r);
      break;
    }
    case ProblemKind::CfgConstruction:
    case ProblemKind::PdaConstruction: {
      const bool pda = p.kind == ProblemKind::PdaConstruction;
      if (!pda && !field(x, "solution").is_string()) throw InvalidDocument("the solution grammar is text");
      p.payload = ConstructionPayload{context_free_from(field(x, "solution"), pda)};
      break;
    }
    case ProblemKind::ReToNfa: {
      const Regex g = regex("goal");
      p.payload = ReToNfaPayload{g, alphabet(g.symbols())};
      break;
    }
    case ProblemKind::EquivClassesDecide: {
      const Regex r = regex("regex");
      p.payload = EquivDecidePayload{r, alphabet(r.symbols()), get<std::string>(x, "w1"), get<std::string>(x, "w2")};
      break;
    }
    case ProblemKind::EquivClassesFind: {
      const Regex r = regex("regex");
      p.payload = EquivFindPayload{r, alphabet(r.symbols()), get<std::string>(x, "base"), get_or<int>(x, "count", 1)};
      break;
    }
    case ProblemKind::PumpingGame: {
      PumpingPayload g{parse_arith_lang(get<std::string>(x, "language")), get<bool>(x, "regular"), std::nullopt};
      if (x.contains("unpumpable") && !x.at("unpumpable").is_null())
        g.unpumpable = parse_word_template(get<std::string>(x, "unpumpable"));
      p.payload = std::move(g);
      break;
    }
    case ProblemKind::FindDerivation:
      p.payload = DerivationPayload{parse_cfg(get<std::string>(x, "grammar")), get<std::string>(x, "word"),
                                    derivation_mode_from_string(get_or<std::string>(x, "mode", "leftmost"))};
      break;
    case ProblemKind::CnfTransform:
      p.payload = CnfPayload{parse_cfg(get<std::string>(x, "grammar"))};
      break;
    case ProblemKind::Cyk:
      p.payload = CykPayload{parse_cfg(get<std::string>(x, "grammar")), get<std::string>(x, "word")};
      break;
    case ProblemKind::WhileToTm: {
      const std::string text = get<std::string>(x, "program");
      p.payload = WhileToTmPayload{x.contains("variables") ? parse_while(text, get<int>(x, "variables"))
                                                           : parse_while(text)};
      break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Attempts

Json to_json(const Attempt& a) {
  return std::visit(
      overloaded{
          [](const WordsAttempt& x) { return Json{{"in", words_json(x.in)}, {"out", words_json(x.out)}}; },
          [](const WordListAttempt& x) { return Json{{"words", words_json(x.words)}}; },
          [](const RegexAttempt& x) { return Json{{"regex", x.text}}; },
          [](const CfgAttempt& x) { return Json{{"grammar", x.text}}; },
          [](const PdaAttempt& x) { return Json{{"pda", to_json(x.pda)}}; },
          [](const BlockNfaAttempt& x) { return Json{{"nfa", to_json(x.nfa)}}; },
          [](const EquivDecideAttempt& x) {
            return Json{{"verdict", x.equivalent ? "equivalent" : "different"}, {"justification", x.justification}};
          },
          [](const GameAttempt& x) {
            Json moves = Json::array();
            for (const GameMove& m : x.moves) moves.push_back(to_json(m));
            return Json{{"moves", moves}};
          },
          [](const DerivationAttempt& x) { return Json{{"steps", x.steps}}; },
          [](const CykAttempt& x) { return Json{{"rows", x.rows}}; },
          [](const TmAttempt& x) { return Json{{"tm", to_json(x.tm)}}; },
      },
      a);
}

Attempt attempt_from_json(ProblemKind kind, const Json& j) {
  switch (kind) {
    case ProblemKind::ReWords:
    case ProblemKind::CfgWords:
    case ProblemKind::PdaWords:
      return WordsAttempt{get_or<std::vector<Word>>(j, "in", {}), get_or<std::vector<Word>>(j, "out", {})};
    case ProblemKind::ReConstruction: return RegexAttempt{get<std::string>(j, "regex")};
    case ProblemKind::CfgConstruction:
    case ProblemKind::CnfTransform: return CfgAttempt{get<std::string>(j, "grammar")};
    case ProblemKind::PdaConstruction: return PdaAttempt{pda_from_json(field(j, "pda"))};
    case ProblemKind::ReToNfa: return BlockNfaAttempt{block_nfa_from_json(field(j, "nfa"))};
    case ProblemKind::EquivClassesDecide: {
      const std::string v = get<std::string>(j, "verdict");
      if (v != "equivalent" && v != "different") throw InvalidDocument("verdict is \"equivalent\" or \"different\"");
      return EquivDecideAttempt{v == "equivalent", get_or<std::string>(j, "justification", "")};
    }
    case ProblemKind::EquivClassesFind: return WordListAttempt{get<std::vector<Word>>(j, "words")};
    case ProblemKind::PumpingGame: {
      GameAttempt g;
      for (const Json& m : field(j, "moves")) g.moves.push_back(game_move_from_json(m));
      return g;
    }
    case ProblemKind::FindDerivation: return DerivationAttempt{get<std::vector<std::string>>(j, "steps")};
    case ProblemKind::Cyk: return CykAttempt{get<std::vector<std::vector<std::string>>>(j, "rows")};
    case ProblemKind::WhileToTm: return TmAttempt{tm_from_json(field(j, "tm"))};
  }
  throw InvalidDocument("unknown problem kind");
}

}  // namespace formalgrade::doc
