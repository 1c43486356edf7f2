// Command-line driver: grade, generate, validate, play the pumping game,
// serve the HTTP API, and mint tokens.
#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "formalgrade/apg.hpp"
#include "formalgrade/service.hpp"

using namespace formalgrade;
using doc::Json;

namespace {

enum Exit { kOk = 0, kPartial = 1, kInvalid = 2, kStoreError = 3, kPortInUse = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidDocument("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_error(const std::string& code, const std::string& what) {
  std::cerr << "error [" << code << "]: " << what << "\n";
}

void print_report(const GradeReport& r, bool structured) {
  if (structured) {
    std::cout << doc::to_json(r).dump(2) << "\n";
    return;
  }
  std::cout << "points: " << r.points << "/" << r.max_points << " (fraction " << r.fraction.str() << ")\n";
  if (r.not_counted) std::cout << "this attempt is not counted\n";
  for (const Feedback& f : r.feedback) {
    std::cout << "[" << to_string(f.severity) << "] ";
    if (f.location) std::cout << *f.location << ": ";
    std::cout << f.text;
    if (f.counterexample) std::cout << " (counterexample: " << (f.counterexample->empty() ? "eps" : *f.counterexample) << ")";
    std::cout << "\n";
  }
}

void print_state(const GameState& s, bool structured) {
  if (structured) {
    std::cout << doc::to_json(s).dump() << "\n";
    return;
  }
  for (const std::string& line : s.transcript) std::cout << "  " << line << "\n";
  if (s.winner != Winner::Undecided) return;
  switch (s.phase) {
    case GamePhase::ChooseClaim: std::cout << "your move: claim regular | claim nonregular\n"; break;
    case GamePhase::ChooseBound: std::cout << "your move: n <number>\n"; break;
    case GamePhase::ChooseWord: std::cout << "your move: word <w>\n"; break;
    case GamePhase::ChooseSplit: std::cout << "your move: split <|x|> <|y|>\n"; break;
    case GamePhase::ChoosePump: std::cout << "your move: pump <i>\n"; break;
    case GamePhase::Over: break;
  }
}

GameMove read_move(const std::string& line) {
  std::istringstream in(line);
  std::string verb;
  in >> verb;
  GameMove m;
  if (verb == "claim") {
    std::string c;
    in >> c;
    m.kind = GameMove::Kind::Claim;
    if (c == "regular") m.claim = Claim::Regular;
    else if (c == "nonregular") m.claim = Claim::NonRegular;
    else throw InvalidDocument("claim regular or claim nonregular");
  } else if (verb == "n") {
    m.kind = GameMove::Kind::Bound;
    if (!(in >> m.n)) throw InvalidDocument("n needs a number");
  } else if (verb == "word") {
    m.kind = GameMove::Kind::Word;
    in >> m.word;
    if (m.word == "eps") m.word.clear();
  } else if (verb == "split") {
    m.kind = GameMove::Kind::Split;
    if (!(in >> m.split.x >> m.split.y)) throw InvalidDocument("split needs |x| and |y|");
  } else if (verb == "pump") {
    m.kind = GameMove::Kind::Pump;
    if (!(in >> m.i)) throw InvalidDocument("pump needs a number");
  } else {
    throw InvalidDocument("unknown move '" + verb + "'");
  }
  return m;
}

int cmd_grade(const std::string& problem_file, const std::string& attempt_file, bool structured) {
  GradeReport r;
  try {
    const Problem p = doc::problem_from_json(doc::parse(read_file(problem_file)));
    const Attempt a = doc::attempt_from_json(p.kind, doc::parse(read_file(attempt_file)));
    r = grade(p, a);
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kInvalid;
  }
  print_report(r, structured);
  return r.points == r.max_points && !r.not_counted ? kOk : kPartial;
}

int cmd_generate(const std::string& kind, int d_min, int d_max, std::uint64_t seed, int count, bool structured) {
  Json out = Json::array();
  try {
    GenerationRequest req{problem_kind_from_string(kind), d_min, d_max, seed};
    for (int k = 0; k < count; ++k, ++req.seed) {
      const Problem p = generate(req);
      if (structured) {
        out.push_back(doc::to_json(p));
      } else {
        std::cout << doc::to_json(p).dump(2) << "\n";
      }
    }
  } catch (const NoCandidateInBand& e) {
    print_error(e.code(), e.what());
    return kPartial;
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kInvalid;
  }
  if (structured) std::cout << (count == 1 ? out[0] : out).dump() << "\n";
  return kOk;
}

int cmd_validate(const std::string& file, const std::string& as, bool structured) {
  std::vector<std::string> warnings;
  try {
    const std::string text = read_file(file);
    if (as == "problem") {
      warnings = validate_problem(doc::problem_from_json(doc::parse(text)));
    } else if (as == "regex") {
      parse_regex(text.substr(0, text.find_last_not_of(" \n\r\t") + 1));
    } else if (as == "cfg") {
      std::vector<Diagnostic> diags;
      parse_cfg(text, &diags);
      for (const Diagnostic& d : diags) warnings.push_back(d.text);
    } else if (as == "while") {
      parse_while(text);
    } else if (as == "pda") {
      doc::pda_from_json(doc::parse(text));
    } else if (as == "tm") {
      doc::tm_from_json(doc::parse(text));
    } else if (as == "nfa") {
      doc::block_nfa_from_json(doc::parse(text));
    }
  } catch (const Error& e) {
    if (structured) std::cout << Json{{"valid", false}, {"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    else print_error(e.code(), e.what());
    return kInvalid;
  }
  if (structured) {
    std::cout << Json{{"valid", true}, {"warnings", warnings}}.dump() << "\n";
  } else {
    std::cout << "valid\n";
    for (const std::string& w : warnings) std::cout << "[warning] " << w << "\n";
  }
  return kOk;
}

int cmd_game(const std::string& problem_file, bool structured) {
  PumpingPayload payload;
  try {
    const Problem p = doc::problem_from_json(doc::parse(read_file(problem_file)));
    if (p.kind != ProblemKind::PumpingGame) throw InvalidPayload("not a pumping-game problem");
    payload = std::get<PumpingPayload>(p.payload);
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kInvalid;
  }
  GameState s;
  if (!structured) std::cout << "language: { " << print_arith_lang(payload.language) << " }\n";
  print_state(s, structured);
  std::string line;
  while (s.winner == Winner::Undecided && std::getline(std::cin, line)) {
    if (line.empty()) continue;
    try {
      const GameMove m = structured ? doc::game_move_from_json(doc::parse(line)) : read_move(line);
      const std::size_t seen = s.transcript.size();
      s = pumping_game_step(payload, s, m);
      if (structured) {
        print_state(s, true);
      } else {
        for (std::size_t k = seen; k < s.transcript.size(); ++k) std::cout << "  " << s.transcript[k] << "\n";
        GameState prompt_only;
        prompt_only.phase = s.phase;
        if (s.winner == Winner::Undecided) print_state(prompt_only, false);
      }
    } catch (const Error& e) {
      print_error(e.code(), e.what());
    }
  }
  if (s.winner == Winner::Undecided) return kPartial;
  return s.winner == Winner::Student ? kOk : kPartial;
}

HttpServer* g_server = nullptr;

int cmd_serve(const std::string& config_file) {
  ServerConfig cfg;
  try {
    cfg = load_server_config(config_file.empty() ? Json::object() : doc::parse(read_file(config_file)));
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kInvalid;
  }
  std::unique_ptr<Store> store;
  try {
    store = std::make_unique<Store>(cfg.store_path);
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kStoreError;
  }
  Service service(*store);
  HttpServer server(service, cfg.token_secret);
  if (!server.bind(cfg.addr, cfg.port)) {
    print_error("port-in-use", "cannot bind " + cfg.addr + ":" + std::to_string(cfg.port));
    return kPortInUse;
  }
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cout << "listening on " << cfg.addr << ":" << cfg.port << std::endl;
  server.listen();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"formalgrade: grading and generation for automata exercises"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "structured"}));

  std::string problem_file, attempt_file;
  auto* g = app.add_subcommand("grade", "grade an attempt against a problem");
  g->add_option("problem", problem_file)->required();
  g->add_option("attempt", attempt_file)->required();

  std::string kind;
  int d_min = 1, d_max = 10, count = 1;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("generate", "generate problems of a difficulty band");
  gen->add_option("--kind", kind)->required();
  gen->add_option("--min", d_min)->check(CLI::Range(1, 10));
  gen->add_option("--max", d_max)->check(CLI::Range(1, 10));
  gen->add_option("--seed", seed);
  gen->add_option("--count", count)->check(CLI::PositiveNumber);

  std::string validate_file, as = "problem";
  auto* val = app.add_subcommand("validate", "check a problem or formalism file");
  val->add_option("file", validate_file)->required();
  val->add_option("--as", as)->check(CLI::IsMember({"problem", "regex", "cfg", "while", "pda", "tm", "nfa"}));

  std::string game_file;
  auto* game = app.add_subcommand("game", "play the pumping-lemma game against the tutor");
  game->add_option("problem", game_file)->required();

  std::string config_file;
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("config", config_file);

  std::string user, role = "student", secret;
  auto* token = app.add_subcommand("token", "mint a bearer token");
  token->add_option("--user", user)->required();
  token->add_option("--role", role)->check(CLI::IsMember({"teacher", "student"}));
  token->add_option("--secret", secret, "defaults to FG_TOKEN_SECRET");

  for (CLI::App* sub : {g, gen, val, game, serve, token})
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"text", "structured"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }
  const bool structured = format == "structured";

  if (*g) return cmd_grade(problem_file, attempt_file, structured);
  if (*gen) return cmd_generate(kind, d_min, d_max, seed, count, structured);
  if (*val) return cmd_validate(validate_file, as, structured);
  if (*game) return cmd_game(game_file, structured);
  if (*serve) return cmd_serve(config_file);
  if (secret.empty())
    if (const char* v = std::getenv("FG_TOKEN_SECRET")) secret = v;
  if (secret.empty()) {
    print_error("invalid-document", "no secret given and FG_TOKEN_SECRET is unset");
    return kInvalid;
  }
  try {
    std::cout << issue_token(secret, {user, role == "teacher" ? Role::Teacher : Role::Student}) << "\n";
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return kInvalid;
  }
  return kOk;
}
