#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "formalgrade/documents.hpp"

using namespace formalgrade;
namespace fs = std::filesystem;

namespace {

doc::Json load(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return doc::parse(ss.str());
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(FORMALGRADE_FIXTURES)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 5 && name.ends_with(".json") && !name.ends_with(".attempt.json"))
      out.push_back(name.substr(0, name.size() - 5));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("every fixture problem reads, validates, grades, and round-trips") {
  const auto names = fixture_names();
  CHECK(names.size() == all_problem_kinds().size());
  for (const std::string& name : names) {
    INFO(name);
    const fs::path dir(FORMALGRADE_FIXTURES);
    const Problem p = doc::problem_from_json(load(dir / (name + ".json")));
    CHECK(to_string(p.kind) == name);
    CHECK_NOTHROW(validate_problem(p));
    const doc::Json once = doc::to_json(p);
    CHECK(doc::to_json(doc::problem_from_json(once)) == once);

    const doc::Json attempt_doc = load(dir / (name + ".attempt.json"));
    const Attempt a = doc::attempt_from_json(p.kind, attempt_doc);
    CHECK(doc::to_json(doc::attempt_from_json(p.kind, doc::to_json(a))) == doc::to_json(a));

    const GradeReport r = grade(p, a);
    CHECK(r.points >= 0);
    CHECK(r.points <= p.max_points);
    const doc::Json rj = doc::to_json(r);
    CHECK(doc::report_from_json(rj) == r);
    CHECK(rj.at("fraction").get<std::string>().find('/') != std::string::npos);
  }
}

TEST_CASE("students never see teacher-only fields") {
  const fs::path dir(FORMALGRADE_FIXTURES);
  const doc::Json re = doc::to_json(doc::problem_from_json(load(dir / "re-construction.json")), doc::Audience::Student);
  CHECK_FALSE(re.at("payload").contains("solutions"));
  const doc::Json cfg = doc::to_json(doc::problem_from_json(load(dir / "cfg-construction.json")), doc::Audience::Student);
  CHECK_FALSE(cfg.at("payload").contains("solution"));
  const doc::Json game = doc::to_json(doc::problem_from_json(load(dir / "pumping-game.json")), doc::Audience::Student);
  CHECK_FALSE(game.at("payload").contains("regular"));
  CHECK_FALSE(game.at("payload").contains("unpumpable"));
  CHECK(game.at("payload").at("language") == "a^i b^j | i < j");
  const std::string dumped = game.dump();
  CHECK(dumped.find("(n+1)") == std::string::npos);
}

TEST_CASE("malformed documents are rejected with a stable code") {
  auto code_of = [](auto&& f) -> std::string {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return "";
  };
  CHECK(code_of([] { doc::parse("{"); }) == "invalid-document");
  CHECK(code_of([] { doc::problem_from_json(doc::parse(R"({"kind": "nope", "payload": {}})")); }) == "invalid-document");
  CHECK(code_of([] { doc::problem_from_json(doc::parse(R"({"kind": "re-words"})")); }) == "invalid-document");
  CHECK(code_of([] { doc::problem_from_json(doc::parse(R"({"kind": "re-words", "payload": {"regex": 3}})")); }) ==
        "invalid-document");
  CHECK(code_of([] { doc::problem_from_json(doc::parse(R"({"kind": "re-words", "payload": {"regex": "(a"}})")); }) ==
        "syntax-error");
  CHECK(code_of([] { doc::attempt_from_json(ProblemKind::PumpingGame, doc::parse(R"({"moves": [{"jump": 1}]})")); }) ==
        "invalid-document");
  CHECK(code_of([] {
          doc::tm_from_json(doc::parse(
              R"({"tapes": 1, "states": ["s"], "initial": "s", "halting": [], "transitions": [{"from": "s", "read": ["1"], "to": "s", "write": ["1"], "move": ["X"]}]})"));
        }) == "invalid-document");
  CHECK(code_of([] {
          doc::block_nfa_from_json(doc::parse(R"({"states": 1, "accepting": [2]})"));
        }) == "invalid-document");
}

TEST_CASE("game states round-trip") {
  const PumpingPayload p = to_payload(sample_languages()[5]);
  GameMove claim;
  claim.kind = GameMove::Kind::Claim;
  claim.claim = Claim::Regular;
  GameMove bound;
  bound.kind = GameMove::Kind::Bound;
  bound.n = 2;
  GameMove split;
  split.kind = GameMove::Kind::Split;
  split.split = {1, 1};
  const GameState s = replay_game(p, {claim, bound, split});
  const doc::Json j = doc::to_json(s);
  CHECK(doc::game_state_from_json(j) == s);
  CHECK(j.at("split").at("parts") == "a|a|bbb");
  for (const GameMove& m : {claim, bound, split}) CHECK(doc::game_move_from_json(doc::to_json(m)) == m);
}
