#pragma once

#include <json.hpp>

#include "formalgrade/grading.hpp"

// JSON forms of every document the engine reads or writes. Readers throw
// InvalidDocument on shape errors; formalism parse errors pass through.
namespace formalgrade::doc {

using Json = nlohmann::json;

Json to_json(const Pda& p);
Pda pda_from_json(const Json& j);

Json to_json(const MultiTapeTm& m);
MultiTapeTm tm_from_json(const Json& j);

Json to_json(const BlockNfa& a);
BlockNfa block_nfa_from_json(const Json& j);

Json to_json(const CykTable& t);

Json to_json(const GradeReport& r);
GradeReport report_from_json(const Json& j);

Json to_json(const GameState& s);
GameState game_state_from_json(const Json& j);
Json to_json(const GameMove& m);
GameMove game_move_from_json(const Json& j);

// Students never see sample solutions, the regularity flag of a pumping
// language, or its unpumpable word.
enum class Audience { Teacher, Student };

Json to_json(const Problem& p, Audience audience = Audience::Teacher);
Problem problem_from_json(const Json& j);

// Attempts carry no kind of their own; the problem decides how to read them.
Json to_json(const Attempt& a);
Attempt attempt_from_json(ProblemKind kind, const Json& j);

// Parses text, mapping JSON syntax errors to InvalidDocument.
Json parse(std::string_view text);

}  // namespace formalgrade::doc
