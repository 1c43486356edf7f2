#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "formalgrade/grading.hpp"

namespace formalgrade {

// Generator ranges. Each one is a tuning choice, not a law.
namespace apg {
inline constexpr int kCandidates = 100;
inline constexpr int kMinNonterminals = 3, kMaxNonterminals = 6;
inline constexpr int kMinTerminals = 2, kMaxTerminals = 3;
inline constexpr int kMinProductions = 4, kMaxProductions = 10;
inline constexpr int kMaxBody = 3;
inline constexpr int kMinSurvivingProductions = 3;
inline constexpr int kWordLengthProbe = 6;
inline constexpr int kCykMinWord = 3, kCykMaxWord = 7;
inline constexpr int kWordsIn = 3, kWordsOut = 2;
inline constexpr int kMinMutations = 1, kMaxMutations = 4;
inline constexpr Natural kWhileInputBound = 3;
inline constexpr std::uint64_t kWhileStepCap = 10000;
inline constexpr std::chrono::seconds kWhileBudget{2};
}  // namespace apg

struct GenerationRequest {
  ProblemKind kind = ProblemKind::CfgWords;
  int d_min = 1;
  int d_max = 10;
  std::uint64_t seed = 0;
};

struct ScoredCandidate {
  std::optional<Problem> problem;  // absent when the draw was unusable
  Rational qual;                   // 0 = trivial or infeasible
  Rational diff;                   // on the 1..10 scale
  int raw_diff = 0;                // before normalization
};

struct GenerationStats {
  int candidates = 0;
  int usable = 0;   // qual > 0
  int in_band = 0;  // usable with d_min <= diff <= d_max
  int chosen = -1;  // candidate index
  // Per-candidate scores in candidate order, for auditing the selection.
  std::vector<Rational> quals, diffs;
};

bool apg_supports(ProblemKind kind);

// 100 candidates from `seed`; the best quality in the band wins, ties going
// to the lowest index. Throws NoCandidateInBand, InvalidPayload for a kind
// without a generator or a malformed band.
Problem generate(const GenerationRequest& req, GenerationStats* stats = nullptr);
// Same pipeline scoring candidates one by one, for tests.
Problem generate_reference(const GenerationRequest& req, GenerationStats* stats = nullptr);

// One random grammar exercise of the given CFG kind.
ScoredCandidate gen_cfg_candidate(ProblemKind kind, std::mt19937_64& rng);
// Scores a fixed grammar after sanitizing it; `rng` draws the embedded word
// for the kinds that need one.
ScoredCandidate score_cfg(ProblemKind kind, const Cfg& g, std::mt19937_64& rng);

struct BaseProgram {
  std::string name;
  std::string text;
  int difficulty = 1;
};
const std::vector<BaseProgram>& base_programs();

ScoredCandidate gen_while_candidate(std::mt19937_64& rng);
// Quality of a while program: 0 on non-termination or constant output,
// otherwise distinct outputs per tested input.
Rational while_quality(const WhileProgram& p);

// Affine map of a raw difficulty onto 1..10, clamped.
Rational normalize_difficulty(int raw, int lo, int hi);

}  // namespace formalgrade
