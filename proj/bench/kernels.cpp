// Parallel kernels against their serial references. Run with
// OMP_NUM_THREADS set to compare thread counts.
#include <benchmark/benchmark.h>

#include "formalgrade/apg.hpp"
#include "formalgrade/documents.hpp"

using namespace formalgrade;

namespace {

const Cfg& balanced() {
  static const Cfg g = to_cnf(parse_cfg("S -> aSb | SS | ab | c"));
  return g;
}

const Pda& counter() {
  static const Pda p = doc::pda_from_json(doc::Json::parse(R"({
    "states": ["q"], "input_alphabet": "ab", "stack_alphabet": "XZ",
    "initial": "q", "initial_stack": "Z", "acceptance": "empty", "accepting": [],
    "transitions": [
      {"from": "q", "read": "a", "pop": "Z", "to": "q", "push": "XZ"},
      {"from": "q", "read": "a", "pop": "X", "to": "q", "push": "XX"},
      {"from": "q", "read": "b", "pop": "X", "to": "q", "push": ""},
      {"from": "q", "read": "eps", "pop": "Z", "to": "q", "push": ""}]})"));
  return p;
}

const WhileProgram& product() {
  static const WhileProgram p = parse_while(
      "x2 := x0 + 0; while x1 != 0 do x3 := x3 + 0; x3 := x3 - 1; x1 := x1 - 1; "
      "while x2 != 0 do x4 := x4 + 1; x2 := x2 - 1 end; "
      "while x4 != 0 do x0 := x0 + 1; x2 := x2 + 1; x4 := x4 - 1 end end");
  return p;
}

CompareOptions compare_options() {
  CompareOptions o;
  o.step_cap = 5000;
  o.max_input_value = 4;
  return o;
}

void BM_CnfWords(benchmark::State& st) {
  const CompiledCnf g = compile_cnf(balanced());
  for (auto _ : st)
    benchmark::DoNotOptimize(cnf_words_of_length(g, balanced().terminals(), st.range(0), Deadline::never()));
}

void BM_CnfWordsReference(benchmark::State& st) {
  const CompiledCnf g = compile_cnf(balanced());
  for (auto _ : st)
    benchmark::DoNotOptimize(cnf_words_of_length_reference(g, balanced().terminals(), st.range(0)));
}

void BM_PdaWords(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(pda_words_of_length(counter(), counter().input_alphabet(), st.range(0), Deadline::never()));
}

void BM_PdaWordsReference(benchmark::State& st) {
  for (auto _ : st)
    benchmark::DoNotOptimize(pda_words_of_length_reference(counter(), counter().input_alphabet(), st.range(0)));
}

void BM_CompareIo(benchmark::State& st) {
  const MultiTapeTm m = compile_to_tm(product());
  for (auto _ : st) benchmark::DoNotOptimize(compare_io(product(), m, Deadline::never(), compare_options()));
}

void BM_CompareIoReference(benchmark::State& st) {
  const MultiTapeTm m = compile_to_tm(product());
  for (auto _ : st) benchmark::DoNotOptimize(compare_io_reference(product(), m, Deadline::never(), compare_options()));
}

void BM_Generate(benchmark::State& st) {
  const GenerationRequest req{static_cast<ProblemKind>(st.range(0)), 1, 10, 7};
  for (auto _ : st) benchmark::DoNotOptimize(generate(req));
}

void BM_GenerateReference(benchmark::State& st) {
  const GenerationRequest req{static_cast<ProblemKind>(st.range(0)), 1, 10, 7};
  for (auto _ : st) benchmark::DoNotOptimize(generate_reference(req));
}

void generation_kinds(benchmark::internal::Benchmark* b) {
  for (ProblemKind k : {ProblemKind::Cyk, ProblemKind::WhileToTm}) b->Arg(static_cast<int>(k));
}

}  // namespace

BENCHMARK(BM_CnfWords)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CnfWordsReference)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PdaWords)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PdaWordsReference)->Arg(12)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareIo)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareIoReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Generate)->Apply(generation_kinds)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateReference)->Apply(generation_kinds)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
