#include <benchmark/benchmark.h>

#include <vector>

#include "ltlzinc/circuit.hpp"
#include "ltlzinc/dataset.hpp"
#include "ltlzinc/dfa.hpp"
#include "ltlzinc/formula.hpp"
#include "ltlzinc/inference.hpp"
#include "ltlzinc/rng.hpp"
#include "ltlzinc/semiring.hpp"
#include "ltlzinc/task.hpp"

namespace {

using namespace ltlzinc;

TaskSpec task(int i) { return *builtin_task("task" + std::to_string(i)); }

std::vector<std::string> atom_names(const TaskSpec& spec) {
  std::vector<std::string> atoms;
  for (const auto& [name, text] : spec.constraints) atoms.push_back(name);
  return atoms;
}

void BM_Translate(benchmark::State& state) {
  const TaskSpec spec = task(static_cast<int>(state.range(0)));
  const Formula f = parse_ltlf(spec.formula);
  const auto atoms = atom_names(spec);
  for (auto _ : state) benchmark::DoNotOptimize(ltlf_to_dfa(f, atoms));
}
BENCHMARK(BM_Translate)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond);

void BM_CompileTask(benchmark::State& state) {
  const TaskSpec spec = task(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compile_task(spec));
}
BENCHMARK(BM_CompileTask)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

void BM_BuildCircuits(benchmark::State& state) {
  const CompiledTask ct = compile_task(task(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(build_task_circuits(ct.dfa()));
}
BENCHMARK(BM_BuildCircuits)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond);

void BM_GenerateDataset(benchmark::State& state) {
  const CompiledTask ct = compile_task(task(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(ct));
}
BENCHMARK(BM_GenerateDataset)->DenseRange(1, 6)->Unit(benchmark::kMillisecond);

// One belief update per engine on task1 (largest automaton).
struct StepFixture {
  CompiledTask ct = compile_task(task(1));
  TaskCircuits tc = build_task_circuits(ct.dfa());
  BeliefState b;
  std::vector<double> cb;

  StepFixture() {
    const std::size_t n = ct.dfa().num_states();
    b.prob.assign(n, 1.0 / static_cast<double>(n));
    cb.assign(ct.dfa().num_atoms(), 0.3);
  }
};

void BM_StepExact(benchmark::State& state) {
  const StepFixture fx;
  for (auto _ : state) benchmark::DoNotOptimize(exact_step(fx.ct.dfa(), fx.b, fx.cb));
}
BENCHMARK(BM_StepExact);

void BM_StepFuzzyP(benchmark::State& state) {
  const StepFixture fx;
  for (auto _ : state)
    benchmark::DoNotOptimize(fuzzy_step<ProbabilitySemiring>(fx.tc, fx.b, fx.cb));
}
BENCHMARK(BM_StepFuzzyP);

void BM_StepSddnnfP(benchmark::State& state) {
  const StepFixture fx;
  for (auto _ : state)
    benchmark::DoNotOptimize(sddnnf_step<ProbabilitySemiring>(fx.tc, fx.b, fx.cb));
}
BENCHMARK(BM_StepSddnnfP);

void BM_StepSddnnfLP(benchmark::State& state) {
  const StepFixture fx;
  for (auto _ : state)
    benchmark::DoNotOptimize(sddnnf_step<LogProbabilitySemiring>(fx.tc, fx.b, fx.cb));
}
BENCHMARK(BM_StepSddnnfLP);

void BM_EvaluateTestSplit(benchmark::State& state) {
  const CompiledTask ct = compile_task(task(3));
  const Dataset ds = generate_dataset(ct);
  OracleConfig oracle;
  oracle.kind = OracleKind::Flip;
  oracle.p = 0.1;
  const auto engine = static_cast<EngineKind>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(ct, ds, engine, oracle));
  state.SetLabel(std::string(engine_name(engine)));
}
BENCHMARK(BM_EvaluateTestSplit)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
