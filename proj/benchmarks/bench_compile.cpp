#include <benchmark/benchmark.h>

#include <sstream>
#include <string>

#include "wfc/inference.hpp"
#include "wfc/parser.hpp"
#include "wfc/symbolic.hpp"

namespace {

// Transitive closure of a chain graph with n nodes, already ground.
std::string chain_tc_text(int n) {
  std::ostringstream text;
  for (int i = 1; i < n; ++i)
    text << "r(v" << i << ",v" << i + 1 << ") :- e(v" << i << ",v" << i + 1 << ").\n";
  for (int i = 1; i < n; ++i)
    for (int j = i + 2; j <= n; ++j)
      text << "r(v" << i << ",v" << j << ") :- e(v" << i << ",v" << i + 1 << "), r(v" << i + 1
           << ",v" << j << ").\n";
  return text.str();
}

const char* kSmokers =
    "#domain a b c.\n"
    "smokes(X) :- stress(X).\n"
    "smokes(X) :- fr(X,Y), smokes(Y).\n";

void BM_CompileChainCircuit(benchmark::State& state) {
  const wfc::GroundProgram g = wfc::ground(wfc::parse(chain_tc_text(static_cast<int>(state.range(0)))));
  wfc::CompileOptions options;
  options.backend = wfc::Backend::circuit;
  for (auto _ : state) {
    wfc::Trace trace = wfc::compile(g, options);
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(BM_CompileChainCircuit)->DenseRange(4, 10, 2);

void BM_CompileChainBdd(benchmark::State& state) {
  const wfc::GroundProgram g = wfc::ground(wfc::parse(chain_tc_text(static_cast<int>(state.range(0)))));
  wfc::CompileOptions options;
  options.backend = wfc::Backend::bdd;
  for (auto _ : state) {
    wfc::Trace trace = wfc::compile(g, options);
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(BM_CompileChainBdd)->DenseRange(4, 10, 2);

void BM_CompileSmokers(benchmark::State& state) {
  const wfc::GroundProgram g = wfc::ground(wfc::parse(kSmokers));
  for (auto _ : state) {
    wfc::Trace trace = wfc::compile(g);
    benchmark::DoNotOptimize(trace.steps.size());
  }
}
BENCHMARK(BM_CompileSmokers);

void BM_SmokersWmc(benchmark::State& state) {
  const wfc::GroundProgram g = wfc::ground(wfc::parse(kSmokers));
  wfc::Trace trace = wfc::compile(g);
  wfc::WeightFunction weights;
  for (wfc::AtomId a : g.alphabet().params()) {
    const std::string& name = g.alphabet().name(a);
    weights.set_exact(name, name.starts_with("stress") ? "0.2" : "0.1",
                      name.starts_with("stress") ? "0.8" : "0.9");
  }
  const wfc::Expr evidence = wfc::parse_evidence("smokes(a)", g.alphabet());
  for (auto _ : state) {
    benchmark::DoNotOptimize(wfc::wmc(trace, &evidence, weights));
  }
}
BENCHMARK(BM_SmokersWmc);

void BM_OracleSweepGear(benchmark::State& state) {
  const char* gear =
      "turns1(0) :- turns2(0).\nturns2(0) :- turns1(0).\n"
      "turns1(1) :- turns2(1).\nturns2(1) :- turns1(1).\n"
      "turns1(1) :- turns1(0), not button1(0).\nturns2(1) :- turns2(0), not button2(0).\n"
      "turns1(1) :- not turns1(0), button1(0).\nturns2(1) :- not turns2(0), button2(0).\n";
  const wfc::GroundProgram g = wfc::ground(wfc::parse(gear));
  wfc::Trace trace = wfc::compile(g);
  for (auto _ : state) {
    const wfc::OracleReport report = wfc::validate_against_oracle(trace);
    benchmark::DoNotOptimize(report.pass);
  }
}
BENCHMARK(BM_OracleSweepGear);

}  // namespace

BENCHMARK_MAIN();
