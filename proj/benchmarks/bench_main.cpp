#include <benchmark/benchmark.h>

#include <dgm/design_language.hpp>
#include <dgm/environment.hpp>
#include <dgm/system_model.hpp>

namespace {

dgm::Concept half_adder() {
  dgm::Concept c;
  c.add_node({"a", "IN", {{"idx", "0"}}});
  c.add_node({"b", "IN", {{"idx", "1"}}});
  c.add_node({"n1", "NAND", {}});
  c.add_node({"n2", "NAND", {}});
  c.add_node({"n3", "NAND", {}});
  c.add_node({"n4", "NAND", {}});
  c.add_node({"n5", "NAND", {}});
  c.add_node({"s", "OUT", {{"idx", "0"}}});
  c.add_node({"co", "OUT", {{"idx", "1"}}});
  c.add_edge({"a", "out", "n1", "in1"});
  c.add_edge({"b", "out", "n1", "in2"});
  c.add_edge({"a", "out", "n2", "in1"});
  c.add_edge({"n1", "out", "n2", "in2"});
  c.add_edge({"b", "out", "n3", "in1"});
  c.add_edge({"n1", "out", "n3", "in2"});
  c.add_edge({"n2", "out", "n4", "in1"});
  c.add_edge({"n3", "out", "n4", "in2"});
  c.add_edge({"n1", "out", "n5", "in1"});
  c.add_edge({"n1", "out", "n5", "in2"});
  c.add_edge({"n4", "out", "s", "in"});
  c.add_edge({"n5", "out", "co", "in"});
  return c;
}

void BM_CanonicalForm(benchmark::State& state) {
  dgm::Concept c = half_adder();
  for (auto _ : state) benchmark::DoNotOptimize(dgm::canonical_form(c));
}
BENCHMARK(BM_CanonicalForm);

void BM_CompileCircuit(benchmark::State& state) {
  auto domain = dgm::make_domain("circuit");
  dgm::Concept c = half_adder();
  for (auto _ : state) benchmark::DoNotOptimize(dgm::compile_concept(c, *domain, 1));
}
BENCHMARK(BM_CompileCircuit);

void BM_Simulate(benchmark::State& state) {
  auto domain = dgm::make_domain("circuit");
  dgm::MealySystem m = dgm::compile_concept(half_adder(), *domain, 8);
  std::vector<std::string> inputs(8, "1|1");
  for (auto _ : state) benchmark::DoNotOptimize(dgm::simulate(m, inputs));
}
BENCHMARK(BM_Simulate);

void BM_Product(benchmark::State& state) {
  auto domain = dgm::make_domain("circuit");
  dgm::MealySystem m = dgm::compile_concept(half_adder(), *domain, 4);
  for (auto _ : state) benchmark::DoNotOptimize(dgm::product(m, m));
}
BENCHMARK(BM_Product);

void BM_Enumerate2(benchmark::State& state) {
  auto domain = dgm::make_domain("circuit");
  dgm::RuleSet rules = domain->default_rules();
  for (auto _ : state) benchmark::DoNotOptimize(dgm::interpret(rules, 2));
}
BENCHMARK(BM_Enumerate2);

}  // namespace

BENCHMARK_MAIN();
