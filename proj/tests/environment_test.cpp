#include <doctest.h>

#include <dgm/environment.hpp>
#include <dgm/error.hpp>
#include <dgm/exploratory.hpp>

#include "helpers.hpp"

#include <functional>
#include <optional>
#include <set>

using namespace dgm;
using dgm::testing::half_adder_concept;
using dgm::testing::parity_pipeline_concept;

namespace {

std::optional<Errc> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("compiled half adder matches the arithmetic truth table") {
  auto domain = make_domain("circuit");
  MealySystem m = domain->compile(half_adder_concept(), 4);
  CHECK(m.input.values.size() == 4);
  CHECK(m.output.values.size() == 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      std::string in = std::to_string(a) + "|" + std::to_string(b);
      std::string want = std::to_string(a ^ b) + "|" + std::to_string(a & b);
      CHECK(step(m, m.q0, in, 0).first == want);
    }
}

TEST_CASE("circuit compilation is strict") {
  auto domain = make_domain("circuit");
  CHECK(code_of([&] { domain->compile(Concept::empty(), 2); }) == Errc::compile_error);

  Concept unwired = half_adder_concept();
  unwired.remove_edge({"b", "out", "n1", "in2"});
  CHECK(code_of([&] { domain->compile(unwired, 2); }) == Errc::dangling_port);

  Concept no_out = half_adder_concept();
  no_out.remove_node("s");
  no_out.remove_node("co");
  CHECK(code_of([&] { domain->compile(no_out, 2); }) == Errc::compile_error);

  Concept alien;
  alien.add_node({"x", "SRC", {{"type_out", "int"}}});
  CHECK(code_of([&] { domain->compile(alien, 2); }) == Errc::unknown_symbol);
}

TEST_CASE("circuit cost and frontier signature") {
  auto domain = make_domain("circuit");
  Concept ha = half_adder_concept();
  CHECK(domain->cost(ha) == doctest::Approx(0.5));
  Concept with_and = ha;
  with_and.add_node({"extra", "AND", {}});
  CHECK(domain->cost(with_and) == doctest::Approx(0.7));

  // The signature depends only on the signal structure, not on node names.
  Concept renamed;
  std::map<std::string, std::string> remap;
  for (const auto& n : ha.nodes()) remap[n.id] = "z_" + n.id;
  for (const auto& n : ha.nodes()) renamed.add_node({remap[n.id], n.kind, n.props});
  for (const auto& e : ha.edges())
    renamed.add_edge({remap[e.from_node], e.from_port, remap[e.to_node], e.to_port});
  CHECK(domain->frontier_signature(renamed) == domain->frontier_signature(ha));

  Concept fewer = ha;
  fewer.remove_node("n5");
  CHECK(domain->frontier_signature(fewer) != domain->frontier_signature(ha));
}

TEST_CASE("score_hint prefers finished designs over partial ones") {
  auto domain = make_domain("circuit");
  RequirementSet internal = domain->default_requirements("machine-internal");
  Concept ha = half_adder_concept();
  Concept partial = ha;
  partial.remove_edge({"n4", "out", "s", "in"});
  partial.remove_edge({"n5", "out", "co", "in"});
  CHECK(domain->score_hint(ha, internal) > domain->score_hint(partial, internal));
  CHECK(domain->score_hint(partial, internal) > domain->score_hint(Concept::empty(), internal));
}

TEST_CASE("default policy and rules are well-formed") {
  auto domain = make_domain("circuit");
  CHECK_NOTHROW(domain->default_rules().validate());
  auto policy = domain->default_policy(8);
  std::set<std::string> ids;
  for (const auto& s : policy) {
    CHECK(ids.insert(s.id).second);
    CHECK_FALSE(s.actions.empty());
  }
  CHECK(ids.count("submit-verified") == 1);
  CHECK(ids.count("init-in0") == 1);
}

TEST_CASE("library templates") {
  auto domain = make_domain("circuit");
  Json nand = domain->library_template("nand");
  CHECK_NOTHROW(Concept::from_json(nand.at("concept")));
  Json and2 = domain->library_template("and-from-nand");
  CHECK(and2.at("as_kind") == "AND");
  CHECK_THROWS_AS(domain->library_template("xor-rom"), Error);
  CHECK_THROWS_AS(make_domain("nope"), Error);
}

TEST_CASE("env_reward and env_evaluate") {
  ModelSet models = default_model_set("circuit");
  const EnvironmentModel& mu = models.models[0];
  Concept ha = half_adder_concept();
  CHECK(env_reward(mu, ha) == doctest::Approx(7.5));
  CHECK(env_reward(mu, Concept::empty()) == 0.0);

  Concept unwired = ha;
  unwired.remove_edge({"b", "out", "n1", "in2"});
  CHECK(env_reward(mu, unwired) == 0.0);  // no partial credit

  auto stream = env_evaluate(mu, ha, 5);
  CHECK(stream.size() == mu.horizon + 1);
  for (std::size_t t = 0; t < stream.size(); ++t)
    CHECK(stream[t] == (t == 5 ? doctest::Approx(7.5) : doctest::Approx(0.0)));
  CHECK_THROWS_AS(env_evaluate(mu, ha, mu.horizon + 1), Error);

  Concept alien;
  alien.add_node({"x", "SRC", {{"type_out", "int"}}});
  CHECK_THROWS_AS(env_evaluate(mu, alien, 0), Error);
}

TEST_CASE("rewards outside the declared range violate the contract") {
  ModelSet models = default_model_set("circuit");
  EnvironmentModel narrow = models.models[0];
  narrow.reward_max = 1.0;
  CHECK(code_of([&] { env_reward(narrow, half_adder_concept()); }) ==
        Errc::environment_contract);
}

TEST_CASE("model sets validate and round-trip") {
  ModelSet models = default_model_set("circuit");
  CHECK(models.models[0].horizon == 14);
  ModelSet back = ModelSet::from_json(models.to_json());
  CHECK(back.hash() == models.hash());

  ModelSet bad = models;
  bad.models[0].weight = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.models.clear();
  CHECK_THROWS_AS(bad.validate(), Error);

  Json j = models.to_json();
  j["models"][0]["phi_env"]["location"] = "machine-internal";
  CHECK_THROWS_AS(ModelSet::from_json(j), Error);
}

TEST_CASE("pipeline domain compiles typed chains") {
  auto domain = make_domain("pipeline");
  Concept p = parity_pipeline_concept();
  MealySystem m = domain->compile(p, 3);
  CHECK(step(m, m.q0, "2", 0).first == "0");
  CHECK(step(m, m.q0, "1", 0).first == "1");
  CHECK(step(m, m.q0, kEpsilon, 0).first == kEpsilon);
  CHECK(domain->cost(p) == doctest::Approx(0.9));

  ModelSet models = default_model_set("pipeline");
  CHECK(env_reward(models.models[0], p) == doctest::Approx(4.1));
}

TEST_CASE("pipeline compilation rejects broken chains") {
  auto domain = make_domain("pipeline");
  Concept mismatch;
  mismatch.add_node({"src", "SRC", {{"type_out", "int"}}});
  mismatch.add_node({"xf", "XF", {{"fn", "not"}, {"type_in", "bit"}, {"type_out", "bit"}}});
  mismatch.add_node({"snk", "SNK", {{"type_in", "bit"}}});
  mismatch.add_edge({"src", "out", "xf", "in"});
  mismatch.add_edge({"xf", "out", "snk", "in"});
  CHECK(code_of([&] { domain->compile(mismatch, 2); }) == Errc::compile_error);

  Concept no_sink;
  no_sink.add_node({"src", "SRC", {{"type_out", "int"}}});
  CHECK(code_of([&] { domain->compile(no_sink, 2); }) == Errc::dangling_port);

  Concept stray = parity_pipeline_concept();
  stray.add_node({"lone", "FL", {{"pred", "even"}, {"type_in", "int"}, {"type_out", "int"}}});
  CHECK(code_of([&] { domain->compile(stray, 2); }) == Errc::compile_error);
}

TEST_CASE("filters drop values to epsilon") {
  auto domain = make_domain("pipeline");
  Concept c;
  c.add_node({"src", "SRC", {{"type_out", "int"}}});
  c.add_node({"fl", "FL", {{"pred", "even"}, {"type_in", "int"}, {"type_out", "int"}}});
  c.add_node({"snk", "SNK", {{"type_in", "int"}}});
  c.add_edge({"src", "out", "fl", "in"});
  c.add_edge({"fl", "out", "snk", "in"});
  MealySystem m = domain->compile(c, 2);
  CHECK(step(m, m.q0, "2", 0).first == "2");
  CHECK(step(m, m.q0, "1", 0).first == kEpsilon);
}
