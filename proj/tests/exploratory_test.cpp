#include <doctest.h>

#include <dgm/environment.hpp>
#include <dgm/error.hpp>
#include <dgm/exploratory.hpp>

#include "helpers.hpp"

#include <set>

using namespace dgm;
using dgm::testing::half_adder_concept;

namespace {

struct Fixture {
  std::shared_ptr<const Domain> domain = make_domain("circuit");
  RuleSet rules;
  RequirementSet reqs;
  ActionContext ctx;

  Fixture() {
    rules = domain->default_rules();
    reqs = domain->default_requirements("machine-internal");
    ctx.rules = &rules;
    ctx.domain = domain.get();
    ctx.internal_reqs = &reqs;
  }
};

DesignAction action(const std::string& kind, Json params,
                    std::optional<Json> guard = std::nullopt) {
  return DesignAction{kind, std::move(params), std::move(guard)};
}

}  // namespace

TEST_CASE("instantiate and guards") {
  Fixture fx;
  Concept c = Concept::empty();
  auto a = apply_action(
      c, action("instantiate", Json{{"kind", "IN"}, {"props", {{"idx", "0"}}}}), fx.ctx);
  REQUIRE(a.has_value());
  CHECK(a->node_count() == 1);
  CHECK(a->nodes().front().props.at("idx") == "0");

  // A guard demanding no IN yet blocks the second application.
  Json guard{{"atom", "count"}, {"kind", "IN"}, {"cmp", "eq"}, {"n", 0}};
  auto b = apply_action(
      *a, action("instantiate", Json{{"kind", "IN"}, {"props", {{"idx", "1"}}}}, guard), fx.ctx);
  CHECK_FALSE(b.has_value());

  // Out-of-alphabet kinds and property values are swallowed as failures.
  CHECK_FALSE(apply_action(c, action("instantiate", Json{{"kind", "FLUX"}}), fx.ctx));
  CHECK_FALSE(apply_action(
      c, action("instantiate", Json{{"kind", "IN"}, {"props", {{"idx", "7"}}}}), fx.ctx));
  CHECK_FALSE(apply_action(c, action("mystery", Json::object()), fx.ctx));
}

TEST_CASE("connect selectors and permissibility") {
  Fixture fx;
  Concept c = Concept::empty();
  c = *apply_action(c, action("instantiate", Json{{"kind", "IN"}, {"props", {{"idx", "0"}}}}),
                    fx.ctx);
  c = *apply_action(c, action("instantiate", Json{{"kind", "NAND"}}), fx.ctx);
  // "last" resolves to the NAND, "sig" 0 to the IN's output.
  auto wired = apply_action(
      c, action("connect", Json{{"from", {{"sig", 0}}}, {"to", {{"last", "in1"}}}}), fx.ctx);
  REQUIRE(wired.has_value());
  CHECK(wired->edges().size() == 1);

  // Duplicate edges are refused.
  CHECK_FALSE(apply_action(
      *wired, action("connect", Json{{"from", {{"sig", 0}}}, {"to", {{"last", "in1"}}}}),
      fx.ctx));
  // A second driver on the same port violates wire-fanin.
  auto gate2 = apply_action(*wired, action("instantiate", Json{{"kind", "NAND"}}), fx.ctx);
  auto second = apply_action(
      *gate2,
      action("connect", Json{{"from", {{"last", "out"}}},
                             {"to", {{"node_kind", "NAND"}, {"occ", 0}, {"port", "in1"}}}}),
      fx.ctx);
  CHECK_FALSE(second.has_value());
  // Dangling signal indices resolve to nothing.
  CHECK_FALSE(apply_action(
      c, action("connect", Json{{"from", {{"sig", 9}}}, {"to", {{"last", "in1"}}}}), fx.ctx));
}

TEST_CASE("set-property, verify and submit") {
  Fixture fx;
  Concept c = Concept::empty();
  c = *apply_action(c, action("instantiate", Json{{"kind", "IN"}, {"props", {{"idx", "0"}}}}),
                    fx.ctx);
  auto moved = apply_action(
      c, action("set-property", Json{{"node", {{"node_kind", "IN"}, {"port", "out"}}},
                                     {"prop", "idx"}, {"value", "1"}}),
      fx.ctx);
  REQUIRE(moved.has_value());
  CHECK(moved->nodes().front().props.at("idx") == "1");
  CHECK_FALSE(apply_action(
      c, action("set-property", Json{{"node", {{"node_kind", "IN"}, {"port", "out"}}},
                                     {"prop", "idx"}, {"value", "9"}}),
      fx.ctx));

  Concept ha = half_adder_concept();
  auto ok = apply_action(ha, action("verify", Json{{"all", true}}), fx.ctx);
  REQUIRE(ok.has_value());
  CHECK(*ok == ha);
  CHECK_FALSE(apply_action(c, action("verify", Json{{"all", true}}), fx.ctx));
  auto sub = apply_action(ha, action("submit", Json::object()), fx.ctx);
  REQUIRE(sub.has_value());
  CHECK(*sub == ha);
}

TEST_CASE("refine swaps a gate for its template without changing behavior") {
  Fixture fx;
  Concept c;
  c.add_node({"a", "IN", {{"idx", "0"}}});
  c.add_node({"b", "IN", {{"idx", "1"}}});
  c.add_node({"g", "AND", {}});
  c.add_node({"o", "OUT", {{"idx", "0"}}});
  c.add_edge({"a", "out", "g", "in1"});
  c.add_edge({"b", "out", "g", "in2"});
  c.add_edge({"g", "out", "o", "in"});

  auto refined = apply_action(
      c, action("refine", Json{{"node", {{"node_kind", "AND"}, {"port", "in1"}}},
                               {"template", "and-from-nand"}}),
      fx.ctx);
  REQUIRE(refined.has_value());
  for (const auto& n : refined->nodes()) CHECK(n.kind != "AND");
  MealySystem before = fx.domain->compile(c, 2);
  MealySystem after = fx.domain->compile(*refined, 2);
  CHECK(equivalent(before, after, 2));
}

TEST_CASE("abstract folds a matched template into one component") {
  Fixture fx;
  Concept c;
  c.add_node({"a", "IN", {{"idx", "0"}}});
  c.add_node({"b", "IN", {{"idx", "1"}}});
  c.add_node({"g0", "NAND", {}});
  c.add_node({"g1", "NAND", {}});
  c.add_node({"o", "OUT", {{"idx", "0"}}});
  c.add_edge({"a", "out", "g0", "in1"});
  c.add_edge({"b", "out", "g0", "in2"});
  c.add_edge({"g0", "out", "g1", "in1"});
  c.add_edge({"g0", "out", "g1", "in2"});
  c.add_edge({"g1", "out", "o", "in"});

  auto folded =
      apply_action(c, action("abstract", Json{{"template", "and-from-nand"}}), fx.ctx);
  REQUIRE(folded.has_value());
  std::size_t ands = 0, nands = 0;
  for (const auto& n : folded->nodes()) {
    if (n.kind == "AND") ++ands;
    if (n.kind == "NAND") ++nands;
  }
  CHECK(ands == 1);
  CHECK(nands == 0);
  CHECK(equivalent(fx.domain->compile(c, 2), fx.domain->compile(*folded, 2), 2));

  // The half adder's inner NAND feeds nodes outside the pattern, so the
  // fold must refuse rather than cut those wires.
  CHECK_FALSE(apply_action(half_adder_concept(),
                           action("abstract", Json{{"template", "and-from-nand"}}), fx.ctx));
}

TEST_CASE("compose-product splices a library template") {
  Fixture fx;
  auto merged = apply_action(Concept::empty(),
                             action("compose-product", Json{{"template", "nand"}}), fx.ctx);
  REQUIRE(merged.has_value());
  CHECK(merged->node_count() == 1);
  CHECK(merged->nodes().front().kind == "NAND");
}

TEST_CASE("apply_sequence is all-or-nothing and canonicalizes") {
  Fixture fx;
  DesignSequence gate{"gate", {action("instantiate", Json{{"kind", "NAND"}}),
                               action("connect", Json{{"from", {{"sig", 0}}},
                                                      {"to", {{"last", "in1"}}}})}};
  // On the empty concept the connect step fails, so nothing happens.
  CHECK_FALSE(apply_sequence(Concept::empty(), gate, fx.rules, *fx.domain, fx.reqs));

  Concept seeded;
  seeded.add_node({"a0", "IN", {{"idx", "0"}}});  // sorts before generated gate ids
  auto res = apply_sequence(seeded, gate, fx.rules, *fx.domain, fx.reqs);
  REQUIRE(res.has_value());
  CHECK_FALSE(res->submitted);
  CHECK(canonical_form(res->design) == res->design);
}

TEST_CASE("interpreter application: retention, dedup, ranking, ceiling") {
  Fixture fx;
  UtilityParams up;
  up.beam_k = 12;
  up.max_signals = 4;
  auto policy = fx.domain->default_policy(up.max_signals);
  InterpreterOutcome one =
      apply_interpreter({Concept::empty()}, fx.rules, policy, up, *fx.domain, fx.reqs);
  CHECK(one.expansions > 0);
  CHECK(one.frontier.size() <= up.beam_k);
  std::set<std::string> sigs, dumps;
  for (const auto& c : one.frontier) {
    CHECK(is_permissible(c, fx.rules));
    CHECK(canonical_form(c) == c);
    CHECK(dumps.insert(canonical_dump(c.to_json())).second);
    CHECK(sigs.insert(fx.domain->frontier_signature(c)).second);
  }
  // Deterministic: a second identical call returns the same frontier.
  InterpreterOutcome two =
      apply_interpreter({Concept::empty()}, fx.rules, policy, up, *fx.domain, fx.reqs);
  REQUIRE(two.frontier.size() == one.frontier.size());
  for (std::size_t i = 0; i < one.frontier.size(); ++i)
    CHECK(two.frontier[i] == one.frontier[i]);

  UtilityParams tiny = up;
  tiny.expansion_ceiling = 3;
  CHECK_THROWS_AS(
      apply_interpreter({Concept::empty()}, fx.rules, policy, tiny, *fx.domain, fx.reqs),
      Error);
}

TEST_CASE("episodes are reproducible and find the half adder") {
  auto domain = make_domain("circuit");
  UtilityParams up;
  up.beam_k = 16;
  MachineState ms = initial_state(*domain, 7, up);
  ModelSet models = default_model_set("circuit");
  EpisodeResult a = run_episode(ms, models, *domain, 14);
  REQUIRE(a.submitted.has_value());
  CHECK(a.per_model_rewards.size() == 1);
  CHECK(a.per_model_rewards[0] == doctest::Approx(7.5));
  CHECK(a.utility == doctest::Approx(7.5 - 1e-5 * static_cast<double>(a.expansions)));
  CHECK(a.steps.back().t == a.submit_step);
  CHECK(a.steps.back().concept_hash == concept_hash(*a.submitted));

  EpisodeResult b = run_episode(ms, models, *domain, 14);
  CHECK(b.expansions == a.expansions);
  CHECK(b.utility == a.utility);
  CHECK(concept_hash(*b.submitted) == concept_hash(*a.submitted));
}

TEST_CASE("episodes without a policy never submit and earn nothing") {
  auto domain = make_domain("circuit");
  MachineState ms = initial_state(*domain, 1);
  ms.policy.clear();
  EpisodeResult ep = run_episode(ms, default_model_set("circuit"), *domain, 6);
  CHECK_FALSE(ep.submitted.has_value());
  CHECK(ep.expansions == 0);
  CHECK(ep.utility == 0.0);
  CHECK(ep.steps.size() == 6);
}

TEST_CASE("pipeline episodes assemble a typed chain") {
  auto domain = make_domain("pipeline");
  UtilityParams up;
  up.beam_k = 8;
  up.max_signals = 4;
  MachineState ms = initial_state(*domain, 3, up);
  EpisodeResult ep = run_episode(ms, default_model_set("pipeline"), *domain, 10);
  REQUIRE(ep.submitted.has_value());
  CHECK(ep.per_model_rewards[0] > 0.0);
}

TEST_CASE("machine state round-trips through json") {
  auto domain = make_domain("circuit");
  MachineState ms = initial_state(*domain, 99);
  ms.concepts.push_back(half_adder_concept());
  ms.canonicalize_concepts();
  MachineState back = MachineState::from_json(ms.to_json());
  CHECK(back.hash() == ms.hash());
  CHECK(back.find_sequence("submit-verified") != nullptr);
  CHECK(back.find_sequence("no-such") == nullptr);
}
