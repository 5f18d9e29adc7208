#include <doctest.h>

#include <dgm/environment.hpp>
#include <dgm/error.hpp>
#include <dgm/verification.hpp>

#include "helpers.hpp"

using namespace dgm;
using dgm::testing::half_adder_concept;
using dgm::testing::parity_pipeline_concept;

TEST_CASE("table_row scenarios against the half adder") {
  auto domain = make_domain("circuit");
  Concept ha = half_adder_concept();
  RequirementSet reqs = domain->default_requirements("machine-internal");
  CHECK(reqs.requirements.size() == 8);
  for (const auto& r : reqs.requirements) CHECK(requirement_satisfied(r, ha, *domain));

  // Swapping the two output terminals breaks every row where sum and
  // carry disagree; they agree only on the 00 input.
  Concept swapped = ha;
  swapped.remove_edge({"n4", "out", "s", "in"});
  swapped.remove_edge({"n5", "out", "co", "in"});
  swapped.add_edge({"n5", "out", "s", "in"});
  swapped.add_edge({"n4", "out", "co", "in"});
  std::size_t sat = 0;
  for (const auto& r : reqs.requirements)
    if (requirement_satisfied(r, swapped, *domain)) ++sat;
  CHECK(sat == 2);
}

TEST_CASE("io_stream scenarios simulate the compiled machine") {
  auto domain = make_domain("circuit");
  Requirement r;
  r.id = "stream";
  r.scenario = Json{{"type", "io_stream"},
                    {"inputs", Json::array({"0|0", "1|0", "0|1", "1|1"})},
                    {"outputs", Json::array({"0|0", "1|0", "1|0", "0|1"})}};
  CHECK(requirement_satisfied(r, half_adder_concept(), *domain));
  r.scenario["outputs"][3] = "1|1";
  CHECK_FALSE(requirement_satisfied(r, half_adder_concept(), *domain));
  r.scenario["inputs"] = Json::array();
  r.scenario["outputs"] = Json::array();
  CHECK_THROWS_AS(requirement_satisfied(r, half_adder_concept(), *domain), Error);
}

TEST_CASE("cost_bound and pipeline_ok scenarios") {
  auto circuit = make_domain("circuit");
  Requirement cb;
  cb.id = "cheap";
  cb.scenario = Json{{"type", "cost_bound"}, {"max_cost", 0.5}};
  CHECK(requirement_satisfied(cb, half_adder_concept(), *circuit));
  cb.scenario["max_cost"] = 0.49;
  CHECK_FALSE(requirement_satisfied(cb, half_adder_concept(), *circuit));

  auto pipeline = make_domain("pipeline");
  Requirement ok;
  ok.id = "ok";
  ok.scenario = Json{{"type", "pipeline_ok"}, {"budget", 2.0}};
  CHECK(requirement_satisfied(ok, parity_pipeline_concept(), *pipeline));
  ok.scenario["budget"] = 0.5;
  CHECK_FALSE(requirement_satisfied(ok, parity_pipeline_concept(), *pipeline));

  // Incomplete chains are unsatisfying, not fatal.
  Concept dangling;
  dangling.add_node({"src", "SRC", {{"type_out", "int"}}});
  ok.scenario["budget"] = 2.0;
  CHECK_FALSE(requirement_satisfied(ok, dangling, *pipeline));

  Requirement bad;
  bad.id = "bad";
  bad.scenario = Json{{"type", "mystery"}};
  CHECK_THROWS_AS(requirement_satisfied(bad, half_adder_concept(), *circuit), Error);
}

TEST_CASE("verify_external sums satisfied weights minus cost") {
  auto domain = make_domain("circuit");
  RequirementSet reqs = domain->default_requirements("environment-held");
  CHECK(verify_external(half_adder_concept(), reqs, *domain) == doctest::Approx(7.5));
  CHECK(verify_external(Concept::empty(), reqs, *domain) == 0.0);
}

TEST_CASE("utility_cpe by hand on a single-model set") {
  ModelSet models = default_model_set("circuit");
  Concept ha = half_adder_concept();
  Requirement sat =
      make_domain("circuit")->default_requirements("machine-internal").requirements.front();
  // weight * [sat] - share * cost = 1 - 0.25 * 0.5
  CHECK(utility_cpe(ha, sat, 0.25, models) == doctest::Approx(0.875));
  Requirement unsat = sat;
  unsat.scenario["expect"] = unsat.scenario["expect"] == "1" ? "0" : "1";
  CHECK(utility_cpe(ha, unsat, 0.25, models) == doctest::Approx(-0.125));
  CHECK(utility_cpe(Concept::empty(), sat, 0.25, models) == 0.0);

  // Non-executable concepts count as unsatisfied but still pay their cost.
  Concept lone;
  lone.add_node({"g", "NAND", {}});
  CHECK(utility_cpe(lone, sat, 0.25, models) == doctest::Approx(-0.025));
}

TEST_CASE("internal verification matches external when the sets agree") {
  auto domain = make_domain("circuit");
  ModelSet models = default_model_set("circuit");
  RequirementSet internal = domain->default_requirements("machine-internal");
  Concept ha = half_adder_concept();
  CHECK(verify_internal(ha, internal, models) ==
        doctest::Approx(verify_external(ha, models.models[0].phi_env, *domain)));

  RequirementSet empty;
  CHECK(verify_internal(ha, empty, models) == 0.0);
  RequirementSet zero = internal;
  for (auto& r : zero.requirements) r.weight = 0.0;
  CHECK(verify_internal(ha, zero, models) == 0.0);
}

TEST_CASE("requirement revision moves scores by agreement and drops losers") {
  auto domain = make_domain("circuit");
  Concept ha = half_adder_concept();
  RequirementSet reqs = domain->default_requirements("machine-internal");
  Requirement wrong = reqs.requirements.front();
  wrong.id = "wrong";
  wrong.scenario["expect"] = wrong.scenario["expect"] == "1" ? "0" : "1";
  wrong.score = -2;
  reqs.requirements.push_back(wrong);

  RequirementSet after = revise_requirements(reqs, 7.5, ha, *domain);
  CHECK(after.requirements.size() == 8);  // the disagreeing one hit -3
  for (const auto& r : after.requirements) CHECK(r.score == 1);

  // With a negative observed reward the agreement flips.
  RequirementSet down = revise_requirements(after, -1.0, ha, *domain);
  for (const auto& r : down.requirements) CHECK(r.score == 0);

  RequirementSet held = reqs;
  held.location = "environment-held";
  RequirementSet same = revise_requirements(held, 7.5, ha, *domain);
  CHECK(canonical_dump(same.to_json()) == canonical_dump(held.to_json()));
}

TEST_CASE("requirement sets validate and round-trip") {
  auto domain = make_domain("circuit");
  RequirementSet reqs = domain->default_requirements("machine-internal");
  CHECK_NOTHROW(reqs.validate());
  RequirementSet back = RequirementSet::from_json(reqs.to_json());
  CHECK(back.hash() == reqs.hash());
  CHECK(back.find("row-00-sum") != nullptr);
  CHECK(back.find("row-22-sum") == nullptr);
  CHECK(back.total_weight() == doctest::Approx(8.0));

  RequirementSet bad = reqs;
  bad.requirements[0].weight = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
