#include "dgm/run.hpp"

#include "dgm/error.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

namespace dgm {

Json RunConfig::to_json() const {
  return Json{{"domain", domain},
              {"horizon", horizon},
              {"models_path", models_path},
              {"policy_path", policy_path},
              {"proposal_budget", proposal_budget},
              {"rules_path", rules_path},
              {"seed", seed},
              {"switch_limit", switch_limit},
              {"uparams", uparams.to_json()}};
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c;
  c.domain = j.at("domain").get<std::string>();
  c.horizon = j.at("horizon").get<std::size_t>();
  c.models_path = j.at("models_path").get<std::string>();
  c.policy_path = j.at("policy_path").get<std::string>();
  c.proposal_budget = j.at("proposal_budget").get<std::size_t>();
  c.rules_path = j.at("rules_path").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.switch_limit = j.at("switch_limit").get<std::size_t>();
  c.uparams = UtilityParams::from_json(j.at("uparams"));
  return c;
}

Json SwitchEvent::to_json() const {
  return Json{{"basis", basis_hash},
              {"certificate", certificate_hash},
              {"min_after", min_after},
              {"min_before", min_before},
              {"proposal", proposal_id},
              {"successor", successor_hash}};
}

Json EpisodeSummary::to_json() const {
  return Json{{"expansions", expansions},
              {"i", index},
              {"per_model", per_model_utilities},
              {"submit_step", submit_step},
              {"submitted", submitted_hash},
              {"utility", utility}};
}

Json RunReport::to_json(bool include_wall_clock) const {
  Json je = Json::array();
  for (const auto& e : episodes) je.push_back(e.to_json());
  Json js = Json::array();
  for (const auto& s : switches) js.push_back(s.to_json());
  Json j{{"episodes", je}, {"switches", js}, {"total_expansions", total_expansions}};
  if (include_wall_clock) j["wall_clock_seconds"] = wall_clock_seconds;
  return j;
}

ModelSet config_models(const RunConfig& config) {
  if (!config.models_path.empty()) {
    ModelSet m = ModelSet::from_json(load_json_file(config.models_path));
    return m;
  }
  return default_model_set(config.domain);
}

namespace {

MetaRules effective_meta(const MachineState& ms, const RunConfig& config) {
  MetaRules meta = default_meta_rules(config.domain);
  meta.proposal_budget = config.proposal_budget;
  if (ms.meta.contains("originality_weight")) {
    meta.meta_utility.mode = "shaped";
    meta.meta_utility.originality_weight = ms.meta.at("originality_weight").get<double>();
  }
  if (ms.meta.contains("comparison"))
    meta.comparison = ms.meta.at("comparison").get<std::string>();
  return meta;
}

void append_line(std::string& buf, const OrderedJson& j) {
  buf += j.dump();
  buf += "\n";
}

}  // namespace

RunReport cmd_run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(config.out_dir);
  write_text_file(config.out_dir / "config.json", canonical_dump(config.to_json()));

  auto domain = make_domain(config.domain);
  ModelSet models = config_models(config);
  models.validate();
  write_text_file(config.out_dir / "models.json", canonical_dump(models.to_json()));

  MachineState state = initial_state(*domain, config.seed, config.uparams);
  if (!config.rules_path.empty())
    state.rules = RuleSet::from_json(load_json_file(config.rules_path));
  if (!config.policy_path.empty()) {
    state.policy.clear();
    for (const auto& js : load_json_file(config.policy_path).at("policy"))
      state.policy.push_back(DesignSequence::from_json(js));
  }

  SnapshotStore store(config.out_dir / "snapshots");
  std::filesystem::create_directories(config.out_dir / "certs");

  RunReport report;
  std::string trace;
  std::size_t switches_done = 0;
  std::size_t index = 0;
  while (true) {
    EpisodeResult ep = run_episode(state, models, *domain, config.horizon);
    EpisodeSummary es;
    es.index = index++;
    es.utility = ep.utility;
    es.per_model_utilities = ep.per_model_utilities;
    es.expansions = ep.expansions;
    if (ep.submitted) {
      es.submitted_hash = concept_hash(*ep.submitted);
      es.submit_step = ep.submit_step;
    }
    report.episodes.push_back(es);
    report.total_expansions += ep.expansions;
    OrderedJson line;
    line["event"] = "episode";
    line["i"] = es.index;
    line["utility"] = es.utility;
    line["per_model"] = es.per_model_utilities;
    line["expansions"] = es.expansions;
    line["submitted"] = es.submitted_hash;
    line["submit_step"] = es.submit_step;
    append_line(trace, line);

    state.step_count += 1;
    double weighted_reward = 0;
    for (std::size_t i = 0; i < models.models.size(); ++i)
      weighted_reward += models.models[i].weight * ep.per_model_rewards[i];
    state.accumulated_reward += weighted_reward;
    if (ep.submitted)
      state.internal_reqs =
          revise_requirements(state.internal_reqs, weighted_reward, *ep.submitted, *domain);

    if (switches_done >= config.switch_limit) break;

    MetaRules meta = effective_meta(state, config);
    std::vector<RewriteProposal> proposals = propose(state, meta, meta.proposal_budget);
    bool switched = false;
    for (const auto& p : proposals) {
      Certificate cert = certify(p, state, models, meta, store);
      if (!cert.conclusion) continue;
      write_text_file(config.out_dir / "certs" / (cert.hash() + ".json"),
                      canonical_dump(cert.to_json()));
      SwitchResult sw = switch_state(state, p, cert, models, store);
      SwitchEvent ev;
      ev.proposal_id = p.id;
      ev.certificate_hash = cert.hash();
      ev.basis_hash = cert.basis_hash;
      ev.successor_hash = cert.successor_hash;
      ev.min_before = *std::min_element(cert.before.begin(), cert.before.end());
      ev.min_after = *std::min_element(cert.after.begin(), cert.after.end());
      report.switches.push_back(ev);
      OrderedJson sl;
      sl["event"] = "switch";
      sl["proposal"] = ev.proposal_id;
      sl["certificate"] = ev.certificate_hash;
      sl["basis"] = ev.basis_hash;
      sl["successor"] = ev.successor_hash;
      sl["min_before"] = ev.min_before;
      sl["min_after"] = ev.min_after;
      append_line(trace, sl);
      state = std::move(sw.state);
      ++switches_done;
      switched = true;
      break;
    }
    if (!switched) break;
  }

  write_text_file(config.out_dir / "trace.jsonl", trace);
  write_text_file(config.out_dir / "report.json", canonical_dump(report.to_json(false)));
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

bool cmd_replay(const std::filesystem::path& out_dir) {
  for (const char* f : {"config.json", "trace.jsonl", "report.json"})
    if (!std::filesystem::exists(out_dir / f))
      raise(Errc::missing_artifact, std::string("replay needs ") + f);
  RunConfig config = RunConfig::from_json(load_json_file(out_dir / "config.json"));
  config.out_dir = out_dir / "replay";
  std::filesystem::remove_all(config.out_dir);
  cmd_run(config);
  bool same = true;
  for (const char* f : {"trace.jsonl", "report.json", "models.json"})
    same = same && read_text_file(out_dir / f) == read_text_file(config.out_dir / f);
  return same;
}

Json cmd_oracle(const std::string& kind, const Json& params) {
  if (kind == "enumerate") {
    auto domain = make_domain(params.at("domain").get<std::string>());
    RuleSet rules = params.contains("rules") ? RuleSet::from_json(params.at("rules"))
                                             : domain->default_rules();
    InterpretResult r = interpret(rules, params.at("n").get<std::size_t>());
    Json hashes = Json::array();
    for (const auto& c : r.concepts) hashes.push_back(concept_hash(c));
    return Json{{"count", r.concepts.size()},
                {"examined", r.candidates_examined},
                {"hashes", hashes}};
  }
  if (kind == "truthtable") {
    auto domain = make_domain(params.at("domain").get<std::string>());
    Concept c = Concept::from_json(params.at("concept"));
    MealySystem m = compile_concept(c, *domain, 1);
    Json rows = Json::array();
    for (const auto& iv : m.input.values)
      rows.push_back(Json::array({iv, step(m, m.q0, iv, 0).first}));
    return Json{{"rows", rows}};
  }
  if (kind == "equiv") {
    MealySystem a = MealySystem::from_json(params.at("a"));
    MealySystem b = MealySystem::from_json(params.at("b"));
    return Json{{"equivalent", equivalent(a, b, params.at("T").get<std::size_t>())}};
  }
  if (kind == "reward") {
    EnvironmentModel mu = EnvironmentModel::from_json(params.at("model"));
    Concept c = Concept::from_json(params.at("concept"));
    return Json{{"reward", env_reward(mu, c)}};
  }
  raise(Errc::bad_input, "unknown oracle kind: " + kind);
}

}  // namespace dgm
