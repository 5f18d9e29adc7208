#include "dgm/transform.hpp"

#include "dgm/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace dgm {

Json ProposalEdit::to_json() const { return Json{{"op", op}, {"payload", payload}}; }

ProposalEdit ProposalEdit::from_json(const Json& j) {
  ProposalEdit e;
  e.op = j.at("op").get<std::string>();
  e.payload = j.at("payload");
  if (e.op != "add" && e.op != "remove" && e.op != "replace")
    raise(Errc::bad_input, "unknown edit op: " + e.op);
  return e;
}

Json RewriteProposal::to_json() const {
  Json je = Json::array();
  for (const auto& e : edits) je.push_back(e.to_json());
  return Json{{"basis", basis_hash}, {"edits", je}, {"id", id}, {"target", target}};
}

RewriteProposal RewriteProposal::from_json(const Json& j) {
  RewriteProposal p;
  p.target = j.at("target").get<std::string>();
  p.basis_hash = j.at("basis").get<std::string>();
  for (const auto& je : j.at("edits")) p.edits.push_back(ProposalEdit::from_json(je));
  p.id = j.at("id").get<std::string>();
  return p;
}

void RewriteProposal::assign_id() {
  Json j = to_json();
  j.erase("id");
  id = content_hash(j);
}

Json Certificate::to_json() const {
  return Json{{"after", after},
              {"basis", basis_hash},
              {"before", before},
              {"checker_version", checker_version},
              {"comparison", comparison},
              {"conclusion", conclusion},
              {"environment", environment_hash},
              {"proposal", proposal_id},
              {"successor", successor_hash},
              {"T", horizon}};
}

Certificate Certificate::from_json(const Json& j) {
  Certificate c;
  c.after = j.at("after").get<std::vector<double>>();
  c.basis_hash = j.at("basis").get<std::string>();
  c.before = j.at("before").get<std::vector<double>>();
  c.checker_version = j.at("checker_version").get<std::string>();
  c.comparison = j.at("comparison").get<std::string>();
  c.conclusion = j.at("conclusion").get<bool>();
  c.environment_hash = j.at("environment").get<std::string>();
  c.proposal_id = j.at("proposal").get<std::string>();
  c.successor_hash = j.at("successor").get<std::string>();
  c.horizon = j.at("T").get<std::size_t>();
  return c;
}

Json MetaUtility::to_json() const {
  return Json{{"mode", mode}, {"originality_weight", originality_weight}};
}

MetaUtility MetaUtility::from_json(const Json& j) {
  MetaUtility u;
  u.mode = j.at("mode").get<std::string>();
  u.originality_weight = j.at("originality_weight").get<double>();
  if (u.mode != "indicator" && u.mode != "shaped")
    raise(Errc::bad_input, "unknown meta-utility mode: " + u.mode);
  return u;
}

Json MetaRules::to_json() const {
  return Json{{"comparison", comparison},
              {"edit_kinds", edit_kinds},
              {"max_edits", max_edits},
              {"meta_utility", meta_utility.to_json()},
              {"param_grid", param_grid},
              {"proposal_budget", proposal_budget},
              {"rule_templates", rule_templates},
              {"sequence_templates", sequence_templates}};
}

MetaRules MetaRules::from_json(const Json& j) {
  MetaRules m;
  m.comparison = j.at("comparison").get<std::string>();
  m.edit_kinds = j.at("edit_kinds").get<std::vector<std::string>>();
  m.max_edits = j.at("max_edits").get<std::size_t>();
  m.meta_utility = MetaUtility::from_json(j.at("meta_utility"));
  m.param_grid = j.at("param_grid");
  m.proposal_budget = j.at("proposal_budget").get<std::size_t>();
  m.rule_templates = j.at("rule_templates");
  m.sequence_templates = j.at("sequence_templates");
  if (m.comparison != "all-models" && m.comparison != "weighted-mean")
    raise(Errc::bad_input, "unknown comparison rule: " + m.comparison);
  return m;
}

MetaRules default_meta_rules(const std::string& domain) {
  MetaRules m;
  if (domain == "circuit") {
    m.rule_templates.push_back(Json{
        {"id", "gate-budget-6"},
        {"category", "conceptual"},
        {"expr", {{"atom", "count"}, {"kind", "NAND"}, {"cmp", "le"}, {"n", 6}}}});
    m.rule_templates.push_back(Json{
        {"id", "edge-cap-40"},
        {"category", "conceptual"},
        {"expr", {{"atom", "edge_count"}, {"cmp", "le"}, {"n", 40}}}});
  } else if (domain == "pipeline") {
    m.rule_templates.push_back(Json{
        {"id", "stage-budget-5"},
        {"category", "conceptual"},
        {"expr", {{"atom", "count"}, {"cmp", "le"}, {"n", 5}}}});
  }
  // The expansion cost itself is deliberately not in the grid: letting the
  // machine cheapen its own cost term would certify vacuous "improvements".
  m.param_grid = Json{{"utility", {{"beam_k", Json::array({16, 24, 32, 48})}}},
                      {"meta", {{"originality_weight", Json::array({0.1})}}}};
  return m;
}

namespace {

const std::set<std::string> kTargets{"rules", "policy", "utility-params", "meta-params"};

void apply_rule_edit(MachineState& s, const ProposalEdit& e) {
  if (e.op == "add") {
    Rule r = Rule::from_json(e.payload);
    for (const auto& ex : s.rules.rules)
      if (ex.id == r.id) raise(Errc::bad_input, "duplicate rule id: " + r.id);
    s.rules.rules.push_back(std::move(r));
    return;
  }
  const std::string id = e.op == "remove" ? e.payload.at("id").get<std::string>()
                                          : e.payload.at("id").get<std::string>();
  auto it = std::find_if(s.rules.rules.begin(), s.rules.rules.end(),
                         [&](const Rule& r) { return r.id == id; });
  if (it == s.rules.rules.end()) raise(Errc::bad_input, "no such rule: " + id);
  if (e.op == "remove") s.rules.rules.erase(it);
  else *it = Rule::from_json(e.payload);
}

void apply_policy_edit(MachineState& s, const ProposalEdit& e) {
  if (e.op == "add") {
    DesignSequence seq = DesignSequence::from_json(e.payload);
    for (const auto& ex : s.policy)
      if (ex.id == seq.id) raise(Errc::bad_input, "duplicate sequence id: " + seq.id);
    s.policy.push_back(std::move(seq));
    return;
  }
  const std::string id = e.payload.at("id").get<std::string>();
  auto it = std::find_if(s.policy.begin(), s.policy.end(),
                         [&](const DesignSequence& q) { return q.id == id; });
  if (it == s.policy.end()) raise(Errc::bad_input, "no such sequence: " + id);
  if (e.op == "remove") s.policy.erase(it);
  else *it = DesignSequence::from_json(e.payload);
}

void apply_uparam_edit(MachineState& s, const ProposalEdit& e) {
  if (e.op != "replace") raise(Errc::bad_input, "utility-params edits must replace");
  const std::string name = e.payload.at("name").get<std::string>();
  const Json& v = e.payload.at("value");
  if (name == "expansion_cost") s.uparams.expansion_cost = v.get<double>();
  else if (name == "beam_k") s.uparams.beam_k = v.get<std::size_t>();
  else if (name == "max_signals") s.uparams.max_signals = v.get<std::size_t>();
  else if (name == "expansion_ceiling") s.uparams.expansion_ceiling = v.get<std::size_t>();
  else raise(Errc::bad_input, "unknown utility parameter: " + name);
}

void apply_meta_edit(MachineState& s, const ProposalEdit& e) {
  if (e.op != "replace") raise(Errc::bad_input, "meta-params edits must replace");
  const std::string name = e.payload.at("name").get<std::string>();
  if (name.rfind("env", 0) == 0 || name == "models" || name == "phi_env")
    raise(Errc::forbidden_edit, "environment is outside the machine's reach");
  s.meta[name] = e.payload.at("value");
}

}  // namespace

ApplyResult apply_proposal(const MachineState& basis, const RewriteProposal& p) {
  if (p.basis_hash != basis.hash())
    raise(Errc::snapshot_mismatch, "proposal built against a different snapshot");
  if (!kTargets.count(p.target))
    raise(Errc::forbidden_edit, "proposals may not touch target: " + p.target);
  if (p.edits.empty()) raise(Errc::bad_input, "proposal has no edits");
  ApplyResult out;
  out.successor = basis;
  for (const auto& e : p.edits) {
    if (p.target == "rules") apply_rule_edit(out.successor, e);
    else if (p.target == "policy") apply_policy_edit(out.successor, e);
    else if (p.target == "utility-params") apply_uparam_edit(out.successor, e);
    else apply_meta_edit(out.successor, e);
  }
  out.successor.rules.validate();
  if (p.target == "rules") {
    std::vector<Concept> kept;
    for (const auto& c : out.successor.concepts) {
      if (is_permissible(c, out.successor.rules)) kept.push_back(c);
      else out.pruned_concept_hashes.push_back(concept_hash(c));
    }
    out.successor.concepts = std::move(kept);
    if (out.successor.concepts.empty()) out.successor.concepts.push_back(Concept::empty());
  }
  return out;
}

std::vector<RewriteProposal> propose(const MachineState& basis, const MetaRules& meta,
                                     std::size_t budget) {
  std::vector<RewriteProposal> out;
  const std::string basis_hash = basis.hash();
  auto enabled = [&](const std::string& k) {
    return std::find(meta.edit_kinds.begin(), meta.edit_kinds.end(), k) != meta.edit_kinds.end();
  };
  auto emit = [&](const std::string& target, ProposalEdit edit) {
    if (out.size() >= budget) return;
    RewriteProposal p;
    p.target = target;
    p.edits.push_back(std::move(edit));
    p.basis_hash = basis_hash;
    p.assign_id();
    out.push_back(std::move(p));
  };

  if (enabled("add-rule"))
    for (const auto& jr : meta.rule_templates) {
      const std::string id = jr.at("id").get<std::string>();
      bool present = false;
      for (const auto& r : basis.rules.rules) present = present || r.id == id;
      if (!present) emit("rules", ProposalEdit{"add", jr});
    }
  if (enabled("remove-rule"))
    for (const auto& r : basis.rules.rules)
      if (r.category == "conceptual")
        emit("rules", ProposalEdit{"remove", Json{{"id", r.id}}});
  if (enabled("set-utility-param") && meta.param_grid.contains("utility"))
    for (const auto& [name, values] : meta.param_grid.at("utility").items()) {
      Json current = basis.uparams.to_json();
      for (const auto& v : values)
        if (!current.contains(name) || current.at(name) != v)
          emit("utility-params", ProposalEdit{"replace", Json{{"name", name}, {"value", v}}});
    }
  if (enabled("set-meta-param") && meta.param_grid.contains("meta"))
    for (const auto& [name, values] : meta.param_grid.at("meta").items())
      for (const auto& v : values)
        if (!basis.meta.contains(name) || basis.meta.at(name) != v)
          emit("meta-params", ProposalEdit{"replace", Json{{"name", name}, {"value", v}}});
  if (enabled("add-sequence"))
    for (const auto& js : meta.sequence_templates) {
      const std::string id = js.at("id").get<std::string>();
      if (!basis.find_sequence(id)) emit("policy", ProposalEdit{"add", js});
    }
  if (enabled("remove-sequence"))
    for (const auto& s : basis.policy) emit("policy", ProposalEdit{"remove", Json{{"id", s.id}}});
  return out;
}

double evaluate_state(const MachineState& state, const EnvironmentModel& mu,
                      const Domain& domain) {
  MachineState eval = state;
  eval.concepts.clear();
  eval.concepts.push_back(Concept::empty());
  eval.step_count = 0;
  eval.accumulated_reward = 0.0;
  eval.seed = 0;  // utility is a property of the program, not of the run id
  ModelSet single;
  EnvironmentModel m = mu;
  m.weight = 1.0;
  single.models.push_back(std::move(m));
  // Evaluation is a pure function of (clean state, model); memoize it, the
  // proposal loop and certificate re-checks repeat the same pairs.
  static thread_local std::map<std::string, double> cache;
  const std::string key =
      content_hash(Json{{"model", single.models[0].to_json()}, {"state", eval.to_json()}});
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  EpisodeResult ep = run_episode(eval, single, domain, mu.horizon);
  cache.emplace(key, ep.utility);
  return ep.utility;
}

SnapshotStore::SnapshotStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string SnapshotStore::put(const MachineState& state) {
  const std::string h = state.hash();
  write_text_file(dir_ / (h + ".json"), canonical_dump(state.to_json()));
  return h;
}

bool SnapshotStore::has(const std::string& hash) const {
  return std::filesystem::exists(dir_ / (hash + ".json"));
}

MachineState SnapshotStore::get(const std::string& hash) const {
  const auto path = dir_ / (hash + ".json");
  if (!std::filesystem::exists(path))
    raise(Errc::unresolvable_hash, "no snapshot for " + hash);
  MachineState ms = MachineState::from_json(load_json_file(path));
  if (ms.hash() != hash)
    raise(Errc::snapshot_mismatch, "snapshot content does not match its address: " + hash);
  return ms;
}

namespace {

bool conclusion_of(const std::string& comparison, const ModelSet& models,
                   const std::vector<double>& before, const std::vector<double>& after,
                   bool state_changed) {
  if (!state_changed) return false;
  if (comparison == "weighted-mean") {
    double b = 0, a = 0;
    for (std::size_t i = 0; i < models.models.size(); ++i) {
      b += models.models[i].weight * before[i];
      a += models.models[i].weight * after[i];
    }
    return a > b;
  }
  for (std::size_t i = 0; i < before.size(); ++i)
    if (!(after[i] > before[i])) return false;
  return true;
}

}  // namespace

Certificate certify(const RewriteProposal& p, const MachineState& basis, const ModelSet& models,
                    const MetaRules& meta, SnapshotStore& store) {
  models.validate();
  ApplyResult applied = apply_proposal(basis, p);
  Certificate cert;
  cert.basis_hash = store.put(basis);
  cert.successor_hash = store.put(applied.successor);
  cert.environment_hash = models.hash();
  cert.proposal_id = p.id;
  cert.comparison = meta.comparison;
  for (const auto& mu : models.models) {
    cert.horizon = std::max(cert.horizon, mu.horizon);
    auto domain = make_domain(mu.domain);
    cert.before.push_back(evaluate_state(basis, mu, *domain));
    cert.after.push_back(evaluate_state(applied.successor, mu, *domain));
  }
  cert.conclusion = conclusion_of(cert.comparison, models, cert.before, cert.after,
                                  cert.successor_hash != cert.basis_hash);
  return cert;
}

double meta_utility_value(const MetaUtility& u, const Certificate& cert) {
  if (!cert.conclusion) return 0.0;
  if (u.mode == "indicator") return 1.0;
  double margin = 0;
  for (std::size_t i = 0; i < cert.before.size(); ++i)
    margin += cert.after[i] - cert.before[i];
  if (!cert.before.empty()) margin /= static_cast<double>(cert.before.size());
  return 1.0 + u.originality_weight * margin;
}

bool check_certificate(const Certificate& cert, const ModelSet& models,
                       const SnapshotStore& store) {
  try {
    if (cert.checker_version != kCheckerVersion) return false;
    if (models.hash() != cert.environment_hash) return false;
    if (cert.before.size() != models.models.size() || cert.after.size() != models.models.size())
      return false;
    MachineState basis = store.get(cert.basis_hash);
    MachineState successor = store.get(cert.successor_hash);
    std::size_t horizon = 0;
    for (std::size_t i = 0; i < models.models.size(); ++i) {
      const EnvironmentModel& mu = models.models[i];
      horizon = std::max(horizon, mu.horizon);
      auto domain = make_domain(mu.domain);
      if (evaluate_state(basis, mu, *domain) != cert.before[i]) return false;
      if (evaluate_state(successor, mu, *domain) != cert.after[i]) return false;
    }
    if (horizon != cert.horizon) return false;
    if (conclusion_of(cert.comparison, models, cert.before, cert.after,
                      cert.successor_hash != cert.basis_hash) != cert.conclusion)
      return false;
    return true;
  } catch (const Error&) {
    return false;
  }
}

SwitchResult switch_state(const MachineState& ms, const RewriteProposal& p,
                          const Certificate& cert, const ModelSet& models,
                          const SnapshotStore& store) {
  if (p.id != cert.proposal_id)
    raise(Errc::certificate_invalid, "certificate covers a different proposal");
  const std::string current = ms.hash();
  if (current != cert.basis_hash || p.basis_hash != cert.basis_hash)
    raise(Errc::stale_basis, "state moved since certification");
  if (!check_certificate(cert, models, store))
    raise(Errc::certificate_invalid, "certificate failed re-verification");
  if (!cert.conclusion)
    raise(Errc::certificate_invalid, "certificate does not conclude improvement");
  ApplyResult applied = apply_proposal(ms, p);
  if (applied.successor.hash() != cert.successor_hash)
    raise(Errc::certificate_invalid, "proposal application diverges from the certified successor");
  SwitchResult r;
  r.state = std::move(applied.successor);
  r.state.step_count = ms.step_count + 1;
  r.pruned_concept_hashes = std::move(applied.pruned_concept_hashes);
  return r;
}

SwitchResult self_modify(const MachineState& ms, const RewriteProposal& p,
                         const Certificate& cert, const ModelSet& models,
                         const SnapshotStore& store) {
  if (p.target != "utility-params" && p.target != "meta-params")
    raise(Errc::forbidden_edit, "self-modification is limited to the machine's own parameters");
  return switch_state(ms, p, cert, models, store);
}

double concept_edit_distance(const Concept& a, const Concept& b) {
  Concept ca = canonical_form(a), cb = canonical_form(b);
  auto node_keys = [](const Concept& c) {
    std::multiset<std::string> keys;
    for (const auto& n : c.nodes()) {
      std::string k = n.kind;
      for (const auto& [p, v] : n.props) k += ";" + p + "=" + v;
      keys.insert(std::move(k));
    }
    return keys;
  };
  auto edge_keys = [](const Concept& c) {
    std::multiset<std::string> keys;
    for (const auto& e : c.edges())
      keys.insert(e.from_node + "." + e.from_port + ">" + e.to_node + "." + e.to_port);
    return keys;
  };
  auto sym_diff = [](const std::multiset<std::string>& x, const std::multiset<std::string>& y) {
    std::vector<std::string> d;
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(d));
    return d.size();
  };
  return static_cast<double>(sym_diff(node_keys(ca), node_keys(cb)) +
                             sym_diff(edge_keys(ca), edge_keys(cb)));
}

}  // namespace dgm
