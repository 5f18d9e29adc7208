#include "dgm/exploratory.hpp"

#include "dgm/error.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace dgm {

Json DesignAction::to_json() const {
  Json j{{"kind", kind}, {"params", params}};
  if (guard) j["guard"] = *guard;
  return j;
}

DesignAction DesignAction::from_json(const Json& j) {
  DesignAction a;
  a.kind = j.at("kind").get<std::string>();
  a.params = j.value("params", Json::object());
  if (j.contains("guard")) a.guard = j.at("guard");
  return a;
}

Json DesignSequence::to_json() const {
  Json arr = Json::array();
  for (const auto& a : actions) arr.push_back(a.to_json());
  return Json{{"id", id}, {"actions", arr}};
}

DesignSequence DesignSequence::from_json(const Json& j) {
  DesignSequence s;
  s.id = j.at("id").get<std::string>();
  for (const auto& ja : j.at("actions")) s.actions.push_back(DesignAction::from_json(ja));
  return s;
}

Json UtilityParams::to_json() const {
  return Json{{"expansion_cost", expansion_cost},
              {"beam_k", beam_k},
              {"max_signals", max_signals},
              {"expansion_ceiling", expansion_ceiling}};
}

UtilityParams UtilityParams::from_json(const Json& j) {
  UtilityParams u;
  u.expansion_cost = j.at("expansion_cost").get<double>();
  u.beam_k = j.at("beam_k").get<std::size_t>();
  u.max_signals = j.at("max_signals").get<std::size_t>();
  u.expansion_ceiling = j.at("expansion_ceiling").get<std::size_t>();
  return u;
}

const DesignSequence* MachineState::find_sequence(const std::string& id) const {
  for (const auto& s : policy)
    if (s.id == id) return &s;
  return nullptr;
}

void MachineState::canonicalize_concepts() {
  std::map<std::string, Concept> dedup;
  for (const auto& c : concepts) {
    Concept k = canonical_form(c);
    dedup.emplace(canonical_dump(k.to_json()), std::move(k));
  }
  concepts.clear();
  for (auto& [dump, c] : dedup) concepts.push_back(std::move(c));
}

Json MachineState::to_json() const {
  Json jc = Json::array();
  for (const auto& c : concepts) jc.push_back(c.to_json());
  Json jp = Json::array();
  for (const auto& s : policy) jp.push_back(s.to_json());
  return Json{{"accumulated_reward", accumulated_reward},
              {"concepts", jc},
              {"internal_reqs", internal_reqs.to_json()},
              {"meta", meta},
              {"policy", jp},
              {"rules", rules.to_json()},
              {"seed", seed},
              {"step_count", step_count},
              {"uparams", uparams.to_json()}};
}

MachineState MachineState::from_json(const Json& j) {
  MachineState ms;
  ms.accumulated_reward = j.at("accumulated_reward").get<double>();
  for (const auto& jc : j.at("concepts")) ms.concepts.push_back(Concept::from_json(jc));
  ms.internal_reqs = RequirementSet::from_json(j.at("internal_reqs"));
  ms.meta = j.at("meta");
  for (const auto& js : j.at("policy")) ms.policy.push_back(DesignSequence::from_json(js));
  ms.rules = RuleSet::from_json(j.at("rules"));
  ms.seed = j.at("seed").get<std::uint64_t>();
  ms.step_count = j.at("step_count").get<std::size_t>();
  ms.uparams = UtilityParams::from_json(j.at("uparams"));
  return ms;
}

MachineState initial_state(const Domain& domain, std::uint64_t seed,
                           const UtilityParams& uparams) {
  MachineState ms;
  ms.concepts.push_back(Concept::empty());
  ms.rules = domain.default_rules();
  ms.policy = domain.default_policy(uparams.max_signals);
  ms.uparams = uparams;
  ms.internal_reqs = domain.default_requirements("machine-internal");
  ms.seed = seed;
  return ms;
}

namespace {

std::string fresh_id(ActionContext& ctx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "x%03zu", ctx.fresh_counter++);
  return buf;
}

// Output signals of a concept in deterministic order: nodes by id, each
// contributing its kind's declared output ports in declaration order.
std::vector<std::pair<std::string, std::string>> signals_of(const Concept& c,
                                                            const Alphabet& a) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& n : c.nodes()) {
    const Symbol* s = a.find(n.kind);
    if (!s) continue;
    for (const auto& p : s->outputs) out.emplace_back(n.id, p);
  }
  return out;
}

std::optional<std::pair<std::string, std::string>> resolve_endpoint(const Concept& c,
                                                                    const Json& sel,
                                                                    ActionContext& ctx,
                                                                    bool output_side) {
  const Alphabet& a = ctx.rules->alphabet;
  if (sel.contains("sig")) {
    auto sigs = signals_of(c, a);
    std::size_t i = sel.at("sig").get<std::size_t>();
    if (i >= sigs.size()) return std::nullopt;
    return sigs[i];
  }
  if (sel.contains("last")) {
    if (ctx.last_instantiated.empty() || !c.find_node(ctx.last_instantiated))
      return std::nullopt;
    return std::make_pair(ctx.last_instantiated, sel.at("last").get<std::string>());
  }
  if (sel.contains("id"))
    return std::make_pair(sel.at("id").get<std::string>(), sel.at("port").get<std::string>());
  if (sel.contains("node_kind")) {
    const std::string kind = sel.at("node_kind").get<std::string>();
    std::size_t occ = sel.value("occ", std::size_t{0});
    std::size_t seen = 0;
    for (const auto& n : c.nodes()) {
      if (n.kind != kind) continue;
      if (sel.contains("prop")) {
        auto it = n.props.find(sel.at("prop").get<std::string>());
        if (it == n.props.end() || it->second != sel.at("value").get<std::string>()) continue;
      }
      if (seen++ == occ) return std::make_pair(n.id, sel.at("port").get<std::string>());
    }
    return std::nullopt;
  }
  (void)output_side;
  raise(Errc::bad_input, "unresolvable endpoint selector");
}

// Splices a library template into c with fresh node ids; returns the
// id-remap table.
std::map<std::string, std::string> splice_template(Concept& c, const Json& tmpl,
                                                   ActionContext& ctx) {
  Concept inner = Concept::from_json(tmpl.at("concept"));
  std::map<std::string, std::string> remap;
  for (const auto& n : inner.nodes()) {
    std::string nid = fresh_id(ctx);
    remap[n.id] = nid;
    c.add_node(ConceptNode{nid, n.kind, n.props});
  }
  for (const auto& e : inner.edges())
    c.add_edge(ConceptEdge{remap.at(e.from_node), e.from_port, remap.at(e.to_node), e.to_port});
  return remap;
}

std::pair<std::string, std::string> split_endpoint(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos) raise(Errc::bad_input, "endpoint must be id.port: " + s);
  return {s.substr(0, dot), s.substr(dot + 1)};
}

std::optional<Concept> do_instantiate(const Concept& c, const Json& params, ActionContext& ctx) {
  Concept out = c;
  const std::string kind = params.at("kind").get<std::string>();
  ConceptNode n{fresh_id(ctx), kind, {}};
  if (params.contains("props"))
    for (const auto& [k, v] : params.at("props").items()) n.props[k] = v.get<std::string>();
  ctx.last_instantiated = n.id;
  out.add_node(std::move(n));
  return out;
}

std::optional<Concept> do_connect(const Concept& c, const Json& params, ActionContext& ctx) {
  auto from = resolve_endpoint(c, params.at("from"), ctx, true);
  auto to = resolve_endpoint(c, params.at("to"), ctx, false);
  if (!from || !to) return std::nullopt;
  ConceptEdge e{from->first, from->second, to->first, to->second};
  for (const auto& ex : c.edges())
    if (ex == e) return std::nullopt;
  Concept out = c;
  out.add_edge(std::move(e));
  return out;
}

std::optional<Concept> do_refine(const Concept& c, const Json& params, ActionContext& ctx) {
  auto target = resolve_endpoint(c, params.at("node"), ctx, false);
  if (!target || !c.find_node(target->first)) return std::nullopt;
  const std::string nid = target->first;
  Json tmpl = ctx.domain->library_template(params.at("template").get<std::string>());
  Concept out = c;
  auto remap = splice_template(out, tmpl, ctx);
  const Json& ports = tmpl.at("ports");
  std::vector<ConceptEdge> incident;
  for (const auto& e : c.edges())
    if (e.from_node == nid || e.to_node == nid) incident.push_back(e);
  for (const auto& e : incident) {
    if (e.to_node == nid) {
      if (!ports.contains(e.to_port)) return std::nullopt;
      for (const auto& ep : ports.at(e.to_port)) {
        auto [in_id, in_port] = split_endpoint(ep.get<std::string>());
        out.add_edge(ConceptEdge{e.from_node, e.from_port, remap.at(in_id), in_port});
      }
    } else {
      if (!ports.contains(e.from_port)) return std::nullopt;
      auto [src_id, src_port] = split_endpoint(ports.at(e.from_port).get<std::string>());
      out.add_edge(ConceptEdge{remap.at(src_id), src_port, e.to_node, e.to_port});
    }
  }
  out.remove_node(nid);
  return out;
}

std::optional<Concept> do_abstract(const Concept& c, const Json& params, ActionContext& ctx) {
  Json tmpl = ctx.domain->library_template(params.at("template").get<std::string>());
  Concept inner = Concept::from_json(tmpl.at("concept"));
  const Json& ports = tmpl.at("ports");
  std::string as_kind = params.contains("as_kind") ? params.at("as_kind").get<std::string>()
                                                   : tmpl.value("as_kind", "");
  if (as_kind.empty()) raise(Errc::bad_input, "abstract needs a target kind");

  // Inner endpoints reachable from outside: input-side endpoints per outer
  // port, and the single output endpoint.
  std::map<std::pair<std::string, std::string>, std::string> boundary_in;  // inner -> outer port
  std::map<std::pair<std::string, std::string>, std::string> boundary_out;
  for (const auto& [outer, v] : ports.items()) {
    if (v.is_array()) {
      for (const auto& ep : v) boundary_in[split_endpoint(ep.get<std::string>())] = outer;
    } else {
      boundary_out[split_endpoint(v.get<std::string>())] = outer;
    }
  }

  // Deterministic backtracking subgraph match.
  std::vector<const ConceptNode*> tnodes;
  for (const auto& n : inner.nodes()) tnodes.push_back(&n);
  std::map<std::string, std::string> match;  // template id -> concept id
  std::set<std::string> used;

  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == tnodes.size()) {
      // Edge image check: template edges present; concept edges between
      // matched nodes must all be images; boundary edges only at ports.
      std::set<std::tuple<std::string, std::string, std::string, std::string>> image;
      for (const auto& e : inner.edges()) {
        bool found = false;
        for (const auto& ce : c.edges())
          if (ce.from_node == match.at(e.from_node) && ce.from_port == e.from_port &&
              ce.to_node == match.at(e.to_node) && ce.to_port == e.to_port) {
            found = true;
            image.insert({ce.from_node, ce.from_port, ce.to_node, ce.to_port});
          }
        if (!found) return false;
      }
      std::map<std::string, std::string> inv;
      for (const auto& [t, cid] : match) inv[cid] = t;
      for (const auto& ce : c.edges()) {
        bool fm = inv.count(ce.from_node), tm = inv.count(ce.to_node);
        if (fm && tm) {
          if (!image.count({ce.from_node, ce.from_port, ce.to_node, ce.to_port})) return false;
        } else if (tm) {
          if (!boundary_in.count({inv.at(ce.to_node), ce.to_port})) return false;
        } else if (fm) {
          if (!boundary_out.count({inv.at(ce.from_node), ce.from_port})) return false;
        }
      }
      return true;
    }
    for (const auto& n : c.nodes()) {
      if (used.count(n.id) || n.kind != tnodes[i]->kind || n.props != tnodes[i]->props)
        continue;
      match[tnodes[i]->id] = n.id;
      used.insert(n.id);
      if (search(i + 1)) return true;
      used.erase(n.id);
      match.erase(tnodes[i]->id);
    }
    return false;
  };
  if (!search(0)) return std::nullopt;

  Concept out = c;
  std::map<std::string, std::string> inv;
  for (const auto& [t, cid] : match) inv[cid] = t;
  ConceptNode repl{fresh_id(ctx), as_kind, {}};
  if (params.contains("props"))
    for (const auto& [k, v] : params.at("props").items()) repl.props[k] = v.get<std::string>();
  std::vector<ConceptEdge> rewired;
  for (const auto& ce : c.edges()) {
    bool fm = inv.count(ce.from_node), tm = inv.count(ce.to_node);
    if (fm && tm) continue;
    if (tm)
      rewired.push_back(ConceptEdge{ce.from_node, ce.from_port, repl.id,
                                    boundary_in.at({inv.at(ce.to_node), ce.to_port})});
    else if (fm)
      rewired.push_back(ConceptEdge{repl.id, boundary_out.at({inv.at(ce.from_node), ce.from_port}),
                                    ce.to_node, ce.to_port});
  }
  for (const auto& [t, cid] : match) out.remove_node(cid);
  out.add_node(std::move(repl));
  for (auto& e : rewired) out.add_edge(std::move(e));
  ctx.last_instantiated = out.nodes().back().id;
  return out;
}

std::optional<Concept> do_set_property(const Concept& c, const Json& params, ActionContext& ctx) {
  auto target = resolve_endpoint(c, params.at("node"), ctx, false);
  if (!target) return std::nullopt;
  Concept out;
  bool found = false;
  for (const auto& n : c.nodes()) {
    ConceptNode nn = n;
    if (n.id == target->first) {
      nn.props[params.at("prop").get<std::string>()] = params.at("value").get<std::string>();
      found = true;
    }
    out.add_node(std::move(nn));
  }
  if (!found) return std::nullopt;
  for (const auto& e : c.edges()) out.add_edge(e);
  return out;
}

bool do_verify(const Concept& c, const Json& params, ActionContext& ctx) {
  std::vector<const Requirement*> reqs;
  if (params.value("all", false)) {
    for (const auto& r : ctx.internal_reqs->requirements) reqs.push_back(&r);
  } else {
    const Requirement* r = ctx.internal_reqs->find(params.at("req").get<std::string>());
    if (!r) return false;
    reqs.push_back(r);
  }
  for (const auto* r : reqs) {
    try {
      if (!requirement_satisfied(*r, c, *ctx.domain)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<Concept> apply_action(const Concept& c, const DesignAction& a, ActionContext& ctx) {
  if (a.guard && !eval_rule_expr(*a.guard, c)) return std::nullopt;
  std::optional<Concept> out;
  try {
    if (a.kind == "instantiate") out = do_instantiate(c, a.params, ctx);
    else if (a.kind == "connect" || a.kind == "compose-feedback") out = do_connect(c, a.params, ctx);
    else if (a.kind == "compose-product") {
      Concept merged = c;
      splice_template(merged, ctx.domain->library_template(a.params.at("template").get<std::string>()),
                      ctx);
      out = merged;
    } else if (a.kind == "refine") out = do_refine(c, a.params, ctx);
    else if (a.kind == "abstract") out = do_abstract(c, a.params, ctx);
    else if (a.kind == "set-property") out = do_set_property(c, a.params, ctx);
    else if (a.kind == "verify") return do_verify(c, a.params, ctx) ? std::optional<Concept>(c)
                                                                    : std::nullopt;
    else if (a.kind == "submit") return c;
    else raise(Errc::bad_input, "unknown action kind: " + a.kind);
    if (!out) return std::nullopt;
    out->validate(ctx.rules->alphabet);
    if (!is_permissible(*out, *ctx.rules)) return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

std::optional<SequenceResult> apply_sequence(const Concept& c, const DesignSequence& seq,
                                             const RuleSet& rules, const Domain& domain,
                                             const RequirementSet& internal_reqs) {
  ActionContext ctx;
  ctx.rules = &rules;
  ctx.domain = &domain;
  ctx.internal_reqs = &internal_reqs;
  Concept cur = c;
  bool submitted = false;
  for (const auto& a : seq.actions) {
    auto next = apply_action(cur, a, ctx);
    if (!next) return std::nullopt;
    if (a.kind == "submit") submitted = true;
    cur = std::move(*next);
  }
  SequenceResult r;
  r.design = canonical_form(cur);
  r.submitted = submitted;
  return r;
}

InterpreterOutcome apply_interpreter(const std::vector<Concept>& c_in, const RuleSet& rules,
                                     const std::vector<DesignSequence>& policy,
                                     const UtilityParams& uparams, const Domain& domain,
                                     const RequirementSet& internal_reqs,
                                     std::size_t expansions_so_far) {
  InterpreterOutcome out;
  std::map<std::string, Concept> pool;
  for (const auto& c : c_in) {
    Concept k = canonical_form(c);
    pool.emplace(canonical_dump(k.to_json()), std::move(k));
  }
  for (const auto& c : c_in)
    for (const auto& seq : policy) {
      auto res = apply_sequence(c, seq, rules, domain, internal_reqs);
      if (!res) continue;
      ++out.expansions;
      if (expansions_so_far + out.expansions > uparams.expansion_ceiling)
        raise(Errc::budget_exceeded, "interpreter expansion ceiling exceeded");
      if (res->submitted) out.submissions.emplace_back(seq.id, res->design);
      pool.emplace(canonical_dump(res->design.to_json()), res->design);
    }

  struct Ranked {
    double score;
    const std::string* dump;
    const Concept* c;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(pool.size());
  for (const auto& [dump, c] : pool)
    ranked.push_back({domain.score_hint(c, internal_reqs), &dump, &c});
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    return *a.dump < *b.dump;
  });
  std::set<std::string> signatures;
  for (const auto& r : ranked) {
    if (out.frontier.size() >= uparams.beam_k) break;
    std::string sig = domain.frontier_signature(*r.c);
    if (!signatures.insert(sig).second) continue;
    out.frontier.push_back(*r.c);
  }
  return out;
}

EpisodeResult run_episode(const MachineState& ms, const ModelSet& models, const Domain& domain,
                          std::size_t horizon) {
  EpisodeResult ep;
  ep.per_model_rewards.assign(models.models.size(), 0.0);
  ep.per_model_utilities.assign(models.models.size(), 0.0);
  std::vector<Concept> frontier = ms.concepts;
  double cumulative = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    InterpreterOutcome oc = apply_interpreter(frontier, ms.rules, ms.policy, ms.uparams, domain,
                                              ms.internal_reqs, ep.expansions);
    ep.expansions += oc.expansions;
    EpisodeStep st;
    st.t = t;
    st.expansions = ep.expansions;
    if (!oc.submissions.empty()) {
      auto best = oc.submissions.begin();
      std::string best_dump = canonical_dump(best->second.to_json());
      for (auto it = std::next(oc.submissions.begin()); it != oc.submissions.end(); ++it) {
        std::string d = canonical_dump(it->second.to_json());
        if (std::tie(d, it->first) < std::tie(best_dump, best->first)) {
          best = it;
          best_dump = std::move(d);
        }
      }
      ep.submitted = best->second;
      ep.submit_step = t;
      st.sequence_id = best->first;
      st.concept_hash = concept_hash(best->second);
      for (std::size_t i = 0; i < models.models.size(); ++i) {
        const EnvironmentModel& mu = models.models[i];
        std::size_t ss = std::min(t, mu.horizon);
        std::vector<double> stream = env_evaluate(mu, best->second, ss);
        double r = 0;
        for (double v : stream) r += v;
        ep.per_model_rewards[i] = r;
        st.reward += mu.weight * r;
      }
    }
    cumulative += st.reward;
    st.cumulative = cumulative;
    ep.steps.push_back(st);
    frontier = std::move(oc.frontier);
    if (ep.submitted) break;
  }
  ep.final_frontier = std::move(frontier);
  double util = 0;
  for (std::size_t i = 0; i < models.models.size(); ++i) {
    ep.per_model_utilities[i] =
        ep.per_model_rewards[i] -
        ms.uparams.expansion_cost * static_cast<double>(ep.expansions);
    util += models.models[i].weight * ep.per_model_utilities[i];
  }
  ep.utility = util;
  return ep;
}

}  // namespace dgm
