#include "dgm/environment.hpp"

#include "dgm/error.hpp"
#include "dgm/exploratory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

namespace dgm {

namespace {

// ---------------------------------------------------------------------------
// Circuit domain: NAND/AND gates over boolean wires, primary terminals as
// IN/OUT nodes indexed by position.

Alphabet circuit_alphabet() {
  Alphabet a;
  auto add = [&](Symbol s) { a.symbols.emplace(s.name, std::move(s)); };
  add(Symbol{"NAND", SymbolKind::component, {"in1", "in2"}, {"out"}, {}});
  add(Symbol{"AND", SymbolKind::component, {"in1", "in2"}, {"out"}, {}});
  add(Symbol{"IN", SymbolKind::component, {}, {"out"}, {{"idx", {"0", "1"}}}});
  add(Symbol{"OUT", SymbolKind::component, {"in"}, {}, {{"idx", {"0", "1"}}}});
  add(Symbol{"in1", SymbolKind::port});
  add(Symbol{"in2", SymbolKind::port});
  add(Symbol{"in", SymbolKind::port});
  add(Symbol{"out", SymbolKind::port});
  add(Symbol{"wire", SymbolKind::connective});
  add(Symbol{"idx", SymbolKind::property});
  return a;
}

Rule mk_rule(const std::string& id, const std::string& category, Json expr) {
  return Rule{id, category, std::move(expr)};
}

RuleSet circuit_rules() {
  RuleSet rs;
  rs.alphabet = circuit_alphabet();
  rs.rules.push_back(mk_rule("wire-fanin", "formal", Json{{"atom", "fanin_le"}, {"n", 1}}));
  rs.rules.push_back(mk_rule("combinational", "formal", Json{{"atom", "acyclic"}}));
  rs.rules.push_back(mk_rule(
      "node-budget", "formal", Json{{"atom", "count"}, {"cmp", "le"}, {"n", 20}}));
  rs.rules.push_back(mk_rule("distinct-inputs", "formal",
                             Json{{"atom", "unique_prop"}, {"kind", "IN"}, {"prop", "idx"}}));
  rs.rules.push_back(mk_rule("distinct-outputs", "formal",
                             Json{{"atom", "unique_prop"}, {"kind", "OUT"}, {"prop", "idx"}}));
  return rs;
}

struct CircuitNet {
  std::vector<const ConceptNode*> ins;    // sorted by idx
  std::vector<const ConceptNode*> outs;   // sorted by idx
  std::vector<const ConceptNode*> gates;  // topological order
  // node id -> driving (node id) per input port
  std::map<std::pair<std::string, std::string>, std::string> driver;
};

bool is_gate_kind(const std::string& k) { return k == "NAND" || k == "AND"; }

// Builds the net. In strict mode missing drivers / cycles / absent
// terminals raise; in lenient mode gates with unresolved feeds read 0 and
// missing terminals are tolerated.
CircuitNet circuit_net(const Concept& c, bool strict) {
  CircuitNet net;
  for (const auto& n : c.nodes()) {
    if (n.kind == "IN") net.ins.push_back(&n);
    else if (n.kind == "OUT") net.outs.push_back(&n);
    else if (is_gate_kind(n.kind)) net.gates.push_back(&n);
    else raise(Errc::unknown_kind, "kind outside the circuit domain: " + n.kind);
  }
  auto by_idx = [](const ConceptNode* a, const ConceptNode* b) {
    return a->props.at("idx") < b->props.at("idx");
  };
  std::sort(net.ins.begin(), net.ins.end(), by_idx);
  std::sort(net.outs.begin(), net.outs.end(), by_idx);

  for (const auto& e : c.edges()) net.driver[{e.to_node, e.to_port}] = e.from_node;
  if (strict) {
    for (const auto* g : net.gates)
      for (const auto& port : {std::string("in1"), std::string("in2")})
        if (!net.driver.count({g->id, port}))
          raise(Errc::dangling_port, "unwired gate input " + g->id + "." + port);
    for (const auto* o : net.outs)
      if (!net.driver.count({o->id, "in"}))
        raise(Errc::dangling_port, "unwired output terminal " + o->id);
    if (net.ins.empty() || net.outs.empty())
      raise(Errc::compile_error, "circuit needs at least one IN and one OUT terminal");
  }

  // Topological order over gates.
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<const ConceptNode*>> dependents;
  std::vector<const ConceptNode*> ready;
  for (const auto* g : net.gates) {
    std::size_t deps = 0;
    for (const auto& port : {std::string("in1"), std::string("in2")}) {
      auto it = net.driver.find({g->id, port});
      if (it != net.driver.end() && c.find_node(it->second) &&
          is_gate_kind(c.find_node(it->second)->kind)) {
        ++deps;
        dependents[it->second].push_back(g);
      }
    }
    pending[g->id] = deps;
    if (deps == 0) ready.push_back(g);
  }
  std::vector<const ConceptNode*> order;
  while (!ready.empty()) {
    const ConceptNode* g = ready.back();
    ready.pop_back();
    order.push_back(g);
    for (const auto* d : dependents[g->id])
      if (--pending[d->id] == 0) ready.push_back(d);
  }
  if (order.size() != net.gates.size()) {
    if (strict) raise(Errc::compile_error, "combinational cycle in circuit");
    // lenient: drop cyclic gates; they read as constant 0
  }
  std::sort(order.begin(), order.end(),
            [](const ConceptNode* a, const ConceptNode* b) { return a->id < b->id; });
  // Re-run Kahn with deterministic tie order.
  {
    std::map<std::string, std::size_t> pend = pending;
    for (auto& [k, v] : pend) v = 0;
    for (const auto* g : net.gates) pend[g->id] = 0;
    std::map<std::string, std::size_t> deg;
    for (const auto* g : net.gates) {
      std::size_t deps = 0;
      for (const auto& port : {std::string("in1"), std::string("in2")}) {
        auto it = net.driver.find({g->id, port});
        if (it != net.driver.end() && is_gate_kind(c.find_node(it->second)->kind)) ++deps;
      }
      deg[g->id] = deps;
    }
    std::vector<const ConceptNode*> out;
    std::set<std::string> done;
    bool progressed = true;
    while (progressed) {
      progressed = false;
      for (const auto* g : net.gates) {
        if (done.count(g->id)) continue;
        std::size_t deps = 0;
        for (const auto& port : {std::string("in1"), std::string("in2")}) {
          auto it = net.driver.find({g->id, port});
          if (it != net.driver.end() && is_gate_kind(c.find_node(it->second)->kind) &&
              !done.count(it->second))
            ++deps;
        }
        if (deps == 0) {
          out.push_back(g);
          done.insert(g->id);
          progressed = true;
        }
      }
    }
    net.gates = std::move(out);
  }
  return net;
}

// Evaluates every signal as a bitmask over the 2^n_inputs combinations of
// the (lenient) two-input universe; bit k corresponds to in0=k&1, in1=k>>1.
std::map<std::string, unsigned> circuit_signals(const Concept& c, const CircuitNet& net) {
  std::map<std::string, unsigned> fn;  // node id -> 4-bit truth mask
  for (const auto* in : net.ins) {
    unsigned mask = 0;
    int idx = in->props.at("idx") == "0" ? 0 : 1;
    for (unsigned k = 0; k < 4; ++k)
      if ((k >> idx) & 1u) mask |= 1u << k;
    fn[in->id] = mask;
  }
  for (const auto* g : net.gates) {
    auto feed = [&](const char* port) -> unsigned {
      auto it = net.driver.find({g->id, port});
      if (it == net.driver.end()) return 0;  // lenient: unwired reads 0
      auto f = fn.find(it->second);
      return f == fn.end() ? 0 : f->second;
    };
    unsigned a = feed("in1"), b = feed("in2");
    unsigned v = (g->kind == "AND") ? (a & b) : (~(a & b) & 0xFu);
    fn[g->id] = v;
  }
  return fn;
}

struct TargetTable {
  // out idx -> 4-bit expected mask (over in0/in1 combos), plus presence.
  std::map<std::string, unsigned> expect;
};

TargetTable target_from_requirements(const RequirementSet& reqs) {
  TargetTable t;
  for (const auto& r : reqs.requirements) {
    if (r.scenario.value("type", "") != "table_row") continue;
    const auto& in = r.scenario.at("in");
    unsigned k = 0;
    if (in.contains("0") && in.at("0").get<std::string>() == "1") k |= 1;
    if (in.contains("1") && in.at("1").get<std::string>() == "1") k |= 2;
    std::string out_idx = r.scenario.at("out_idx").get<std::string>();
    if (!t.expect.count(out_idx)) t.expect[out_idx] = 0;
    if (r.scenario.at("expect").get<std::string>() == "1") t.expect[out_idx] |= 1u << k;
  }
  return t;
}

class CircuitDomain final : public Domain {
 public:
  CircuitDomain() : name_("circuit"), alphabet_(circuit_alphabet()) {}

  const std::string& name() const override { return name_; }
  const Alphabet& alphabet() const override { return alphabet_; }
  RuleSet default_rules() const override { return circuit_rules(); }

  MealySystem compile(const Concept& c, std::size_t horizon) const override {
    if (c.is_empty()) raise(Errc::compile_error, "the empty concept has no behavior");
    c.validate(alphabet_);
    CircuitNet net = circuit_net(c, /*strict=*/true);
    const std::size_t n_in = net.ins.size();
    std::vector<std::vector<std::string>> in_factors(n_in, {"0", "1"});
    std::vector<std::vector<std::string>> out_factors(net.outs.size(), {"0", "1"});
    DataSet in = DataSet::product_of(in_factors);
    DataSet out = DataSet::product_of(out_factors);
    return make_stateless(horizon, in, out, [&](const std::string& iv) {
      auto bits = tuple_split(iv, n_in);
      std::map<std::string, int> val;
      for (std::size_t i = 0; i < n_in; ++i) val[net.ins[i]->id] = bits[i] == "1" ? 1 : 0;
      for (const auto* g : net.gates) {
        int a = val[net.driver.at({g->id, "in1"})];
        int b = val[net.driver.at({g->id, "in2"})];
        val[g->id] = g->kind == "AND" ? (a & b) : 1 - (a & b);
      }
      std::vector<std::string> ov;
      for (const auto* o : net.outs)
        ov.push_back(val[net.driver.at({o->id, "in"})] ? "1" : "0");
      return tuple_join(ov);
    });
  }

  double cost(const Concept& c) const override {
    double total = 0;
    for (const auto& n : c.nodes()) {
      if (n.kind == "NAND") total += 0.1;
      else if (n.kind == "AND") total += 0.2;
    }
    return total;
  }

  double score_hint(const Concept& c, const RequirementSet& internal) const override {
    if (c.is_empty()) return 0.0;
    CircuitNet net;
    try {
      net = circuit_net(c, /*strict=*/false);
    } catch (const Error&) {
      return -1000.0;
    }
    auto fn = circuit_signals(c, net);
    TargetTable target = target_from_requirements(internal);

    std::set<unsigned> distinct;
    for (const auto& [id, v] : fn) distinct.insert(v);

    double score = 0;
    std::size_t gates = net.gates.size();
    std::size_t wired_perfect = 0, wired_imperfect = 0;
    double best_sum = 0;
    for (const auto& [out_idx, expect] : target.expect) {
      unsigned best = 0;
      for (const auto& [id, v] : fn)
        best = std::max(best, (unsigned)std::popcount(~(v ^ expect) & 0xFu));
      best_sum += best;
      // wired output terminal for this index?
      for (const auto* o : net.outs) {
        if (o->props.at("idx") != out_idx) continue;
        auto it = net.driver.find({o->id, "in"});
        if (it == net.driver.end()) continue;
        auto f = fn.find(it->second);
        unsigned v = f == fn.end() ? 0 : f->second;
        if ((v & 0xFu) == expect) ++wired_perfect;
        else ++wired_imperfect;
      }
    }
    score += 4.0 * static_cast<double>(wired_perfect);
    score -= 1.0 * static_cast<double>(wired_imperfect);
    score += best_sum;
    score += 0.3 * static_cast<double>(distinct.size());
    score += 0.2 * static_cast<double>(net.ins.size());
    score += 0.2 * static_cast<double>(net.outs.size());
    score -= 0.05 * static_cast<double>(gates);
    score -= 0.02 * static_cast<double>(c.node_count());
    return score;
  }

  std::string frontier_signature(const Concept& c) const override {
    if (c.is_empty()) return "empty";
    CircuitNet net;
    try {
      net = circuit_net(c, false);
    } catch (const Error&) {
      return "invalid:" + concept_hash(c);
    }
    auto fn = circuit_signals(c, net);
    std::set<unsigned> distinct;
    for (const auto& [id, v] : fn) distinct.insert(v);
    std::string sig = "f:";
    for (unsigned v : distinct) sig += std::to_string(v) + ",";
    sig += ";in:";
    for (const auto* i : net.ins) sig += i->props.at("idx") + ",";
    sig += ";out:";
    for (const auto* o : net.outs) {
      sig += o->props.at("idx") + "=";
      auto it = net.driver.find({o->id, "in"});
      if (it != net.driver.end() && fn.count(it->second))
        sig += std::to_string(fn.at(it->second));
      else
        sig += "-";
      sig += ",";
    }
    return sig;
  }

  std::vector<DesignSequence> default_policy(std::size_t max_signals) const override;
  RequirementSet default_requirements(const std::string& location) const override;
  Json library_template(const std::string& name) const override;

 private:
  std::string name_;
  Alphabet alphabet_;
};

Json guard_count_eq_zero(const std::string& kind, const std::string& prop,
                         const std::string& value) {
  return Json{{"atom", "count"}, {"kind", kind}, {"prop", prop},
              {"value", value}, {"cmp", "eq"}, {"n", 0}};
}

std::vector<DesignSequence> CircuitDomain::default_policy(std::size_t max_signals) const {
  std::vector<DesignSequence> policy;
  auto seq = [&](const std::string& id, std::vector<DesignAction> actions) {
    policy.push_back(DesignSequence{id, std::move(actions)});
  };
  for (const std::string idx : {"0", "1"}) {
    seq("init-in" + idx,
        {DesignAction{"instantiate", Json{{"kind", "IN"}, {"props", {{"idx", idx}}}},
                      guard_count_eq_zero("IN", "idx", idx)}});
    seq("init-out" + idx,
        {DesignAction{"instantiate", Json{{"kind", "OUT"}, {"props", {{"idx", idx}}}},
                      guard_count_eq_zero("OUT", "idx", idx)}});
  }
  for (std::size_t i = 0; i < max_signals; ++i)
    for (std::size_t j = i; j < max_signals; ++j) {
      char id[32];
      std::snprintf(id, sizeof id, "gate-%02zu-%02zu", i, j);
      seq(id, {DesignAction{"instantiate", Json{{"kind", "NAND"}}, std::nullopt},
               DesignAction{"connect",
                            Json{{"from", {{"sig", i}}}, {"to", {{"last", "in1"}}}},
                            std::nullopt},
               DesignAction{"connect",
                            Json{{"from", {{"sig", j}}}, {"to", {{"last", "in2"}}}},
                            std::nullopt}});
    }
  for (const std::string idx : {"0", "1"})
    for (std::size_t i = 0; i < max_signals; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "wire-out%s-%02zu", idx.c_str(), i);
      seq(id, {DesignAction{
                  "connect",
                  Json{{"from", {{"sig", i}}},
                       {"to", {{"node_kind", "OUT"}, {"prop", "idx"}, {"value", idx},
                               {"port", "in"}}}},
                  std::nullopt}});
    }
  seq("submit-verified", {DesignAction{"verify", Json{{"all", true}}, std::nullopt},
                          DesignAction{"submit", Json::object(), std::nullopt}});
  return policy;
}

RequirementSet CircuitDomain::default_requirements(const std::string& location) const {
  RequirementSet rs;
  rs.location = location;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 2; ++a) {
      int sum = a ^ b, carry = a & b;
      auto row = [&](const std::string& out_idx, int expect, const std::string& tag) {
        Requirement r;
        r.id = "row-" + std::to_string(a) + std::to_string(b) + "-" + tag;
        r.weight = 1.0;
        r.scenario = Json{{"type", "table_row"},
                          {"in", {{"0", a ? "1" : "0"}, {"1", b ? "1" : "0"}}},
                          {"out_idx", out_idx},
                          {"expect", expect ? "1" : "0"}};
        rs.requirements.push_back(std::move(r));
      };
      row("0", sum, "sum");
      row("1", carry, "carry");
    }
  return rs;
}

Json CircuitDomain::library_template(const std::string& name) const {
  if (name == "nand") {
    Concept c;
    c.add_node(ConceptNode{"g0", "NAND", {}});
    return Json{{"concept", c.to_json()},
                {"ports", {{"in1", Json::array({"g0.in1"})},
                           {"in2", Json::array({"g0.in2"})},
                           {"out", "g0.out"}}}};
  }
  if (name == "and-from-nand") {
    // AND = NOT(NAND(a,b)); the NOT is a NAND with tied inputs.
    Concept c;
    c.add_node(ConceptNode{"g0", "NAND", {}});
    c.add_node(ConceptNode{"g1", "NAND", {}});
    c.add_edge(ConceptEdge{"g0", "out", "g1", "in1"});
    c.add_edge(ConceptEdge{"g0", "out", "g1", "in2"});
    return Json{{"concept", c.to_json()},
                {"ports", {{"in1", Json::array({"g0.in1"})},
                           {"in2", Json::array({"g0.in2"})},
                           {"out", "g1.out"}}},
                {"as_kind", "AND"}};
  }
  raise(Errc::missing_artifact, "unknown circuit template: " + name);
}

// ---------------------------------------------------------------------------
// Pipeline domain: typed linear dataflow chains.

Alphabet pipeline_alphabet() {
  Alphabet a;
  auto add = [&](Symbol s) { a.symbols.emplace(s.name, std::move(s)); };
  std::vector<std::string> types{"bit", "int"};
  add(Symbol{"SRC", SymbolKind::component, {}, {"out"}, {{"type_out", types}}});
  add(Symbol{"XF", SymbolKind::component, {"in"}, {"out"},
             {{"fn", {"inc", "not", "parity"}}, {"type_in", types}, {"type_out", types}}});
  add(Symbol{"FL", SymbolKind::component, {"in"}, {"out"},
             {{"pred", {"even", "ones"}}, {"type_in", types}, {"type_out", types}}});
  add(Symbol{"SNK", SymbolKind::component, {"in"}, {}, {{"type_in", types}}});
  add(Symbol{"in", SymbolKind::port});
  add(Symbol{"out", SymbolKind::port});
  add(Symbol{"flow", SymbolKind::connective});
  add(Symbol{"type_in", SymbolKind::property});
  add(Symbol{"type_out", SymbolKind::property});
  add(Symbol{"fn", SymbolKind::property});
  add(Symbol{"pred", SymbolKind::property});
  return a;
}

RuleSet pipeline_rules() {
  RuleSet rs;
  rs.alphabet = pipeline_alphabet();
  rs.rules.push_back(mk_rule("flow-fanin", "formal", Json{{"atom", "fanin_le"}, {"n", 1}}));
  rs.rules.push_back(mk_rule("flow-fanout", "formal", Json{{"atom", "fanout_le"}, {"n", 1}}));
  rs.rules.push_back(mk_rule("dag", "formal", Json{{"atom", "acyclic"}}));
  rs.rules.push_back(mk_rule("stage-budget", "formal",
                             Json{{"atom", "count"}, {"cmp", "le"}, {"n", 8}}));
  rs.rules.push_back(mk_rule("single-source", "formal",
                             Json{{"atom", "count"}, {"kind", "SRC"}, {"cmp", "le"}, {"n", 1}}));
  rs.rules.push_back(mk_rule("single-sink", "formal",
                             Json{{"atom", "count"}, {"kind", "SNK"}, {"cmp", "le"}, {"n", 1}}));
  rs.rules.push_back(mk_rule("typed-flow", "formal",
                             Json{{"atom", "edge_prop_match"},
                                  {"from_prop", "type_out"},
                                  {"to_prop", "type_in"}}));
  return rs;
}

std::vector<std::string> type_values(const std::string& type) {
  if (type == "bit") return {"0", "1", kEpsilon};
  return {"0", "1", "2", kEpsilon};
}

std::string stage_apply(const ConceptNode& n, const std::string& v) {
  if (v == kEpsilon) return kEpsilon;
  if (n.kind == "XF") {
    const std::string& fn = n.props.at("fn");
    int x = std::stoi(v);
    if (fn == "inc") return std::to_string((x + 1) % 3);
    if (fn == "not") return x ? "0" : "1";
    if (fn == "parity") return std::to_string(x % 2);
  }
  if (n.kind == "FL") {
    const std::string& pred = n.props.at("pred");
    int x = std::stoi(v);
    if (pred == "even") return x % 2 == 0 ? v : kEpsilon;
    if (pred == "ones") return x == 1 ? v : kEpsilon;
  }
  return v;  // SRC / SNK pass through
}

double stage_cost(const ConceptNode& n) {
  if (n.kind == "SRC" || n.kind == "SNK") return 0.2;
  if (n.kind == "XF") return 0.5;
  if (n.kind == "FL") return 0.4;
  return 0.0;
}

struct Chain {
  std::vector<const ConceptNode*> stages;  // SRC ... SNK
};

Chain pipeline_chain(const Concept& c, bool strict) {
  Chain ch;
  const ConceptNode* src = nullptr;
  for (const auto& n : c.nodes()) {
    if (n.kind == "SRC") src = &n;
    else if (n.kind != "XF" && n.kind != "FL" && n.kind != "SNK")
      raise(Errc::unknown_kind, "kind outside the pipeline domain: " + n.kind);
  }
  if (!src) {
    if (strict) raise(Errc::compile_error, "pipeline has no source");
    return ch;
  }
  std::map<std::string, const ConceptEdge*> next;
  for (const auto& e : c.edges()) next[e.from_node] = &e;
  const ConceptNode* cur = src;
  std::set<std::string> seen;
  while (cur) {
    if (!seen.insert(cur->id).second) raise(Errc::compile_error, "pipeline loop");
    ch.stages.push_back(cur);
    if (cur->kind == "SNK") break;
    auto it = next.find(cur->id);
    if (it == next.end()) {
      if (strict) raise(Errc::dangling_port, "pipeline ends before a sink: " + cur->id);
      return ch;
    }
    cur = c.find_node(it->second->to_node);
  }
  if (strict) {
    if (ch.stages.back()->kind != "SNK") raise(Errc::dangling_port, "pipeline has no sink");
    if (ch.stages.size() != c.node_count())
      raise(Errc::compile_error, "pipeline has stages outside the chain");
    for (std::size_t i = 0; i + 1 < ch.stages.size(); ++i) {
      const auto& a = ch.stages[i]->props;
      const auto& b = ch.stages[i + 1]->props;
      auto ao = a.find("type_out");
      auto bi = b.find("type_in");
      if (ao != a.end() && bi != b.end() && ao->second != bi->second)
        raise(Errc::compile_error, "type mismatch along the chain");
    }
  }
  return ch;
}

class PipelineDomain final : public Domain {
 public:
  PipelineDomain() : name_("pipeline"), alphabet_(pipeline_alphabet()) {}

  const std::string& name() const override { return name_; }
  const Alphabet& alphabet() const override { return alphabet_; }
  RuleSet default_rules() const override { return pipeline_rules(); }

  MealySystem compile(const Concept& c, std::size_t horizon) const override {
    if (c.is_empty()) raise(Errc::compile_error, "the empty concept has no behavior");
    c.validate(alphabet_);
    Chain ch = pipeline_chain(c, /*strict=*/true);
    DataSet in = DataSet::atomic(type_values(ch.stages.front()->props.at("type_out")));
    DataSet out = DataSet::atomic(type_values(ch.stages.back()->props.at("type_in")));
    std::vector<const ConceptNode*> stages = ch.stages;
    return make_stateless(horizon, in, out, [stages](const std::string& v0) {
      std::string v = v0;
      for (const auto* s : stages) v = stage_apply(*s, v);
      return v;
    });
  }

  double cost(const Concept& c) const override {
    double total = 0;
    for (const auto& n : c.nodes()) total += stage_cost(n);
    return total;
  }

  double score_hint(const Concept& c, const RequirementSet& internal) const override {
    (void)internal;
    if (c.is_empty()) return 0.0;
    Chain ch;
    try {
      ch = pipeline_chain(c, false);
    } catch (const Error&) {
      return -1000.0;
    }
    double score = 0;
    bool has_src = false, has_snk = false;
    for (const auto& n : c.nodes()) {
      if (n.kind == "SRC") has_src = true;
      if (n.kind == "SNK") has_snk = true;
    }
    score += has_src ? 1.0 : 0.0;
    score += has_snk ? 1.0 : 0.0;
    score += 0.5 * static_cast<double>(ch.stages.size());
    if (!ch.stages.empty() && ch.stages.back()->kind == "SNK") score += 2.0;
    score -= cost(c);
    return score;
  }

  std::string frontier_signature(const Concept& c) const override {
    Chain ch;
    try {
      ch = pipeline_chain(c, false);
    } catch (const Error&) {
      return "invalid:" + concept_hash(c);
    }
    std::string sig = "chain:";
    for (const auto* s : ch.stages) {
      sig += s->kind;
      for (const auto& [k, v] : s->props) sig += ":" + v;
      sig += ",";
    }
    sig += ";n:" + std::to_string(c.node_count());
    return sig;
  }

  std::vector<DesignSequence> default_policy(std::size_t max_signals) const override {
    std::vector<DesignSequence> policy;
    auto seq = [&](const std::string& id, std::vector<DesignAction> actions) {
      policy.push_back(DesignSequence{id, std::move(actions)});
    };
    seq("init-src", {DesignAction{"instantiate",
                                  Json{{"kind", "SRC"}, {"props", {{"type_out", "int"}}}},
                                  guard_count_eq_zero("SRC", "type_out", "int")}});
    seq("init-snk", {DesignAction{"instantiate",
                                  Json{{"kind", "SNK"}, {"props", {{"type_in", "bit"}}}},
                                  guard_count_eq_zero("SNK", "type_in", "bit")}});
    struct Stage {
      const char* tag;
      Json props;
    };
    std::vector<Stage> stages{
        {"xf-inc", Json{{"fn", "inc"}, {"type_in", "int"}, {"type_out", "int"}}},
        {"xf-parity", Json{{"fn", "parity"}, {"type_in", "int"}, {"type_out", "bit"}}},
        {"xf-not", Json{{"fn", "not"}, {"type_in", "bit"}, {"type_out", "bit"}}},
        {"fl-even", Json{{"pred", "even"}, {"type_in", "int"}, {"type_out", "int"}}},
        {"fl-ones", Json{{"pred", "ones"}, {"type_in", "bit"}, {"type_out", "bit"}}},
    };
    for (std::size_t s = 0; s < stages.size(); ++s)
      for (std::size_t i = 0; i < max_signals; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "stage-%s-%02zu", stages[s].tag, i);
        std::string kind = std::string(stages[s].tag).substr(0, 2) == "xf" ? "XF" : "FL";
        seq(id, {DesignAction{"instantiate", Json{{"kind", kind}, {"props", stages[s].props}},
                              std::nullopt},
                 DesignAction{"connect",
                              Json{{"from", {{"sig", i}}}, {"to", {{"last", "in"}}}},
                              std::nullopt}});
      }
    for (std::size_t i = 0; i < max_signals; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "wire-snk-%02zu", i);
      seq(id, {DesignAction{"connect",
                            Json{{"from", {{"sig", i}}},
                                 {"to", {{"node_kind", "SNK"}, {"port", "in"}}}},
                            std::nullopt}});
    }
    seq("submit-verified", {DesignAction{"verify", Json{{"all", true}}, std::nullopt},
                            DesignAction{"submit", Json::object(), std::nullopt}});
    return policy;
  }

  RequirementSet default_requirements(const std::string& location) const override {
    RequirementSet rs;
    rs.location = location;
    Requirement ok;
    ok.id = "typed-within-budget";
    ok.weight = 5.0;
    ok.scenario = Json{{"type", "pipeline_ok"}, {"budget", 2.0}};
    rs.requirements.push_back(std::move(ok));
    return rs;
  }

  Json library_template(const std::string& name) const override {
    raise(Errc::missing_artifact, "unknown pipeline template: " + name);
  }

 private:
  std::string name_;
  Alphabet alphabet_;
};

}  // namespace

std::shared_ptr<const Domain> make_domain(const std::string& name) {
  if (name == "circuit") return std::make_shared<CircuitDomain>();
  if (name == "pipeline") return std::make_shared<PipelineDomain>();
  raise(Errc::unknown_kind, "unknown domain: " + name);
}

Json EnvironmentModel::to_json() const {
  Json j;
  j["id"] = id;
  j["domain"] = domain;
  j["weight"] = weight;
  j["T"] = horizon;
  j["reward_range"] = Json::array({reward_min, reward_max});
  j["phi_env"] = phi_env.to_json();
  return j;
}

EnvironmentModel EnvironmentModel::from_json(const Json& j) {
  EnvironmentModel m;
  m.id = j.at("id").get<std::string>();
  m.domain = j.at("domain").get<std::string>();
  m.weight = j.at("weight").get<double>();
  m.horizon = j.at("T").get<std::size_t>();
  m.reward_min = j.at("reward_range").at(0).get<double>();
  m.reward_max = j.at("reward_range").at(1).get<double>();
  m.phi_env = RequirementSet::from_json(j.at("phi_env"));
  if (m.phi_env.location != "environment-held")
    raise(Errc::bad_input, "model requirements must be environment-held");
  return m;
}

void ModelSet::validate() const {
  if (models.empty()) raise(Errc::bad_input, "model set must be non-empty");
  double sum = 0;
  for (const auto& m : models) {
    if (m.weight < 0) raise(Errc::bad_input, "model weights must be non-negative");
    sum += m.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9) raise(Errc::bad_input, "model weights must sum to 1");
}

Json ModelSet::to_json() const {
  Json arr = Json::array();
  for (const auto& m : models) arr.push_back(m.to_json());
  return Json{{"models", arr}};
}

ModelSet ModelSet::from_json(const Json& j) {
  ModelSet s;
  for (const auto& jm : j.at("models")) s.models.push_back(EnvironmentModel::from_json(jm));
  s.validate();
  return s;
}

double env_reward(const EnvironmentModel& mu, const Concept& c) {
  auto domain = make_domain(mu.domain);
  if (c.is_empty()) return 0.0;
  double reward;
  try {
    reward = verify_external(c, mu.phi_env, *domain);
  } catch (const Error& e) {
    if (e.code() == Errc::compile_error || e.code() == Errc::dangling_port)
      return 0.0;  // in-domain but non-executable: no partial credit
    throw;
  }
  if (reward < mu.reward_min || reward > mu.reward_max)
    raise(Errc::environment_contract,
          "reward outside declared range: " + std::to_string(reward));
  return reward;
}

std::vector<double> env_evaluate(const EnvironmentModel& mu, const Concept& c,
                                 std::size_t submit_step) {
  if (submit_step > mu.horizon) raise(Errc::out_of_domain, "submission beyond horizon");
  // Out-of-domain concepts must fail loudly even when empty-adjacent.
  if (!c.is_empty()) {
    auto domain = make_domain(mu.domain);
    c.validate(domain->alphabet());
  }
  std::vector<double> stream(mu.horizon + 1, 0.0);
  stream[submit_step] = env_reward(mu, c);
  return stream;
}

MealySystem compile_concept(const Concept& c, const Domain& domain, std::size_t horizon) {
  return domain.compile(c, horizon);
}

ModelSet default_model_set(const std::string& domain) {
  auto d = make_domain(domain);
  EnvironmentModel m;
  m.id = domain + "-default";
  m.domain = domain;
  m.weight = 1.0;
  m.horizon = 14;
  m.reward_min = -100.0;
  m.reward_max = 100.0;
  m.phi_env = d->default_requirements("environment-held");
  ModelSet s;
  s.models.push_back(std::move(m));
  s.validate();
  return s;
}

}  // namespace dgm
