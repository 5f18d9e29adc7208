#include "dgm/design_language.hpp"

#include "dgm/error.hpp"
#include "dgm/hash.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

namespace dgm {

SymbolKind symbol_kind_from_string(const std::string& s) {
  if (s == "component-kind") return SymbolKind::component;
  if (s == "port") return SymbolKind::port;
  if (s == "connective") return SymbolKind::connective;
  if (s == "property") return SymbolKind::property;
  raise(Errc::bad_input, "unknown symbol kind: " + s);
}

std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::component: return "component-kind";
    case SymbolKind::port: return "port";
    case SymbolKind::connective: return "connective";
    case SymbolKind::property: return "property";
  }
  return "?";
}

Json Symbol::to_json() const {
  Json j;
  j["name"] = name;
  j["kind"] = to_string(kind);
  if (!inputs.empty()) j["inputs"] = inputs;
  if (!outputs.empty()) j["outputs"] = outputs;
  if (!props.empty()) j["props"] = props;
  return j;
}

Symbol Symbol::from_json(const Json& j) {
  Symbol s;
  s.name = j.at("name").get<std::string>();
  if (s.name.empty()) raise(Errc::bad_input, "symbol name must be non-empty");
  s.kind = symbol_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("inputs")) s.inputs = j["inputs"].get<std::vector<std::string>>();
  if (j.contains("outputs")) s.outputs = j["outputs"].get<std::vector<std::string>>();
  if (j.contains("props"))
    s.props = j["props"].get<std::map<std::string, std::vector<std::string>>>();
  return s;
}

const Symbol* Alphabet::find(const std::string& name) const {
  auto it = symbols.find(name);
  return it == symbols.end() ? nullptr : &it->second;
}

const Symbol& Alphabet::component(const std::string& name) const {
  const Symbol* s = find(name);
  if (!s || s->kind != SymbolKind::component)
    raise(Errc::unknown_symbol, "not a component kind: " + name);
  return *s;
}

std::vector<std::string> Alphabet::component_kinds() const {
  std::vector<std::string> out;
  for (const auto& [name, s] : symbols)
    if (s.kind == SymbolKind::component) out.push_back(name);
  return out;
}

Json Alphabet::to_json() const {
  Json arr = Json::array();
  for (const auto& [_, s] : symbols) arr.push_back(s.to_json());
  return Json{{"symbols", arr}};
}

Alphabet Alphabet::from_json(const Json& j) {
  Alphabet a;
  for (const auto& js : j.at("symbols")) {
    Symbol s = Symbol::from_json(js);
    if (a.symbols.count(s.name)) raise(Errc::bad_input, "duplicate symbol: " + s.name);
    a.symbols.emplace(s.name, std::move(s));
  }
  return a;
}

void Word::validate(const Alphabet& a) const {
  for (const auto& s : symbols)
    if (!a.find(s)) raise(Errc::unknown_symbol, "word references unknown symbol: " + s);
}

Json Word::to_json() const { return Json{{"symbols", symbols}}; }

Word Word::from_json(const Json& j) {
  return Word{j.at("symbols").get<std::vector<std::string>>()};
}

const ConceptNode* Concept::find_node(const std::string& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const ConceptNode& n, const std::string& v) { return n.id < v; });
  return (it != nodes_.end() && it->id == id) ? &*it : nullptr;
}

void Concept::add_node(ConceptNode n) {
  if (find_node(n.id)) raise(Errc::unknown_reference, "duplicate node id: " + n.id);
  nodes_.push_back(std::move(n));
  std::sort(nodes_.begin(), nodes_.end(),
            [](const ConceptNode& a, const ConceptNode& b) { return a.id < b.id; });
}

void Concept::add_edge(ConceptEdge e) {
  if (!find_node(e.from_node) || !find_node(e.to_node))
    raise(Errc::unknown_reference, "edge endpoint not a node: " + e.from_node + "->" + e.to_node);
  if (std::find(edges_.begin(), edges_.end(), e) != edges_.end())
    raise(Errc::unknown_reference, "duplicate edge");
  edges_.push_back(std::move(e));
  std::sort(edges_.begin(), edges_.end());
}

void Concept::remove_node(const std::string& id) {
  auto keep = std::remove_if(nodes_.begin(), nodes_.end(),
                             [&](const ConceptNode& n) { return n.id == id; });
  if (keep == nodes_.end()) raise(Errc::unknown_reference, "no such node: " + id);
  nodes_.erase(keep, nodes_.end());
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                              [&](const ConceptEdge& e) {
                                return e.from_node == id || e.to_node == id;
                              }),
               edges_.end());
}

void Concept::remove_edge(const ConceptEdge& e) {
  edges_.erase(std::remove(edges_.begin(), edges_.end(), e), edges_.end());
}

void Concept::validate(const Alphabet& a) const {
  for (const auto& n : nodes_) {
    const Symbol* s = a.find(n.kind);
    if (!s || s->kind != SymbolKind::component)
      raise(Errc::unknown_symbol, "node kind not in alphabet: " + n.kind);
    for (const auto& [p, v] : n.props) {
      auto it = s->props.find(p);
      if (it == s->props.end())
        raise(Errc::unknown_symbol, "property not declared for kind " + n.kind + ": " + p);
      if (std::find(it->second.begin(), it->second.end(), v) == it->second.end())
        raise(Errc::bad_input, "property value out of domain: " + p + "=" + v);
    }
  }
  for (const auto& e : edges_) {
    const ConceptNode* from = find_node(e.from_node);
    const ConceptNode* to = find_node(e.to_node);
    const Symbol& fs = a.component(from->kind);
    const Symbol& ts = a.component(to->kind);
    if (std::find(fs.outputs.begin(), fs.outputs.end(), e.from_port) == fs.outputs.end())
      raise(Errc::unknown_reference,
            "not an output port of " + from->kind + ": " + e.from_port);
    if (std::find(ts.inputs.begin(), ts.inputs.end(), e.to_port) == ts.inputs.end())
      raise(Errc::unknown_reference, "not an input port of " + to->kind + ": " + e.to_port);
  }
}

std::size_t Concept::in_degree(const std::string& node, const std::string& port) const {
  std::size_t k = 0;
  for (const auto& e : edges_)
    if (e.to_node == node && e.to_port == port) ++k;
  return k;
}

Json Concept::to_json() const {
  Json nodes = Json::array();
  for (const auto& n : nodes_) {
    Json jn;
    jn["id"] = n.id;
    jn["kind"] = n.kind;
    if (!n.props.empty()) jn["props"] = n.props;
    nodes.push_back(jn);
  }
  Json edges = Json::array();
  for (const auto& e : edges_)
    edges.push_back(Json::array({e.from_node + "." + e.from_port, e.to_node + "." + e.to_port}));
  return Json{{"edges", edges}, {"nodes", nodes}};
}

static std::pair<std::string, std::string> split_endpoint(const std::string& s) {
  auto dot = s.rfind('.');
  if (dot == std::string::npos) raise(Errc::bad_input, "endpoint missing port: " + s);
  return {s.substr(0, dot), s.substr(dot + 1)};
}

Concept Concept::from_json(const Json& j) {
  Concept c;
  for (const auto& jn : j.at("nodes")) {
    ConceptNode n;
    n.id = jn.at("id").get<std::string>();
    n.kind = jn.at("kind").get<std::string>();
    if (jn.contains("props")) n.props = jn["props"].get<std::map<std::string, std::string>>();
    c.add_node(std::move(n));
  }
  for (const auto& je : j.at("edges")) {
    auto [fn, fp] = split_endpoint(je.at(0).get<std::string>());
    auto [tn, tp] = split_endpoint(je.at(1).get<std::string>());
    c.add_edge(ConceptEdge{fn, fp, tn, tp});
  }
  return c;
}

Json Rule::to_json() const { return Json{{"category", category}, {"expr", expr}, {"id", id}}; }

Rule Rule::from_json(const Json& j) {
  Rule r;
  r.id = j.at("id").get<std::string>();
  r.category = j.at("category").get<std::string>();
  if (r.category != "formal" && r.category != "conceptual")
    raise(Errc::bad_input, "rule category must be formal|conceptual: " + r.category);
  r.expr = j.at("expr");
  return r;
}

void RuleSet::validate() const {
  std::set<std::string> ids;
  for (const auto& r : rules)
    if (!ids.insert(r.id).second) raise(Errc::bad_input, "duplicate rule id: " + r.id);
}

Json RuleSet::to_json() const {
  Json arr = Json::array();
  for (const auto& r : rules) arr.push_back(r.to_json());
  return Json{{"alphabet", alphabet.to_json()}, {"rules", arr}};
}

RuleSet RuleSet::from_json(const Json& j) {
  RuleSet rs;
  rs.alphabet = Alphabet::from_json(j.at("alphabet"));
  for (const auto& jr : j.at("rules")) rs.rules.push_back(Rule::from_json(jr));
  rs.validate();
  return rs;
}

// ---------------------------------------------------------------------------
// Constraint evaluation

namespace {

bool concept_acyclic(const Concept& c) {
  // Kahn over node-level condensation of the port graph.
  std::map<std::string, std::set<std::string>> succ;
  std::map<std::string, std::size_t> indeg;
  for (const auto& n : c.nodes()) indeg[n.id] = 0;
  for (const auto& e : c.edges())
    if (e.from_node != e.to_node && succ[e.from_node].insert(e.to_node).second)
      ++indeg[e.to_node];
  for (const auto& e : c.edges())
    if (e.from_node == e.to_node) return false;
  std::vector<std::string> queue;
  for (const auto& [id, d] : indeg)
    if (d == 0) queue.push_back(id);
  std::size_t seen = 0;
  while (!queue.empty()) {
    std::string id = queue.back();
    queue.pop_back();
    ++seen;
    for (const auto& s : succ[id])
      if (--indeg[s] == 0) queue.push_back(s);
  }
  return seen == c.nodes().size();
}

bool cmp_count(const std::string& cmp, std::size_t count, std::size_t n) {
  if (cmp == "le") return count <= n;
  if (cmp == "ge") return count >= n;
  if (cmp == "eq") return count == n;
  raise(Errc::bad_input, "unknown comparison: " + cmp);
}

bool eval_atom(const Json& expr, const Concept& c) {
  const std::string atom = expr.at("atom").get<std::string>();
  if (atom == "true") return true;
  if (atom == "false") return false;
  if (atom == "count") {
    std::size_t count = 0;
    for (const auto& node : c.nodes()) {
      if (expr.contains("kind") && node.kind != expr["kind"].get<std::string>()) continue;
      if (expr.contains("prop")) {
        auto it = node.props.find(expr["prop"].get<std::string>());
        if (it == node.props.end() || it->second != expr.at("value").get<std::string>()) continue;
      }
      ++count;
    }
    return cmp_count(expr.at("cmp").get<std::string>(), count, expr.at("n").get<std::size_t>());
  }
  if (atom == "edge_count") {
    return cmp_count(expr.at("cmp").get<std::string>(), c.edges().size(),
                     expr.at("n").get<std::size_t>());
  }
  if (atom == "fanin_le") {
    const std::size_t n = expr.at("n").get<std::size_t>();
    std::map<std::pair<std::string, std::string>, std::size_t> indeg;
    for (const auto& e : c.edges())
      if (++indeg[{e.to_node, e.to_port}] > n) return false;
    return true;
  }
  if (atom == "fanout_le") {
    const std::size_t n = expr.at("n").get<std::size_t>();
    std::map<std::pair<std::string, std::string>, std::size_t> outdeg;
    for (const auto& e : c.edges())
      if (++outdeg[{e.from_node, e.from_port}] > n) return false;
    return true;
  }
  if (atom == "acyclic") return concept_acyclic(c);
  if (atom == "no_self_edge") {
    for (const auto& e : c.edges())
      if (e.from_node == e.to_node) return false;
    return true;
  }
  if (atom == "has_part") {
    // Minimal part-of: every node of the whole kind has an edge-connected
    // node of the part kind.
    const std::string whole = expr.at("whole").get<std::string>();
    const std::string part = expr.at("part").get<std::string>();
    for (const auto& node : c.nodes()) {
      if (node.kind != whole) continue;
      bool found = false;
      for (const auto& e : c.edges()) {
        const std::string* other = nullptr;
        if (e.from_node == node.id) other = &e.to_node;
        else if (e.to_node == node.id) other = &e.from_node;
        if (other && c.find_node(*other)->kind == part) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  }
  if (atom == "unique_prop") {
    const std::string kind = expr.at("kind").get<std::string>();
    const std::string prop = expr.at("prop").get<std::string>();
    std::set<std::string> seen;
    for (const auto& node : c.nodes()) {
      if (node.kind != kind) continue;
      auto it = node.props.find(prop);
      if (it != node.props.end() && !seen.insert(it->second).second) return false;
    }
    return true;
  }
  if (atom == "edge_prop_match") {
    const std::string fp = expr.at("from_prop").get<std::string>();
    const std::string tp = expr.at("to_prop").get<std::string>();
    for (const auto& e : c.edges()) {
      const auto& a = c.find_node(e.from_node)->props;
      const auto& b = c.find_node(e.to_node)->props;
      auto ia = a.find(fp);
      auto ib = b.find(tp);
      if (ia != a.end() && ib != b.end() && ia->second != ib->second) return false;
    }
    return true;
  }
  raise(Errc::bad_input, "unknown constraint atom: " + atom);
}

}  // namespace

bool eval_rule_expr(const Json& expr, const Concept& c) {
  if (expr.contains("atom")) return eval_atom(expr, c);
  const std::string op = expr.at("op").get<std::string>();
  if (op == "and") {
    for (const auto& a : expr.at("args"))
      if (!eval_rule_expr(a, c)) return false;
    return true;
  }
  if (op == "or") {
    for (const auto& a : expr.at("args"))
      if (eval_rule_expr(a, c)) return true;
    return false;
  }
  if (op == "not") return !eval_rule_expr(expr.at("arg"), c);
  raise(Errc::bad_input, "unknown constraint op: " + op);
}

bool is_permissible(const Concept& c, const RuleSet& r) {
  c.validate(r.alphabet);
  if (c.is_empty()) return true;
  for (const auto& rule : r.rules)
    if (!eval_rule_expr(rule.expr, c)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

struct CanonState {
  const Concept* c;
  std::vector<std::string> colors;                 // per node index
  std::map<std::string, std::size_t> node_index;   // id -> index
  std::vector<std::vector<std::size_t>> adj_out;   // index -> indices into edges
  std::vector<std::vector<std::size_t>> adj_in;
  std::size_t branch_budget = 20'000;
};

std::string props_key(const ConceptNode& n) {
  std::string k = n.kind;
  for (const auto& [p, v] : n.props) k += "|" + p + "=" + v;
  return k;
}

void refine_colors(CanonState& st) {
  const auto& nodes = st.c->nodes();
  const auto& edges = st.c->edges();
  const std::size_t n = nodes.size();
  std::vector<std::size_t> color(n);
  std::size_t classes;
  {
    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) ids.emplace(props_key(nodes[i]), 0);
    std::size_t k = 0;
    for (auto& [s, id] : ids) id = k++;
    for (std::size_t i = 0; i < n; ++i) color[i] = ids.at(props_key(nodes[i]));
    classes = ids.size();
  }
  // Classes only ever split, so an unchanged class count means a fixpoint.
  for (;;) {
    std::vector<std::string> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> parts;
      for (std::size_t ei : st.adj_out[i]) {
        const auto& e = edges[ei];
        parts.push_back(">" + e.from_port + ":" + e.to_port + ":" +
                        std::to_string(color[st.node_index.at(e.to_node)]));
      }
      for (std::size_t ei : st.adj_in[i]) {
        const auto& e = edges[ei];
        parts.push_back("<" + e.to_port + ":" + e.from_port + ":" +
                        std::to_string(color[st.node_index.at(e.from_node)]));
      }
      std::sort(parts.begin(), parts.end());
      std::string s = std::to_string(color[i]);
      for (const auto& x : parts) s += ";" + x;
      sig[i] = std::move(s);
    }
    std::map<std::string, std::size_t> ids;
    for (const auto& s : sig) ids.emplace(s, 0);
    std::size_t k = 0;
    for (auto& [s, id] : ids) id = k++;
    for (std::size_t i = 0; i < n; ++i) color[i] = ids.at(sig[i]);
    if (ids.size() == classes) break;
    classes = ids.size();
  }
  st.colors.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    st.colors[i] = props_key(nodes[i]) + "#" + std::to_string(color[i]);
}

std::string ordering_serialization(const Concept& c, const std::vector<std::size_t>& order) {
  // order[i] = original node index placed at canonical position i.
  std::vector<std::size_t> pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  auto name = [](std::size_t i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "n%03zu", i);
    return std::string(buf);
  };
  Concept out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    ConceptNode n = c.nodes()[order[i]];
    n.id = name(i);
    out.add_node(std::move(n));
  }
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < c.nodes().size(); ++i) idx[c.nodes()[i].id] = i;
  for (const auto& e : c.edges())
    out.add_edge(ConceptEdge{name(pos[idx[e.from_node]]), e.from_port,
                             name(pos[idx[e.to_node]]), e.to_port});
  return canonical_dump(out.to_json());
}

// Invariant key of a candidate relative to already-placed nodes.
std::string placement_key(const CanonState& st, std::size_t cand,
                          const std::vector<std::size_t>& placed_pos) {
  const auto& edges = st.c->edges();
  std::vector<std::string> sig;
  for (std::size_t ei : st.adj_out[cand]) {
    const auto& e = edges[ei];
    std::size_t j = st.node_index.at(e.to_node);
    if (placed_pos[j] != SIZE_MAX)
      sig.push_back(">" + std::to_string(placed_pos[j]) + ":" + e.from_port + ":" + e.to_port);
  }
  for (std::size_t ei : st.adj_in[cand]) {
    const auto& e = edges[ei];
    std::size_t j = st.node_index.at(e.from_node);
    if (placed_pos[j] != SIZE_MAX)
      sig.push_back("<" + std::to_string(placed_pos[j]) + ":" + e.to_port + ":" + e.from_port);
  }
  std::sort(sig.begin(), sig.end());
  std::string key = st.colors[cand];
  for (const auto& s : sig) key += ";" + s;
  return key;
}

void search_orderings(CanonState& st, std::vector<std::size_t>& order,
                      std::vector<std::size_t>& placed_pos, std::string& best) {
  const std::size_t n = st.c->nodes().size();
  if (order.size() == n) {
    std::string s = ordering_serialization(*st.c, order);
    if (best.empty() || s < best) best = s;
    return;
  }
  // Candidates with the minimal invariant key; branch over all of them.
  std::string min_key;
  std::vector<std::size_t> cands;
  for (std::size_t i = 0; i < n; ++i) {
    if (placed_pos[i] != SIZE_MAX) continue;
    std::string key = placement_key(st, i, placed_pos);
    if (cands.empty() || key < min_key) {
      min_key = key;
      cands = {i};
    } else if (key == min_key) {
      cands.push_back(i);
    }
  }
  if (cands.size() > 1 && st.branch_budget == 0) cands.resize(1);
  for (std::size_t i : cands) {
    if (st.branch_budget > 0 && cands.size() > 1) --st.branch_budget;
    placed_pos[i] = order.size();
    order.push_back(i);
    search_orderings(st, order, placed_pos, best);
    order.pop_back();
    placed_pos[i] = SIZE_MAX;
  }
}

}  // namespace

Concept canonical_form(const Concept& c) {
  if (c.is_empty()) return Concept::empty();
  CanonState st;
  st.c = &c;
  const auto& nodes = c.nodes();
  const auto& edges = c.edges();
  st.colors.resize(nodes.size());
  st.adj_out.resize(nodes.size());
  st.adj_in.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    st.colors[i] = props_key(nodes[i]);
    st.node_index[nodes[i].id] = i;
  }
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    st.adj_out[st.node_index[edges[ei].from_node]].push_back(ei);
    st.adj_in[st.node_index[edges[ei].to_node]].push_back(ei);
  }
  refine_colors(st);
  std::set<std::string> distinct(st.colors.begin(), st.colors.end());
  if (distinct.size() == nodes.size()) {
    // Discrete coloring: the order is forced, no search needed.
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return st.colors[a] < st.colors[b]; });
    return Concept::from_json(Json::parse(ordering_serialization(c, order)));
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> placed_pos(nodes.size(), SIZE_MAX);
  std::string best;
  search_orderings(st, order, placed_pos, best);
  return Concept::from_json(Json::parse(best));
}

std::string concept_hash(const Concept& c) {
  return content_hash(canonical_form(c).to_json());
}

// ---------------------------------------------------------------------------
// Bounded enumeration

namespace {

struct KindVariant {
  std::string kind;
  std::map<std::string, std::string> props;
};

// All (kind, property valuation) variants, in a fixed order.
std::vector<KindVariant> kind_variants(const Alphabet& a) {
  std::vector<KindVariant> out;
  for (const auto& kind : a.component_kinds()) {
    const Symbol& s = a.component(kind);
    std::vector<std::map<std::string, std::string>> valuations{{}};
    for (const auto& [prop, domain] : s.props) {
      std::vector<std::map<std::string, std::string>> next;
      for (const auto& base : valuations)
        for (const auto& v : domain) {
          auto m = base;
          m[prop] = v;
          next.push_back(std::move(m));
        }
      valuations = std::move(next);
    }
    for (auto& val : valuations) out.push_back({kind, std::move(val)});
  }
  return out;
}

struct PortRef {
  std::size_t node;
  std::string port;
};

struct EnumCtx {
  const RuleSet* rules;
  std::size_t ceiling;
  std::size_t examined = 0;
  std::set<std::string> seen;             // canonical dumps
  std::vector<Concept> out;
};

void consider(EnumCtx& ctx, const Concept& c) {
  if (++ctx.examined > ctx.ceiling)
    raise(Errc::budget_exceeded, "enumeration ceiling exceeded");
  if (!is_permissible(c, *ctx.rules)) return;
  Concept canon = canonical_form(c);
  if (ctx.seen.insert(canonical_dump(canon.to_json())).second) ctx.out.push_back(std::move(canon));
}

void grow_edges(EnumCtx& ctx, Concept& c,
                const std::vector<std::pair<PortRef, PortRef>>& candidates, std::size_t from,
                const std::vector<std::string>& ids) {
  consider(ctx, c);
  for (std::size_t i = from; i < candidates.size(); ++i) {
    const auto& [src, dst] = candidates[i];
    ConceptEdge e{ids[src.node], src.port, ids[dst.node], dst.port};
    c.add_edge(e);
    grow_edges(ctx, c, candidates, i + 1, ids);
    c.remove_edge(e);
  }
}

}  // namespace

InterpretResult interpret(const RuleSet& r, std::size_t size_bound,
                          std::size_t expansion_ceiling) {
  r.validate();
  EnumCtx ctx;
  ctx.rules = &r;
  ctx.ceiling = expansion_ceiling;

  const auto variants = kind_variants(r.alphabet);
  // Non-decreasing variant index tuples stand in for node multisets; the
  // canonical-form dedup removes the remaining symmetry.
  std::vector<std::size_t> tuple;
  auto build_and_enumerate = [&](const std::vector<std::size_t>& vs) {
    Concept c;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "m%03zu", i);
      ids.emplace_back(buf);
      c.add_node(ConceptNode{ids.back(), variants[vs[i]].kind, variants[vs[i]].props});
    }
    std::vector<std::pair<PortRef, PortRef>> candidates;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Symbol& si = r.alphabet.component(variants[vs[i]].kind);
      for (const auto& op : si.outputs)
        for (std::size_t j = 0; j < vs.size(); ++j) {
          const Symbol& sj = r.alphabet.component(variants[vs[j]].kind);
          for (const auto& ip : sj.inputs)
            candidates.push_back({PortRef{i, op}, PortRef{j, ip}});
        }
    }
    grow_edges(ctx, c, candidates, 0, ids);
  };

  std::function<void(std::size_t, std::size_t)> pick = [&](std::size_t remaining,
                                                           std::size_t min_variant) {
    if (remaining == 0) {
      if (!tuple.empty()) build_and_enumerate(tuple);
      return;
    }
    for (std::size_t v = min_variant; v < variants.size(); ++v) {
      tuple.push_back(v);
      pick(remaining - 1, v);
      tuple.pop_back();
    }
  };
  // The empty concept, then each node count up to the bound.
  consider(ctx, Concept::empty());
  for (std::size_t m = 1; m <= size_bound; ++m) pick(m, 0);

  std::sort(ctx.out.begin(), ctx.out.end(), [](const Concept& a, const Concept& b) {
    if (a.node_count() != b.node_count()) return a.node_count() < b.node_count();
    return canonical_dump(a.to_json()) < canonical_dump(b.to_json());
  });
  return InterpretResult{std::move(ctx.out), ctx.examined};
}

}  // namespace dgm
