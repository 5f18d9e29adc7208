#pragma once

#include "dgm/serial.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dgm {

enum class SymbolKind { component, port, connective, property };

SymbolKind symbol_kind_from_string(const std::string& s);
std::string to_string(SymbolKind k);

/// One alphabet entry. Component-kind symbols additionally declare their
/// input/output ports and finite property domains.
struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::component;
  std::vector<std::string> inputs;   // input port names (component kinds)
  std::vector<std::string> outputs;  // output port names (component kinds)
  std::map<std::string, std::vector<std::string>> props;  // property -> value domain

  Json to_json() const;
  static Symbol from_json(const Json& j);
};

struct Alphabet {
  std::map<std::string, Symbol> symbols;

  const Symbol* find(const std::string& name) const;
  const Symbol& component(const std::string& name) const;  // throws unknown_symbol
  std::vector<std::string> component_kinds() const;        // sorted

  Json to_json() const;
  static Alphabet from_json(const Json& j);
};

/// A finite sequence of alphabet symbols. Element of the word set over the
/// alphabet; kept mainly for loading/round-tripping rule files.
struct Word {
  std::vector<std::string> symbols;

  void validate(const Alphabet& a) const;  // throws unknown_symbol
  Json to_json() const;
  static Word from_json(const Json& j);
};

struct ConceptNode {
  std::string id;
  std::string kind;
  std::map<std::string, std::string> props;

  bool operator==(const ConceptNode&) const = default;
};

struct ConceptEdge {
  std::string from_node, from_port;
  std::string to_node, to_port;

  bool operator==(const ConceptEdge&) const = default;
  auto key() const { return std::tie(from_node, from_port, to_node, to_port); }
  bool operator<(const ConceptEdge& o) const { return key() < o.key(); }
};

/// A typed component graph. The node-less concept is the empty concept.
class Concept {
 public:
  Concept() = default;
  static Concept empty() { return Concept{}; }

  bool is_empty() const { return nodes_.empty(); }
  const std::vector<ConceptNode>& nodes() const { return nodes_; }
  const std::vector<ConceptEdge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }

  const ConceptNode* find_node(const std::string& id) const;

  /// Structural checks independent of any alphabet: unique ids, edge
  /// endpoints exist. Throws unknown_reference.
  void add_node(ConceptNode n);
  void add_edge(ConceptEdge e);
  void remove_node(const std::string& id);  // drops incident edges
  void remove_edge(const ConceptEdge& e);

  /// Alphabet-level validation: kinds declared, ports exist with the right
  /// direction, property values in domain. Throws unknown_symbol /
  /// unknown_reference.
  void validate(const Alphabet& a) const;

  std::size_t in_degree(const std::string& node, const std::string& port) const;

  Json to_json() const;
  static Concept from_json(const Json& j);  // validates structure

  bool operator==(const Concept& o) const { return nodes_ == o.nodes_ && edges_ == o.edges_; }

 private:
  std::vector<ConceptNode> nodes_;  // sorted by id
  std::vector<ConceptEdge> edges_;  // sorted
};

/// A pure, terminating constraint over a concept. The expression tree is
/// stored as JSON; see eval_rule_expr for the atom vocabulary.
struct Rule {
  std::string id;
  std::string category;  // "formal" | "conceptual"
  Json expr;

  Json to_json() const;
  static Rule from_json(const Json& j);
};

struct RuleSet {
  Alphabet alphabet;
  std::vector<Rule> rules;  // ordered, ids unique

  void validate() const;
  Json to_json() const;
  static RuleSet from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

bool eval_rule_expr(const Json& expr, const Concept& c);

/// True iff every rule constraint holds on c. The empty concept is always
/// permissible. Throws unknown_symbol when c uses symbols outside r.alphabet.
bool is_permissible(const Concept& c, const RuleSet& r);

/// Canonical relabeling: isomorphic concepts map to identical
/// serializations; idempotent.
Concept canonical_form(const Concept& c);

std::string concept_hash(const Concept& c);

struct InterpretResult {
  std::vector<Concept> concepts;  // canonical forms, deterministic order
  std::size_t candidates_examined = 0;
};

/// All permissible concepts with node count <= size_bound, canonical and
/// deterministically ordered (node count, then serialization). Throws
/// budget_exceeded when candidate generation passes the ceiling.
InterpretResult interpret(const RuleSet& r, std::size_t size_bound,
                          std::size_t expansion_ceiling = 5'000'000);

}  // namespace dgm
