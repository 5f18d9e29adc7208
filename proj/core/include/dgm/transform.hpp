#pragma once

#include "dgm/exploratory.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dgm {

inline const std::string kCheckerVersion = "dgm-cert-1";

struct ProposalEdit {
  std::string op;  // "add" | "remove" | "replace"
  Json payload;

  Json to_json() const;
  static ProposalEdit from_json(const Json& j);
};

/// A candidate self-modification: edits against a basis snapshot.
/// Targets: rules, policy, utility-params, meta-params.
struct RewriteProposal {
  std::string target;
  std::vector<ProposalEdit> edits;
  std::string basis_hash;
  std::string id;  // content hash of (target, edits, basis)

  Json to_json() const;
  static RewriteProposal from_json(const Json& j);
  void assign_id();
};

/// Replayable improvement proof surrogate: paired per-model evaluations of
/// the basis and successor snapshots.
struct Certificate {
  std::string basis_hash;
  std::string successor_hash;
  std::string environment_hash;  // models + their held requirements
  std::string proposal_id;
  std::size_t horizon = 0;
  std::vector<double> before;  // per-model utilities, basis
  std::vector<double> after;   // per-model utilities, successor
  bool conclusion = false;     // strict improvement on every model
  std::string comparison = "all-models";
  std::string checker_version = kCheckerVersion;

  Json to_json() const;
  static Certificate from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

struct MetaUtility {
  std::string mode = "indicator";  // or "shaped"
  double originality_weight = 0.0;

  Json to_json() const;
  static MetaUtility from_json(const Json& j);
};

/// Proposal-generator configuration: which edit kinds are enabled, size
/// limits, template libraries, and the comparison rule.
struct MetaRules {
  std::vector<std::string> edit_kinds{"add-rule", "remove-rule", "add-sequence",
                                      "remove-sequence", "set-utility-param", "set-meta-param"};
  std::size_t max_edits = 1;
  std::size_t proposal_budget = 64;
  std::string comparison = "all-models";  // or "weighted-mean"
  Json rule_templates = Json::array();     // rule JSON objects
  Json sequence_templates = Json::array();
  Json param_grid = Json::object();  // param -> candidate values
  MetaUtility meta_utility;

  Json to_json() const;
  static MetaRules from_json(const Json& j);
};

/// Default transformational configuration for a domain (includes the
/// shipped pruning-rule template for the circuit domain).
MetaRules default_meta_rules(const std::string& domain);

/// Deterministic, structurally validated proposal stream; at most `budget`
/// entries.
std::vector<RewriteProposal> propose(const MachineState& basis, const MetaRules& meta,
                                     std::size_t budget);

struct ApplyResult {
  MachineState successor;
  std::vector<std::string> pruned_concept_hashes;
};

/// Applies edits to a copy of the basis; concepts violating the new rules
/// are removed. Throws snapshot_mismatch / forbidden_edit / bad_input.
ApplyResult apply_proposal(const MachineState& basis, const RewriteProposal& p);

/// Clean-start evaluation of a state's (rules, policy, parameters) under a
/// single model; the utility certified and compared by the target-theorem
/// gate.
double evaluate_state(const MachineState& state, const EnvironmentModel& mu,
                      const Domain& domain);

/// Content-addressed snapshot directory.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path dir);
  std::string put(const MachineState& state);
  MachineState get(const std::string& hash) const;  // throws unresolvable_hash
  bool has(const std::string& hash) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Paired evaluation of basis and successor under every model with
/// identical seeds; emits a certificate (conclusion true iff strictly
/// better on every model, or on the weighted mean when configured).
/// Snapshots of both states are persisted to the store.
Certificate certify(const RewriteProposal& p, const MachineState& basis, const ModelSet& models,
                    const MetaRules& meta, SnapshotStore& store);

double meta_utility_value(const MetaUtility& u, const Certificate& cert);

/// Independent re-derivation from the store: re-runs both evaluations and
/// requires bit-exact agreement with every recorded number.
bool check_certificate(const Certificate& cert, const ModelSet& models,
                       const SnapshotStore& store);

struct SwitchResult {
  MachineState state;
  std::vector<std::string> pruned_concept_hashes;
};

/// Executes a certified rewrite. Throws stale_basis when the state moved
/// since certification, certificate_invalid when re-checking fails.
SwitchResult switch_state(const MachineState& ms, const RewriteProposal& p,
                          const Certificate& cert, const ModelSet& models,
                          const SnapshotStore& store);

/// Meta-level self-modification: same certificate machinery, restricted to
/// utility-params / meta-params targets; edits reaching the environment
/// are forbidden.
SwitchResult self_modify(const MachineState& ms, const RewriteProposal& p,
                         const Certificate& cert, const ModelSet& models,
                         const SnapshotStore& store);

/// Structural edit distance between canonical concepts (node-kind multiset
/// plus edge-set symmetric difference); drives the shaped meta-utility's
/// originality term.
double concept_edit_distance(const Concept& a, const Concept& b);

}  // namespace dgm
