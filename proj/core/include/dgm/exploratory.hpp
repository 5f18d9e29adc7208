#pragma once

#include "dgm/design_language.hpp"
#include "dgm/environment.hpp"
#include "dgm/verification.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dgm {

/// One guarded design step. Kinds: instantiate, connect, compose-product,
/// compose-feedback, refine, abstract, set-property, verify, submit.
struct DesignAction {
  std::string kind;
  Json params = Json::object();
  std::optional<Json> guard;

  Json to_json() const;
  static DesignAction from_json(const Json& j);
};

struct DesignSequence {
  std::string id;
  std::vector<DesignAction> actions;

  Json to_json() const;
  static DesignSequence from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

/// Tunables of the utility handle used inside the interpreter: frontier
/// retention width, signal budget for policies, and the expansion cost
/// charged against episode utility.
struct UtilityParams {
  double expansion_cost = 1e-5;
  std::size_t beam_k = 64;
  std::size_t max_signals = 8;
  std::size_t expansion_ceiling = 100'000;

  Json to_json() const;
  static UtilityParams from_json(const Json& j);
};

/// The variable state of the machine: current concept set, rules, policy,
/// utility/meta parameters, internal requirements, and bookkeeping.
struct MachineState {
  std::vector<Concept> concepts;  // canonical, sorted by serialization
  RuleSet rules;
  std::vector<DesignSequence> policy;
  UtilityParams uparams;
  Json meta = Json::object();  // transformational configuration
  RequirementSet internal_reqs;
  std::size_t step_count = 0;
  double accumulated_reward = 0.0;
  std::uint64_t seed = 0;

  const DesignSequence* find_sequence(const std::string& id) const;
  void canonicalize_concepts();
  Json to_json() const;
  static MachineState from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

/// Initial state for a domain: empty-concept frontier, the domain's
/// default rules/policy/requirements.
MachineState initial_state(const Domain& domain, std::uint64_t seed,
                           const UtilityParams& uparams = {});

struct ActionContext {
  const RuleSet* rules = nullptr;
  const Domain* domain = nullptr;
  const RequirementSet* internal_reqs = nullptr;
  std::size_t fresh_counter = 0;   // for generated node ids
  std::string last_instantiated;  // id of the node added by the last instantiate
};

/// Applies one action; empty optional means no-change (guard false,
/// selector unresolvable, or result impermissible). Never returns an
/// invalid concept.
std::optional<Concept> apply_action(const Concept& c, const DesignAction& a, ActionContext& ctx);

struct SequenceResult {
  Concept design;  // canonical
  bool submitted = false;
};

/// Applies a whole sequence; no-change if any action fails.
std::optional<SequenceResult> apply_sequence(const Concept& c, const DesignSequence& seq,
                                             const RuleSet& rules, const Domain& domain,
                                             const RequirementSet& internal_reqs);

struct InterpreterOutcome {
  std::vector<Concept> frontier;        // retained set, deterministic order
  std::size_t expansions = 0;           // successful permissible applications
  std::vector<std::pair<std::string, Concept>> submissions;  // (sequence id, concept)
};

/// One interpreter application: every sequence against every concept,
/// originals retained, canonical dedup, top-k retention by the utility
/// handle's ranking with signature dedup. Throws budget_exceeded when the
/// running expansion count passes the ceiling.
InterpreterOutcome apply_interpreter(const std::vector<Concept>& c_in, const RuleSet& rules,
                                     const std::vector<DesignSequence>& policy,
                                     const UtilityParams& uparams, const Domain& domain,
                                     const RequirementSet& internal_reqs,
                                     std::size_t expansions_so_far = 0);

struct EpisodeStep {
  std::size_t t = 0;
  std::string sequence_id;   // submitting sequence, if any
  std::string concept_hash;  // submitted concept, if any
  double reward = 0.0;       // weighted reward granted this step
  double cumulative = 0.0;
  std::size_t expansions = 0;  // running total
};

struct EpisodeResult {
  std::vector<EpisodeStep> steps;
  std::vector<double> per_model_rewards;    // sum of r_i(t)
  std::vector<double> per_model_utilities;  // reward - expansion cost
  double utility = 0.0;                     // weighted over models
  std::size_t expansions = 0;
  std::optional<Concept> submitted;
  std::size_t submit_step = 0;
  std::vector<Concept> final_frontier;
};

/// Runs one episode of interpreter rounds from the state's frontier,
/// granting the terminal reward at the first submission. Exactly
/// reproducible from (state hash, seed, model set).
EpisodeResult run_episode(const MachineState& ms, const ModelSet& models, const Domain& domain,
                          std::size_t horizon);

}  // namespace dgm
