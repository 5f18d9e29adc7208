#pragma once

#include "dgm/design_language.hpp"
#include "dgm/system_model.hpp"
#include "dgm/verification.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dgm {

struct DesignSequence;

/// A design domain: binds concepts to behavioral semantics, carries the
/// default rule set and policy, and prices concepts.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual const std::string& name() const = 0;
  virtual const Alphabet& alphabet() const = 0;
  virtual RuleSet default_rules() const = 0;

  /// Strict compilation to a Mealy machine. Throws unknown_kind /
  /// dangling_port / compile_error.
  virtual MealySystem compile(const Concept& c, std::size_t horizon) const = 0;

  /// Cost term charged by environments (per gate / per stage).
  virtual double cost(const Concept& c) const = 0;

  /// Heuristic frontier-ranking score used by the utility handle; guided
  /// by the machine-internal requirement set.
  virtual double score_hint(const Concept& c, const RequirementSet& internal) const = 0;

  /// Frontier dedup signature; concepts with equal signatures are
  /// interchangeable for further search.
  virtual std::string frontier_signature(const Concept& c) const = 0;

  virtual std::vector<DesignSequence> default_policy(std::size_t max_signals) const = 0;
  virtual RequirementSet default_requirements(const std::string& location) const = 0;

  /// Library templates addressable by compose-product / refine / abstract
  /// actions: name -> {"concept":..., "port_map":{outer:"id.port"}}.
  virtual Json library_template(const std::string& name) const = 0;
};

std::shared_ptr<const Domain> make_domain(const std::string& name);

/// One deterministic reward simulator mu with its environment-held
/// requirement set and declared reward range.
struct EnvironmentModel {
  std::string id;
  std::string domain;
  double weight = 1.0;
  std::size_t horizon = 12;
  double reward_min = -100.0, reward_max = 100.0;
  RequirementSet phi_env;  // environment-held

  Json to_json() const;
  static EnvironmentModel from_json(const Json& j);
};

/// Finite weighted set of deterministic models standing in for the
/// distribution set; weights sum to 1.
struct ModelSet {
  std::vector<EnvironmentModel> models;

  void validate() const;
  Json to_json() const;
  static ModelSet from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

/// Deterministic reward stream r(0..T): zero everywhere except the
/// submission step, which carries the verification reward. The empty
/// concept yields the all-zero stream; in-domain concepts that fail to
/// compile earn zero (no partial credit). Throws unknown_kind for concepts
/// outside the model's domain, environment_contract when the reward
/// formula escapes the declared range.
std::vector<double> env_evaluate(const EnvironmentModel& mu, const Concept& c,
                                 std::size_t submit_step);

/// Reward actually granted at the submission step (the stream's terminal
/// entry).
double env_reward(const EnvironmentModel& mu, const Concept& c);

/// Behavioral semantics of a concept in a domain.
MealySystem compile_concept(const Concept& c, const Domain& domain, std::size_t horizon);

/// Default single-model set for a named domain.
ModelSet default_model_set(const std::string& domain);

}  // namespace dgm
