#pragma once

#include "dgm/design_language.hpp"
#include "dgm/serial.hpp"

#include <string>
#include <vector>

namespace dgm {

class Domain;
struct ModelSet;

/// One requirement: a scenario evaluable by exhaustive simulation, a
/// non-negative weight, and a mutable agreement score. Scenario kinds:
///   {"type":"table_row","in":{inIdx:bit,...},"out_idx":idx,"expect":bit}
///   {"type":"io_stream","inputs":[...],"outputs":[...]}
///   {"type":"cost_bound","max_cost":x}
///   {"type":"pipeline_ok","budget":x}
struct Requirement {
  std::string id;
  double weight = 1.0;
  Json scenario;
  int score = 0;

  Json to_json() const;
  static Requirement from_json(const Json& j);
};

struct RequirementSet {
  std::vector<Requirement> requirements;
  std::string location = "machine-internal";  // or "environment-held"

  const Requirement* find(const std::string& id) const;
  double total_weight() const;
  void validate() const;
  Json to_json() const;
  static RequirementSet from_json(const Json& j);
  std::string hash() const { return content_hash(to_json()); }
};

/// Whether the concept's behavioral interpretation satisfies the
/// requirement, decided by exhaustive simulation in the given domain.
/// Throws compile errors when the concept has no behavioral reading.
bool requirement_satisfied(const Requirement& req, const Concept& c, const Domain& domain);

/// External reading: sum of satisfied requirement weights minus the
/// domain's cost term. The empty concept scores 0.
double verify_external(const Concept& c, const RequirementSet& phi_env, const Domain& domain);

/// Expected reward conditional on submitting c while asserting phi,
/// exact weighted sum over the model set.
double utility_cpe(const Concept& c, const Requirement& phi, double requirement_share,
                   const ModelSet& models);

/// Internal reading: utility_cpe summed over the set with mean-normalized
/// weights. Empty sets score 0.
double verify_internal(const Concept& c, const RequirementSet& phi_int, const ModelSet& models);

/// Same sum without weight normalization (scales linearly with weights).
double verify_internal_raw(const Concept& c, const RequirementSet& phi_int,
                           const ModelSet& models);

/// Episode-boundary revision: each requirement's score moves +-1 by
/// agreement between its local prediction and the observed reward
/// direction; requirements at score <= -3 are dropped. Environment-held
/// sets are never revised.
RequirementSet revise_requirements(const RequirementSet& phi_int, double observed_reward,
                                   const Concept& submitted, const Domain& domain);

}  // namespace dgm
