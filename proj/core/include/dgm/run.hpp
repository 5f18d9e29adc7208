#pragma once

#include "dgm/transform.hpp"

#include <filesystem>
#include <string>

namespace dgm {

/// Batch run configuration. Paths are optional; absent ones fall back to
/// the domain's defaults.
struct RunConfig {
  std::string domain = "circuit";
  std::string rules_path;
  std::string policy_path;
  std::string models_path;
  std::uint64_t seed = 1;
  std::size_t horizon = 14;
  std::size_t proposal_budget = 64;
  std::size_t switch_limit = 0;
  std::filesystem::path out_dir = "out";
  UtilityParams uparams;

  Json to_json() const;
  static RunConfig from_json(const Json& j);
};

struct SwitchEvent {
  std::string proposal_id;
  std::string certificate_hash;
  std::string basis_hash;
  std::string successor_hash;
  double min_before = 0.0;
  double min_after = 0.0;

  Json to_json() const;
};

struct EpisodeSummary {
  std::size_t index = 0;
  double utility = 0.0;
  std::vector<double> per_model_utilities;
  std::size_t expansions = 0;
  std::string submitted_hash;  // empty when nothing was submitted
  std::size_t submit_step = 0;

  Json to_json() const;
};

struct RunReport {
  std::vector<EpisodeSummary> episodes;
  std::vector<SwitchEvent> switches;
  std::size_t total_expansions = 0;
  double wall_clock_seconds = 0.0;  // excluded from byte-stable comparison

  Json to_json(bool include_wall_clock = true) const;
};

/// Runs the explore / propose-certify-switch loop, writing config copy,
/// trace, snapshots, certificates, and report under config.out_dir.
RunReport cmd_run(const RunConfig& config);

/// Recomputes a finished run from its persisted config and compares the
/// regenerated trace and report bit-exactly. Throws missing_artifact.
bool cmd_replay(const std::filesystem::path& out_dir);

/// Brute-force oracle front door: kind is one of enumerate, truthtable,
/// equiv, reward. Deterministic; results as JSON.
Json cmd_oracle(const std::string& kind, const Json& params);

/// Builds the model set / domain named by the config.
ModelSet config_models(const RunConfig& config);

}  // namespace dgm
