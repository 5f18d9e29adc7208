#include <dgm/error.hpp>
#include <dgm/run.hpp>
#include <dgm/transform.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

int exit_code_for(const dgm::Error& e) {
  switch (e.code()) {
    case dgm::Errc::certificate_invalid:
    case dgm::Errc::stale_basis:
    case dgm::Errc::snapshot_mismatch:
      return 2;
    case dgm::Errc::missing_artifact:
    case dgm::Errc::unresolvable_hash:
      return 3;
    case dgm::Errc::budget_exceeded:
      return 4;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"design search engine with certified self-rewrites"};
  app.require_subcommand(1);

  dgm::RunConfig config;
  std::string config_path, out_dir = "out";

  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON");
    cmd->add_option("--domain", config.domain, "design domain (circuit | pipeline)");
    cmd->add_option("--seed", config.seed, "run seed");
    cmd->add_option("--horizon", config.horizon, "episode horizon");
    cmd->add_option("--switch-limit", config.switch_limit, "max certified rewrites");
    cmd->add_option("--proposal-budget", config.proposal_budget, "proposals per round");
    cmd->add_option("--rules", config.rules_path, "rule-set JSON override");
    cmd->add_option("--policy", config.policy_path, "policy JSON override");
    cmd->add_option("--models", config.models_path, "model-set JSON override");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* run = app.add_subcommand("run", "run the explore / propose / switch loop");
  add_run_flags(run);

  auto* replay = app.add_subcommand("replay", "re-execute a run and compare bit-exactly");
  std::string replay_dir;
  replay->add_option("dir", replay_dir, "run output directory")->required();

  auto* check = app.add_subcommand("check", "re-verify a certificate against its snapshots");
  std::string cert_path, snap_dir, models_path;
  check->add_option("--certificate", cert_path)->required();
  check->add_option("--snapshots", snap_dir)->required();
  check->add_option("--models", models_path)->required();

  auto* oracle = app.add_subcommand("oracle", "brute-force reference computations");
  std::string oracle_kind, params_path;
  oracle->add_option("kind", oracle_kind, "enumerate | truthtable | equiv | reward")->required();
  oracle->add_option("--params", params_path, "parameter JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!config_path.empty()) {
        dgm::RunConfig loaded = dgm::RunConfig::from_json(dgm::load_json_file(config_path));
        loaded.out_dir = out_dir;
        config = loaded;
      } else {
        config.out_dir = out_dir;
      }
      dgm::RunReport report = dgm::cmd_run(config);
      std::cout << dgm::canonical_dump(report.to_json(false));
      return 0;
    }
    if (replay->parsed()) {
      bool same = dgm::cmd_replay(replay_dir);
      std::cout << (same ? "replay: bit-exact\n" : "replay: DIVERGED\n");
      return same ? 0 : 2;
    }
    if (check->parsed()) {
      dgm::Certificate cert = dgm::Certificate::from_json(dgm::load_json_file(cert_path));
      dgm::ModelSet models = dgm::ModelSet::from_json(dgm::load_json_file(models_path));
      dgm::SnapshotStore store{snap_dir};
      bool ok = dgm::check_certificate(cert, models, store);
      std::cout << (ok ? "certificate: valid\n" : "certificate: INVALID\n");
      return ok ? 0 : 2;
    }
    if (oracle->parsed()) {
      dgm::Json params = dgm::load_json_file(params_path);
      std::cout << dgm::canonical_dump(dgm::cmd_oracle(oracle_kind, params));
      return 0;
    }
  } catch (const dgm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
