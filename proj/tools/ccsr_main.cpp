#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccsr/config.hpp"
#include "ccsr/pipeline.hpp"

namespace {

std::vector<ccsr::AblationArm> parse_plan_arms(const ccsr::ExperimentConfig& cfg,
                                               const std::vector<std::string>& plans) {
  std::vector<ccsr::AblationArm> arms;
  for (const std::string& p : plans) {
    double t_max_frac = 0.0, t_min_frac = 0.0;
    int evals = 0;
    if (std::sscanf(p.c_str(), "%lf:%lf:%d", &t_max_frac, &t_min_frac, &evals) != 3)
      throw ccsr::ConfigError("bad --plan value '" + p + "', expected t_max_frac:t_min_frac:evals");
    ccsr::AblationArm arm;
    arm.name = "plan_" + p;
    for (char& c : arm.name)
      if (c == ':') c = '_';
    arm.nutl = cfg.nutl;
    arm.decoder_finetune = cfg.decoder_finetune;
    arm.baseline_uniform = false;
    arm.t_max_frac = t_max_frac;
    arm.t_min_frac = t_min_frac;
    arm.total_evals = evals;
    arms.push_back(arm);
  }
  return arms;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage diffusion super-resolution workbench"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("-c,--config", config_path, "experiment config (json)")->required();

  CLI::App* gen = app.add_subcommand("generate-data", "materialize the synthetic corpus");
  int stage = 1;
  CLI::App* train = app.add_subcommand("train", "train stage 1 (denoiser) or stage 2 (decoder)");
  train->add_option("-s,--stage", stage, "training stage, 1 or 2")->check(CLI::Range(1, 2));
  CLI::App* report =
      app.add_subcommand("stability-report", "repeated restorations + stability metrics");
  std::vector<std::string> plans;
  CLI::App* ablate = app.add_subcommand("ablate", "train and evaluate ablation arms");
  ablate->add_option("--plan", plans,
                     "extra plan arm as t_max_frac:t_min_frac:evals (repeatable; replaces the "
                     "default arm set)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ccsr::ExperimentConfig cfg = ccsr::load_config(config_path);
    if (gen->parsed()) return ccsr::cmd_generate_data(cfg);
    if (train->parsed()) return ccsr::cmd_train(cfg, stage);
    if (report->parsed()) return ccsr::cmd_stability_report(cfg);
    if (ablate->parsed()) {
      auto arms =
          plans.empty() ? ccsr::default_ablation_arms(cfg) : parse_plan_arms(cfg, plans);
      return ccsr::cmd_ablate(cfg, arms);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const ccsr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ccsr::UnknownKindError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ccsr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
