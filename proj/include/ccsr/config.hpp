#pragma once

#include <string>

#include "ccsr/data.hpp"
#include "ccsr/train.hpp"

namespace ccsr {

// Everything a command needs, loadable from one JSON file. The only
// environment override honored anywhere is CCSR_OUT_DIR for out_dir.
struct ExperimentConfig {
  // schedule + plan
  int T = 45;
  double beta_start = -1.0;  // negative selects the 1000/T-scaled default
  double beta_end = -1.0;
  double t_max_frac = 2.0 / 3.0;
  double t_min_frac = 1.0 / 3.0;
  int total_evals = 15;

  // dataset
  std::string dataset_kind = "textures2d";
  int train_n = 128;
  int test_n = 50;
  int size = 64;
  DegradationParams degradation{0.3, 0.7, 4, 0.005, 0.015, 0};

  // model dims
  bool pixel_space = false;  // identity autoencoder, diffusion on raw signals
  int latent_dim = 32;
  int hidden = 128;
  int time_dim = 16;
  int ae_hidden = 128;
  int disc_hidden = 64;
  int disc_patch = 8;
  int disc_patches = 8;

  // training; the stage-1 values are sized for the default benchmark (128
  // textures, batch 16: 150k steps with anchors active for the last fifth)
  AePretrainConfig ae_pretrain{.steps = 8000, .batch = 8};
  Stage1Config stage1{.epochs = 18750,
                      .batch = 16,
                      .p_T = 0.2,
                      .clip_norm = 0.05,
                      .cosine_lr = true,
                      .warmup_epochs = 15000};
  Stage2Config stage2{.steps = 60, .adv_weight = 3.0};

  // stability harness
  int n_runs = 10;
  int threads = 0;  // 0 = hardware concurrency

  // ablation switches
  bool nutl = true;
  bool decoder_finetune = true;
  bool baseline_uniform = false;

  std::uint64_t seed = 1234;
  std::string out_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

ExperimentConfig load_config(const std::string& path);          // applies CCSR_OUT_DIR
void save_config(const std::string& path, const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

}  // namespace ccsr
