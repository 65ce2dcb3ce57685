#pragma once

#include "ccsr/config.hpp"
#include "ccsr/data.hpp"
#include "ccsr/diffusion.hpp"
#include "ccsr/metrics.hpp"

namespace ccsr {

NoiseSchedule schedule_from_config(const ExperimentConfig& cfg);
TimestepPlan plan_from_config(const ExperimentConfig& cfg, const NoiseSchedule& schedule);

struct Corpus {
  std::vector<SignalPair> train;
  std::vector<SignalPair> test;
};

// Regenerated deterministically from the config; commands never read training
// data back from disk, so quantized on-disk copies are inspection artifacts
// only.
Corpus corpus_from_config(const ExperimentConfig& cfg);

// Everything needed to restore one image end to end.
struct PipelineBundle {
  NoiseSchedule schedule;
  TimestepPlan plan;
  int total_evals = 0;
  bool baseline_uniform = false;  // uniform full chain instead of the plan
  int scale = 1;
  DenoiserNet net;
  AutoEncoder ae;
};

// upsample -> encode -> reverse diffusion -> decode -> clamp to [0,1].
Image restore(const PipelineBundle& bundle, const Image& lr, Rng& rng);

struct StabilitySummary {
  int n_images = 0;
  int n_runs = 0;
  bool has_ssim = false;
  std::vector<RunStack> stacks;
  MetricMatrix psnr_m, ssim_m, band_m;
  double psnr_mean = 0.0, ssim_mean = 0.0, band_mean = 0.0;
  double psnr_gstd = 0.0, ssim_gstd = 0.0, band_gstd = 0.0;  // NaN when n_runs < 2
  double lstd = 0.0;                                         // NaN when n_runs < 2
  std::vector<int> best_run, worst_run;                      // per-image PSNR extremes
};

// Run seed for image j, run i is Rng::mix(root_seed, j * n_runs + i), so any
// (image, run) cell is reproducible in isolation.
StabilitySummary run_stability(const PipelineBundle& bundle,
                               const std::vector<SignalPair>& test, int n_runs,
                               std::uint64_t root_seed, int threads = 0);

struct TrainedStage1 {
  PipelineBundle bundle;
  Stage1Curves curves;
  double ae_recon_mse = 0.0;
};

// Pretrains (or fixes, in pixel space) the autoencoder, builds latent pairs,
// trains the denoiser in the mode implied by the ablation switches.
TrainedStage1 run_stage1_training(const ExperimentConfig& cfg, const Corpus& corpus);

// Builds the discriminator matching the signal geometry and finetunes the
// decoder in place. Returns the loss curve.
std::vector<Stage2Row> run_stage2_training(const ExperimentConfig& cfg, PipelineBundle& bundle,
                                           const Corpus& corpus, Discriminator* disc_out = nullptr);

void write_stability_reports(const StabilitySummary& summary,
                             const std::vector<SignalPair>& test, const PipelineBundle& bundle,
                             const std::string& dir);

// CLI command bodies; return process exit codes.
int cmd_generate_data(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg, int stage);
int cmd_stability_report(const ExperimentConfig& cfg);

struct AblationArm {
  std::string name;
  bool nutl = true;
  bool decoder_finetune = true;
  bool baseline_uniform = false;
  double t_max_frac = 2.0 / 3.0;
  double t_min_frac = 1.0 / 3.0;
  int total_evals = 15;
};

std::vector<AblationArm> default_ablation_arms(const ExperimentConfig& cfg);
int cmd_ablate(const ExperimentConfig& cfg, const std::vector<AblationArm>& arms);

}  // namespace ccsr
