#pragma once

#include "ccsr/diffusion.hpp"
#include "ccsr/latent.hpp"

namespace ccsr {

struct LossBreakdown {
  double l_diff = 0.0;
  double l_T = 0.0;
  double l_t_max = 0.0;
  double total = 0.0;
  int t_drawn = 0;
};

// One latent-space training pair: clean target and its degraded condition.
struct TrainSample {
  Vec x0;
  Vec cond;
};

double default_p_T(const TimestepPlan& plan);

// Returns T with probability p_T, otherwise uniform in [t_min, t_max].
// Negative p_T selects the default 1/(t_max - t_min + 2).
int sample_training_timestep(const TimestepPlan& plan, Rng& rng, double p_T = -1.0);

// Plain noise-prediction loss at timestep t: mean squared error between the
// drawn eps and the network prediction. Accumulates parameter gradients into
// tape when given.
LossBreakdown loss_standard(const DenoiserNet& net, const Vec& x0, const Vec& cond, int t,
                            const NoiseSchedule& schedule, Rng& rng,
                            GradientTape* tape = nullptr);

// The t = T objective: l_diff at T, the clean-estimate anchor l_T, and
// l_t_max through a re-noised second evaluation at t_max. Gradients flow
// through both evaluations unless stop_gradient_second_eval detaches the
// second input from the first prediction.
LossBreakdown loss_at_T(const DenoiserNet& net, const Vec& x0, const Vec& cond,
                        const TimestepPlan& plan, const NoiseSchedule& schedule, Rng& rng,
                        GradientTape* tape = nullptr, bool stop_gradient_second_eval = false);

enum class Stage1Mode {
  kNutl,         // loss_at_T when t = T, loss_standard otherwise
  kNoNutl,       // loss_standard always (ablation V1), same timestep draws
  kFullUniform,  // t uniform in [1, T], loss_standard (baseline trainer)
};

struct Stage1Config {
  int epochs = 50;
  int batch = 8;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  double p_T = -1.0;
  bool stop_gradient_second_eval = false;
  Stage1Mode mode = Stage1Mode::kNutl;
  // The clean-estimate anchors divide by sqrt(alpha_bar), so gradients from
  // anchored batches dwarf the plain ones by orders of magnitude; batches that
  // evaluated the anchors are clipped to this global L2 norm so they cannot
  // wreck the optimizer state. Plain batches never spike and are left alone.
  // 0 disables.
  double clip_norm = 0.0;
  // Cosine decay from adam.lr to adam.lr/100 over the run. Off keeps a
  // constant rate.
  bool cosine_lr = false;
  // Epochs trained with the plain noise-prediction loss before the mode's
  // terminal losses activate. The anchors assume a network whose noise
  // estimate is already roughly right, so a cold start needs this.
  int warmup_epochs = 0;
  std::uint64_t seed = 1;

  bool operator==(const Stage1Config&) const = default;
};

struct Stage1Curves {
  std::vector<LossBreakdown> per_step;   // batch means
  std::vector<LossBreakdown> per_epoch;  // step means within each epoch
};

// Noise draws inside each loss evaluation come from a generator derived as
// mix(mix(seed, step), element), so runs with different modes but equal seeds
// see identical noise at corresponding steps.
Stage1Curves train_stage1(DenoiserNet& net, const std::vector<TrainSample>& dataset,
                          const TimestepPlan& plan, const NoiseSchedule& schedule,
                          const Stage1Config& config);

struct AePretrainConfig {
  int steps = 1500;
  int batch = 4;
  AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
  double kl_weight = 1e-6;
  std::uint64_t seed = 7;

  bool operator==(const AePretrainConfig&) const = default;
};

// L1 + KL pretraining; returns the final deterministic reconstruction MSE of
// decode(encode_mean(x)) over the dataset.
double pretrain_autoencoder(AutoEncoder& ae, const std::vector<Vec>& signals,
                            const AePretrainConfig& config);

double autoencoder_recon_mse(const AutoEncoder& ae, const std::vector<Vec>& signals);

struct Stage2Sample {
  Vec cond_latent;  // frozen-encoder latent of the upsampled LR input
  Vec hr_signal;    // ground truth in signal space
};

struct Stage2Config {
  int steps = 200;
  int batch = 4;
  AdamConfig dec_adam{1e-4, 0.9, 0.999, 1e-8};
  AdamConfig disc_adam{1e-4, 0.9, 0.999, 1e-8};
  double l1_weight = 1.0;
  double adv_weight = 0.05;
  std::uint64_t seed = 2;

  bool operator==(const Stage2Config&) const = default;
};

struct Stage2Row {
  double l1 = 0.0;
  double gen = 0.0;
  double disc = 0.0;
};

// Decoder-only adversarial finetune on truncated-sampler outputs. The
// denoiser and encoder are frozen: their checksums are recorded on entry and
// re-verified on exit.
std::vector<Stage2Row> train_stage2(AutoEncoder& ae, Discriminator& disc,
                                    const DenoiserNet& frozen_net, const TimestepPlan& plan,
                                    const NoiseSchedule& schedule,
                                    const std::vector<Stage2Sample>& dataset,
                                    const Stage2Config& config);

}  // namespace ccsr
