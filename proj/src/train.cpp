#include "ccsr/train.hpp"

#include <cmath>

namespace ccsr {

namespace {

constexpr std::uint64_t kControlStream = 0xC0;
constexpr std::uint64_t kStepStride = 1000003;

double mse(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double tape_norm(const GradientTape& tape) {
  double s = 0.0;
  for (const auto& w : tape.d_weights)
    for (double g : w) s += g * g;
  for (const auto& b : tape.d_bias)
    for (double g : b) s += g * g;
  return std::sqrt(s);
}

}  // namespace

double default_p_T(const TimestepPlan& plan) {
  return 1.0 / static_cast<double>(plan.t_max - plan.t_min + 2);
}

int sample_training_timestep(const TimestepPlan& plan, Rng& rng, double p_T) {
  if (p_T < 0.0) p_T = default_p_T(plan);
  if (p_T >= 1.0) return plan.t_start;
  if (rng.uniform() < p_T) return plan.t_start;
  return static_cast<int>(rng.uniform_int(plan.t_min, plan.t_max));
}

LossBreakdown loss_standard(const DenoiserNet& net, const Vec& x0, const Vec& cond, int t,
                            const NoiseSchedule& schedule, Rng& rng, GradientTape* tape) {
  const size_t d = x0.size();
  const Vec eps = rng.normal_vec(d);
  const LatentState x_t = q_sample(make_state(x0, 0), t, eps, schedule);

  MlpCache cache;
  const Vec eps_hat = denoiser_forward(net, x_t.values, t, cond, tape ? &cache : nullptr);

  LossBreakdown lb;
  lb.t_drawn = t;
  lb.l_diff = mse(eps_hat, eps);
  lb.total = lb.l_diff;
  if (!std::isfinite(lb.total)) throw NonFiniteError("loss_standard: non-finite loss");

  if (tape) {
    Vec d_out(d);
    for (size_t i = 0; i < d; ++i) d_out[i] = 2.0 * (eps_hat[i] - eps[i]) / d;
    denoiser_backward(net, cache, d_out, *tape);
  }
  return lb;
}

LossBreakdown loss_at_T(const DenoiserNet& net, const Vec& x0, const Vec& cond,
                        const TimestepPlan& plan, const NoiseSchedule& schedule, Rng& rng,
                        GradientTape* tape, bool stop_gradient_second_eval) {
  const int T = schedule.T;
  if (plan.t_start != T) throw TimestepRangeError("loss_at_T: plan/schedule mismatch");
  const int t_max = plan.t_max;
  const size_t d = x0.size();

  const double a_T = std::sqrt(schedule.alpha_bar(T));
  const double b_T = std::sqrt(1.0 - schedule.alpha_bar(T));
  const double a_m = std::sqrt(schedule.alpha_bar(t_max));
  const double b_m = std::sqrt(1.0 - schedule.alpha_bar(t_max));

  const Vec eps1 = rng.normal_vec(d);
  Vec x_T(d);
  for (size_t i = 0; i < d; ++i) x_T[i] = a_T * x0[i] + b_T * eps1[i];

  MlpCache cache1;
  const Vec eps_hat_T = denoiser_forward(net, x_T, T, cond, tape ? &cache1 : nullptr);

  Vec u(d);  // clean estimate from the jump step
  for (size_t i = 0; i < d; ++i) u[i] = (x_T[i] - b_T * eps_hat_T[i]) / a_T;

  const Vec eps2 = rng.normal_vec(d);
  Vec w(d);  // re-noised estimate at t_max
  for (size_t i = 0; i < d; ++i) w[i] = a_m * u[i] + b_m * eps2[i];

  MlpCache cache2;
  const Vec eps_hat_m = denoiser_forward(net, w, t_max, cond, tape ? &cache2 : nullptr);

  Vec v(d);  // clean estimate re-derived at t_max
  for (size_t i = 0; i < d; ++i) v[i] = (w[i] - b_m * eps_hat_m[i]) / a_m;

  LossBreakdown lb;
  lb.t_drawn = T;
  lb.l_diff = mse(eps_hat_T, eps1);
  lb.l_T = mse(u, x0);
  lb.l_t_max = mse(v, x0);
  lb.total = lb.l_diff + lb.l_T + lb.l_t_max;
  if (!std::isfinite(lb.total)) throw NonFiniteError("loss_at_T: non-finite loss");

  if (tape) {
    Vec d_v(d), d_ehm(d);
    for (size_t i = 0; i < d; ++i) {
      d_v[i] = 2.0 * (v[i] - x0[i]) / d;
      d_ehm[i] = -(b_m / a_m) * d_v[i];
    }
    const Vec d_w_net = denoiser_backward(net, cache2, d_ehm, *tape);

    Vec d_u(d);
    for (size_t i = 0; i < d; ++i) {
      const double d_w = d_v[i] / a_m + d_w_net[i];
      d_u[i] = 2.0 * (u[i] - x0[i]) / d;
      if (!stop_gradient_second_eval) d_u[i] += a_m * d_w;
    }

    Vec d_ehT(d);
    for (size_t i = 0; i < d; ++i)
      d_ehT[i] = 2.0 * (eps_hat_T[i] - eps1[i]) / d - (b_T / a_T) * d_u[i];
    denoiser_backward(net, cache1, d_ehT, *tape);
  }
  return lb;
}

Stage1Curves train_stage1(DenoiserNet& net, const std::vector<TrainSample>& dataset,
                          const TimestepPlan& plan, const NoiseSchedule& schedule,
                          const Stage1Config& config) {
  if (dataset.empty()) throw InvalidRangeError("train_stage1: empty dataset");
  if (config.epochs < 1 || config.batch < 1)
    throw InvalidRangeError("train_stage1: epochs and batch must be positive");
  for (const auto& s : dataset) {
    if (static_cast<int>(s.x0.size()) != net.x_dim ||
        static_cast<int>(s.cond.size()) != net.cond_dim)
      throw DimensionMismatchError("train_stage1: sample dims do not match net");
  }

  if (config.clip_norm < 0.0)
    throw InvalidRangeError("train_stage1: clip_norm must be non-negative");
  if (config.warmup_epochs < 0)
    throw InvalidRangeError("train_stage1: warmup_epochs must be non-negative");

  const int n = static_cast<int>(dataset.size());
  const int steps_per_epoch = (n + config.batch - 1) / config.batch;
  AdamState adam = make_adam(net.mlp, config.adam);
  Rng control(Rng::mix(config.seed, kControlStream));

  const long total_steps = static_cast<long>(config.epochs) * steps_per_epoch;
  const double pi = std::acos(-1.0);

  Stage1Curves curves;
  long step_index = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    LossBreakdown epoch_acc;
    for (int step = 0; step < steps_per_epoch; ++step, ++step_index) {
      int t;
      if (config.mode == Stage1Mode::kFullUniform) {
        t = static_cast<int>(control.uniform_int(1, schedule.T));
      } else {
        t = sample_training_timestep(plan, control, config.p_T);
      }

      GradientTape tape = make_tape(net.mlp);
      LossBreakdown batch_acc;
      bool anchored = false;
      for (int b = 0; b < config.batch; ++b) {
        const int idx = static_cast<int>(control.uniform_int(0, n - 1));
        Rng loss_rng(Rng::mix(Rng::mix(config.seed, kStepStride * step_index), b));
        LossBreakdown lb;
        try {
          if (config.mode == Stage1Mode::kNutl && t == plan.t_start &&
              epoch >= config.warmup_epochs) {
            anchored = true;
            lb = loss_at_T(net, dataset[idx].x0, dataset[idx].cond, plan, schedule, loss_rng,
                           &tape, config.stop_gradient_second_eval);
          } else {
            lb = loss_standard(net, dataset[idx].x0, dataset[idx].cond, t, schedule, loss_rng,
                               &tape);
          }
        } catch (const NonFiniteError& e) {
          throw DivergenceError("train_stage1: loss diverged at step " +
                                std::to_string(step_index) + " (" + e.what() + ")");
        }
        batch_acc.l_diff += lb.l_diff;
        batch_acc.l_T += lb.l_T;
        batch_acc.l_t_max += lb.l_t_max;
        batch_acc.total += lb.total;
      }
      const double inv = 1.0 / config.batch;
      batch_acc.l_diff *= inv;
      batch_acc.l_T *= inv;
      batch_acc.l_t_max *= inv;
      batch_acc.total *= inv;
      batch_acc.t_drawn = t;
      if (!std::isfinite(batch_acc.total))
        throw DivergenceError("train_stage1: loss diverged at step " +
                              std::to_string(step_index));

      tape.scale(inv);
      if (anchored && config.clip_norm > 0.0) {
        const double norm = tape_norm(tape);
        if (norm > config.clip_norm) tape.scale(config.clip_norm / norm);
      }
      if (config.cosine_lr) {
        const double u = static_cast<double>(step_index) / static_cast<double>(total_steps);
        adam.cfg.lr = config.adam.lr * (0.01 + 0.99 * 0.5 * (1.0 + std::cos(pi * u)));
      }
      adam_step(net.mlp, tape, adam);

      curves.per_step.push_back(batch_acc);
      epoch_acc.l_diff += batch_acc.l_diff;
      epoch_acc.l_T += batch_acc.l_T;
      epoch_acc.l_t_max += batch_acc.l_t_max;
      epoch_acc.total += batch_acc.total;
    }
    const double inv = 1.0 / steps_per_epoch;
    epoch_acc.l_diff *= inv;
    epoch_acc.l_T *= inv;
    epoch_acc.l_t_max *= inv;
    epoch_acc.total *= inv;
    epoch_acc.t_drawn = epoch;
    curves.per_epoch.push_back(epoch_acc);
  }
  return curves;
}

double autoencoder_recon_mse(const AutoEncoder& ae, const std::vector<Vec>& signals) {
  if (signals.empty()) throw InvalidRangeError("autoencoder_recon_mse: empty dataset");
  double acc = 0.0;
  for (const auto& x : signals) acc += mse(decode(ae, encode_mean(ae, x)), x);
  return acc / static_cast<double>(signals.size());
}

double pretrain_autoencoder(AutoEncoder& ae, const std::vector<Vec>& signals,
                            const AePretrainConfig& config) {
  if (ae.identity) throw ConfigError("pretrain_autoencoder: identity autoencoder is fixed");
  if (signals.empty()) throw InvalidRangeError("pretrain_autoencoder: empty dataset");
  for (const auto& x : signals)
    if (static_cast<int>(x.size()) != ae.signal_dim)
      throw DimensionMismatchError("pretrain_autoencoder: signal size mismatch");

  const int n = static_cast<int>(signals.size());
  const int L = ae.latent_dim;
  AdamState enc_adam = make_adam(ae.encoder, config.adam);
  AdamState dec_adam = make_adam(ae.decoder, config.adam);
  Rng control(Rng::mix(config.seed, kControlStream));

  for (int step = 0; step < config.steps; ++step) {
    GradientTape enc_tape = make_tape(ae.encoder);
    GradientTape dec_tape = make_tape(ae.decoder);
    double loss_acc = 0.0;
    for (int b = 0; b < config.batch; ++b) {
      const int idx = static_cast<int>(control.uniform_int(0, n - 1));
      const Vec& x = signals[idx];
      Rng loss_rng(Rng::mix(Rng::mix(config.seed, kStepStride * step), b));

      MlpCache enc_cache;
      const Vec enc_out = mlp_forward(ae.encoder, x, &enc_cache);
      const Vec mean(enc_out.begin(), enc_out.begin() + L);
      const Vec logvar(enc_out.begin() + L, enc_out.end());
      const Vec eps = loss_rng.normal_vec(L);
      Vec z(L);
      for (int i = 0; i < L; ++i) z[i] = mean[i] + std::exp(0.5 * logvar[i]) * eps[i];

      MlpCache dec_cache;
      const Vec x_rec = mlp_forward(ae.decoder, z, &dec_cache);
      VaeLossTerms terms;
      try {
        terms = vae_pretrain_loss(x, x_rec, mean, logvar, config.kl_weight);
      } catch (const NonFiniteError& e) {
        throw DivergenceError("pretrain_autoencoder: loss diverged at step " +
                              std::to_string(step) + " (" + e.what() + ")");
      }
      loss_acc += terms.total;

      Vec d_rec(x.size());
      for (size_t i = 0; i < x.size(); ++i) d_rec[i] = sign(x_rec[i] - x[i]) / x.size();
      const Vec d_z = mlp_backward(ae.decoder, dec_cache, d_rec, dec_tape);

      Vec d_enc_out(2 * L);
      for (int i = 0; i < L; ++i) {
        d_enc_out[i] = d_z[i] + config.kl_weight * mean[i];
        d_enc_out[L + i] = d_z[i] * 0.5 * std::exp(0.5 * logvar[i]) * eps[i] +
                           config.kl_weight * 0.5 * (std::exp(logvar[i]) - 1.0);
      }
      mlp_backward(ae.encoder, enc_cache, d_enc_out, enc_tape);
    }
    if (!std::isfinite(loss_acc))
      throw DivergenceError("pretrain_autoencoder: loss diverged at step " + std::to_string(step));
    enc_tape.scale(1.0 / config.batch);
    dec_tape.scale(1.0 / config.batch);
    adam_step(ae.encoder, enc_tape, enc_adam);
    adam_step(ae.decoder, dec_tape, dec_adam);
  }
  return autoencoder_recon_mse(ae, signals);
}

std::vector<Stage2Row> train_stage2(AutoEncoder& ae, Discriminator& disc,
                                    const DenoiserNet& frozen_net, const TimestepPlan& plan,
                                    const NoiseSchedule& schedule,
                                    const std::vector<Stage2Sample>& dataset,
                                    const Stage2Config& config) {
  if (ae.identity) throw ConfigError("train_stage2: identity autoencoder has no decoder");
  if (dataset.empty()) throw InvalidRangeError("train_stage2: empty dataset");
  for (const auto& s : dataset) {
    if (static_cast<int>(s.cond_latent.size()) != frozen_net.cond_dim ||
        static_cast<int>(s.hr_signal.size()) != ae.signal_dim)
      throw DimensionMismatchError("train_stage2: sample dims do not match pipeline");
  }

  const std::uint64_t frozen_denoiser = param_checksum(frozen_net.mlp);
  const std::uint64_t frozen_encoder = param_checksum(ae.encoder);

  const int n = static_cast<int>(dataset.size());
  AdamState dec_adam = make_adam(ae.decoder, config.dec_adam);
  AdamState disc_adam = make_adam(disc.net, config.disc_adam);
  Rng control(Rng::mix(config.seed, kControlStream));

  std::vector<Stage2Row> curve;
  curve.reserve(config.steps);
  for (int step = 0; step < config.steps; ++step) {
    GradientTape dec_tape = make_tape(ae.decoder);
    GradientTape disc_tape = make_tape(disc.net);
    Stage2Row row;
    for (int b = 0; b < config.batch; ++b) {
      const int idx = static_cast<int>(control.uniform_int(0, n - 1));
      const Stage2Sample& s = dataset[idx];
      Rng run_rng(Rng::mix(Rng::mix(config.seed, kStepStride * step), b));

      const LatentState cond = make_state(s.cond_latent, 0);
      EstimatedClean z;
      try {
        z = sample_truncated(frozen_net, cond, plan, schedule, run_rng);
      } catch (const NonFiniteError& e) {
        throw DivergenceError("train_stage2: sampler diverged at step " + std::to_string(step) +
                              " (" + e.what() + ")");
      }

      MlpCache dec_cache;
      const Vec fake = mlp_forward(ae.decoder, z.values, &dec_cache);

      double l1 = 0.0;
      for (size_t i = 0; i < fake.size(); ++i) l1 += std::fabs(fake[i] - s.hr_signal[i]);
      l1 /= static_cast<double>(fake.size());

      Vec d_fake_adv(fake.size(), 0.0);
      const double gen = gen_loss_backward(disc, fake, d_fake_adv);

      Vec d_fake(fake.size());
      for (size_t i = 0; i < fake.size(); ++i)
        d_fake[i] = config.l1_weight * sign(fake[i] - s.hr_signal[i]) / fake.size() +
                    config.adv_weight * d_fake_adv[i];
      mlp_backward(ae.decoder, dec_cache, d_fake, dec_tape);

      const double d_loss = disc_loss_backward(disc, s.hr_signal, fake, disc_tape);

      row.l1 += l1;
      row.gen += gen;
      row.disc += d_loss;
    }
    row.l1 /= config.batch;
    row.gen /= config.batch;
    row.disc /= config.batch;
    if (!std::isfinite(row.l1 + row.gen + row.disc))
      throw DivergenceError("train_stage2: loss diverged at step " + std::to_string(step));

    dec_tape.scale(1.0 / config.batch);
    disc_tape.scale(1.0 / config.batch);
    adam_step(ae.decoder, dec_tape, dec_adam);
    adam_step(disc.net, disc_tape, disc_adam);
    curve.push_back(row);
  }

  if (param_checksum(frozen_net.mlp) != frozen_denoiser)
    throw FreezeViolationError("train_stage2: denoiser parameters changed");
  if (param_checksum(ae.encoder) != frozen_encoder)
    throw FreezeViolationError("train_stage2: encoder parameters changed");
  return curve;
}

}  // namespace ccsr
