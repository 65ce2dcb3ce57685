#include "ccsr/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <utility>

#include "ccsr/io.hpp"
#include "ccsr/train.hpp"
#include "json.hpp"

namespace ccsr {

namespace {

// Stream tags for seed derivation, all mixed with the config seed. Documented
// in the README; changing any of them changes every downstream draw.
constexpr std::uint64_t kCorpusStream = 0xDA7A;
constexpr std::uint64_t kAeInitStream = 0xAE;
constexpr std::uint64_t kNetInitStream = 0xD1;
constexpr std::uint64_t kDiscInitStream = 0xD15C;
constexpr std::uint64_t kStabilityStream = 0x57AB;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string na_or_num(double v) {
  return std::isfinite(v) ? format_sig9(v) : std::string("na");
}

Image image_of_run(const RunStack& stack, int run) {
  Image img;
  img.h = stack.h;
  img.w = stack.w;
  img.v = stack.runs[static_cast<size_t>(run)];
  return img;
}

// Side-by-side panels with a light 2px separator; 1-D strips are repeated
// vertically so the montage stays viewable.
Image hstack_panels(const std::vector<const Image*>& panels) {
  const int sep_w = 2;
  const double sep_value = 0.5;
  int h = panels.front()->h;
  int w_total = sep_w * (static_cast<int>(panels.size()) - 1);
  for (const Image* p : panels) {
    if (p->h != h) throw ShapeMismatchError("montage panels disagree in height");
    w_total += p->w;
  }
  Image out;
  out.h = h;
  out.w = w_total;
  out.v.assign(static_cast<size_t>(h) * w_total, sep_value);
  int x0 = 0;
  for (const Image* p : panels) {
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < p->w; ++c) out.at(r, x0 + c) = p->at(r, c);
    x0 += p->w + sep_w;
  }
  if (h == 1) {
    const int reps = 24;
    Image tall;
    tall.h = reps;
    tall.w = out.w;
    tall.v.resize(static_cast<size_t>(reps) * out.w);
    for (int r = 0; r < reps; ++r)
      for (int c = 0; c < out.w; ++c) tall.at(r, c) = out.at(0, c);
    return tall;
  }
  return out;
}

std::string stage2_dir(const ExperimentConfig& cfg) {
  return cfg.out_dir + "/checkpoints/stage2";
}

PipelineBundle bundle_from_checkpoints(const ExperimentConfig& cfg) {
  PipelineBundle b;
  b.schedule = schedule_from_config(cfg);
  b.plan = plan_from_config(cfg, b.schedule);
  b.total_evals = cfg.total_evals;
  b.baseline_uniform = cfg.baseline_uniform;
  b.scale = cfg.degradation.scale;
  const std::string ck = cfg.out_dir + "/checkpoints";
  b.net = load_denoiser(ck);
  const std::string ft = stage2_dir(cfg);
  b.ae = file_exists(ft + "/autoencoder.json") ? load_autoencoder(ft) : load_autoencoder(ck);
  return b;
}

}  // namespace

NoiseSchedule schedule_from_config(const ExperimentConfig& cfg) {
  if (cfg.beta_start < 0.0 || cfg.beta_end < 0.0) return build_default_schedule(cfg.T);
  return build_linear_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
}

TimestepPlan plan_from_config(const ExperimentConfig& cfg, const NoiseSchedule& schedule) {
  return build_nonuniform_plan(schedule, cfg.t_max_frac, cfg.t_min_frac, cfg.total_evals);
}

Corpus corpus_from_config(const ExperimentConfig& cfg) {
  auto all = make_toy_dataset(toy_kind_from_name(cfg.dataset_kind), cfg.train_n + cfg.test_n,
                              cfg.size, cfg.degradation, Rng::mix(cfg.seed, kCorpusStream));
  Corpus corpus;
  corpus.train.assign(all.begin(), all.begin() + cfg.train_n);
  corpus.test.assign(all.begin() + cfg.train_n, all.end());
  return corpus;
}

Image restore(const PipelineBundle& bundle, const Image& lr, Rng& rng) {
  Image cond_img = upsample_condition(lr, bundle.scale);
  LatentState cond = make_state(encode_mean(bundle.ae, cond_img.v), 0);
  EstimatedClean z =
      bundle.baseline_uniform
          ? sample_uniform_baseline(bundle.net, cond, bundle.total_evals, bundle.schedule, rng)
          : sample_truncated(bundle.net, cond, bundle.plan, bundle.schedule, rng);
  Vec sig = decode(bundle.ae, z.values);
  if (sig.size() != cond_img.v.size())
    throw ShapeMismatchError("decoded signal does not match the target resolution");
  clamp01_inplace(sig);
  Image out;
  out.h = cond_img.h;
  out.w = cond_img.w;
  out.v = std::move(sig);
  return out;
}

StabilitySummary run_stability(const PipelineBundle& bundle, const std::vector<SignalPair>& test,
                               int n_runs, std::uint64_t root_seed, int threads) {
  if (test.empty()) throw InvalidRangeError("stability evaluation needs at least one test image");
  if (n_runs < 1) throw InvalidRangeError("n_runs must be >= 1");

  StabilitySummary s;
  s.n_images = static_cast<int>(test.size());
  s.n_runs = n_runs;
  const int h = test.front().hr.h;
  const int w = test.front().hr.w;
  s.has_ssim = h >= 11 && w >= 11;

  s.stacks.resize(test.size());
  for (size_t j = 0; j < test.size(); ++j) {
    s.stacks[j].image_id = test[j].id;
    s.stacks[j].h = h;
    s.stacks[j].w = w;
    s.stacks[j].runs.assign(static_cast<size_t>(n_runs), Vec{});
  }

  parallel_for(
      static_cast<int>(test.size()) * n_runs,
      [&](int k) {
        const int j = k / n_runs;
        const int i = k % n_runs;
        Rng rng(Rng::mix(root_seed, static_cast<std::uint64_t>(k)));
        Image out = restore(bundle, test[static_cast<size_t>(j)].lr, rng);
        if (out.h != h || out.w != w) throw ShapeMismatchError("restored shape mismatch");
        s.stacks[static_cast<size_t>(j)].runs[static_cast<size_t>(i)] = std::move(out.v);
      },
      threads);

  s.psnr_m = make_metric_matrix("psnr", s.n_images, n_runs);
  s.band_m = make_metric_matrix("band_energy", s.n_images, n_runs);
  if (s.has_ssim) s.ssim_m = make_metric_matrix("ssim", s.n_images, n_runs);
  s.best_run.assign(test.size(), 0);
  s.worst_run.assign(test.size(), 0);

  for (int j = 0; j < s.n_images; ++j) {
    const Image& gt = test[static_cast<size_t>(j)].hr;
    for (int i = 0; i < n_runs; ++i) {
      Image run = image_of_run(s.stacks[static_cast<size_t>(j)], i);
      s.psnr_m.at(j, i) = psnr(run, gt);
      s.band_m.at(j, i) = band_energy(run);
      if (s.has_ssim) s.ssim_m.at(j, i) = ssim(run, gt);
      if (s.psnr_m.at(j, i) > s.psnr_m.at(j, s.best_run[static_cast<size_t>(j)]))
        s.best_run[static_cast<size_t>(j)] = i;
      if (s.psnr_m.at(j, i) < s.psnr_m.at(j, s.worst_run[static_cast<size_t>(j)]))
        s.worst_run[static_cast<size_t>(j)] = i;
    }
  }

  s.psnr_mean = mean_of(s.psnr_m.values);
  s.band_mean = mean_of(s.band_m.values);
  s.ssim_mean = s.has_ssim ? mean_of(s.ssim_m.values) : std::numeric_limits<double>::quiet_NaN();

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (n_runs >= 2) {
    s.psnr_gstd = g_std(s.psnr_m);
    s.band_gstd = g_std(s.band_m);
    s.ssim_gstd = s.has_ssim ? g_std(s.ssim_m) : nan;
    s.lstd = l_std_dataset(s.stacks);
  } else {
    s.psnr_gstd = s.band_gstd = s.ssim_gstd = s.lstd = nan;
  }
  return s;
}

TrainedStage1 run_stage1_training(const ExperimentConfig& cfg, const Corpus& corpus) {
  if (corpus.train.empty()) throw InvalidRangeError("stage 1 needs a non-empty training split");

  TrainedStage1 out;
  PipelineBundle& b = out.bundle;
  b.schedule = schedule_from_config(cfg);
  b.plan = plan_from_config(cfg, b.schedule);
  b.total_evals = cfg.total_evals;
  b.baseline_uniform = cfg.baseline_uniform;
  b.scale = cfg.degradation.scale;

  const int signal_dim = static_cast<int>(corpus.train.front().hr.v.size());
  if (cfg.pixel_space) {
    b.ae = make_identity_autoencoder(signal_dim);
    out.ae_recon_mse = 0.0;
  } else {
    Rng ae_rng(Rng::mix(cfg.seed, kAeInitStream));
    b.ae = make_autoencoder(signal_dim, cfg.latent_dim, cfg.ae_hidden, ae_rng);
    std::vector<Vec> hr_signals;
    hr_signals.reserve(corpus.train.size());
    for (const SignalPair& p : corpus.train) hr_signals.push_back(p.hr.v);
    out.ae_recon_mse = pretrain_autoencoder(b.ae, hr_signals, cfg.ae_pretrain);
  }

  const int x_dim = b.ae.identity ? signal_dim : cfg.latent_dim;
  Rng net_rng(Rng::mix(cfg.seed, kNetInitStream));
  b.net = make_denoiser(x_dim, x_dim, cfg.time_dim, cfg.hidden, cfg.T, net_rng);

  std::vector<TrainSample> samples;
  samples.reserve(corpus.train.size());
  for (const SignalPair& p : corpus.train) {
    TrainSample s;
    s.x0 = encode_mean(b.ae, p.hr.v);
    s.cond = encode_mean(b.ae, upsample_condition(p.lr, p.scale).v);
    samples.push_back(std::move(s));
  }

  Stage1Config scfg = cfg.stage1;
  if (cfg.baseline_uniform)
    scfg.mode = Stage1Mode::kFullUniform;
  else
    scfg.mode = cfg.nutl ? Stage1Mode::kNutl : Stage1Mode::kNoNutl;
  out.curves = train_stage1(b.net, samples, b.plan, b.schedule, scfg);
  return out;
}

std::vector<Stage2Row> run_stage2_training(const ExperimentConfig& cfg, PipelineBundle& bundle,
                                           const Corpus& corpus, Discriminator* disc_out) {
  if (bundle.ae.identity)
    throw ConfigError("decoder finetuning requires a learned autoencoder, not pixel space");
  if (corpus.train.empty()) throw InvalidRangeError("stage 2 needs a non-empty training split");

  std::vector<Stage2Sample> samples;
  samples.reserve(corpus.train.size());
  for (const SignalPair& p : corpus.train) {
    Stage2Sample s;
    s.cond_latent = encode_mean(bundle.ae, upsample_condition(p.lr, p.scale).v);
    s.hr_signal = p.hr.v;
    samples.push_back(std::move(s));
  }

  const int h = corpus.train.front().hr.h;
  const int w = corpus.train.front().hr.w;
  Rng disc_rng(Rng::mix(cfg.seed, kDiscInitStream));
  Discriminator disc =
      h == 1 ? make_signal_discriminator(w, cfg.disc_hidden, disc_rng)
             : make_patch_discriminator(h, w, cfg.disc_patch, cfg.disc_patches, cfg.disc_hidden,
                                        disc_rng);

  auto rows =
      train_stage2(bundle.ae, disc, bundle.net, bundle.plan, bundle.schedule, samples, cfg.stage2);
  if (disc_out) *disc_out = std::move(disc);
  return rows;
}

void write_stability_reports(const StabilitySummary& s, const std::vector<SignalPair>& test,
                             const PipelineBundle& bundle, const std::string& dir) {
  ensure_dir(dir);

  CsvWriter per(dir + "/per_run.csv", {"image_id", "run", "metric", "value"});
  for (int j = 0; j < s.n_images; ++j) {
    const std::string& id = test[static_cast<size_t>(j)].id;
    for (int i = 0; i < s.n_runs; ++i) {
      per.row({id, std::to_string(i), "psnr", CsvWriter::num(s.psnr_m.at(j, i))});
      if (s.has_ssim) per.row({id, std::to_string(i), "ssim", CsvWriter::num(s.ssim_m.at(j, i))});
      per.row({id, std::to_string(i), "band_energy", CsvWriter::num(s.band_m.at(j, i))});
    }
  }
  per.close();

  CsvWriter sum(dir + "/summary.csv", {"metric", "mean", "g_std"});
  sum.row({"psnr", na_or_num(s.psnr_mean), na_or_num(s.psnr_gstd)});
  sum.row({"ssim", na_or_num(s.ssim_mean), na_or_num(s.ssim_gstd)});
  sum.row({"band_energy", na_or_num(s.band_mean), na_or_num(s.band_gstd)});
  sum.row({"l_std", na_or_num(s.lstd), "na"});
  sum.close();

  for (int j = 0; j < s.n_images; ++j) {
    const SignalPair& p = test[static_cast<size_t>(j)];
    Image cond = upsample_condition(p.lr, bundle.scale);
    Image best = image_of_run(s.stacks[static_cast<size_t>(j)], s.best_run[static_cast<size_t>(j)]);
    Image worst =
        image_of_run(s.stacks[static_cast<size_t>(j)], s.worst_run[static_cast<size_t>(j)]);
    Image montage = hstack_panels({&cond, &best, &worst, &p.hr});
    write_pgm(dir + "/montage_" + p.id + ".pgm", montage, 255);
  }
}

int cmd_generate_data(const ExperimentConfig& cfg) {
  Corpus corpus = corpus_from_config(cfg);
  const std::string data_dir = cfg.out_dir + "/data";
  ensure_dir(data_dir + "/train");
  ensure_dir(data_dir + "/test");

  nlohmann::json manifest;
  manifest["kind"] = cfg.dataset_kind;
  manifest["size"] = cfg.size;
  manifest["scale"] = cfg.degradation.scale;
  manifest["train_n"] = cfg.train_n;
  manifest["test_n"] = cfg.test_n;
  manifest["seed"] = cfg.seed;

  nlohmann::json items = nlohmann::json::array();
  auto dump_split = [&](const std::vector<SignalPair>& split, const char* name) {
    for (const SignalPair& p : split) {
      const std::string base = data_dir + "/" + name + "/" + p.id;
      const bool flat = p.hr.h == 1;
      if (flat) {
        write_tensor(base + "_hr.bin", p.hr.v, p.hr.w);
        write_tensor(base + "_lr.bin", p.lr.v, p.lr.w);
      } else {
        write_pgm(base + "_hr.pgm", p.hr, 65535);
        write_pgm(base + "_lr.pgm", p.lr, 65535);
      }
      nlohmann::json item;
      item["id"] = p.id;
      item["split"] = name;
      item["degradation"] = p.degradation;
      item["hr_checksum"] = hex64(fnv1a_hash(p.hr.v));
      item["lr_checksum"] = hex64(fnv1a_hash(p.lr.v));
      items.push_back(item);
    }
  };
  dump_split(corpus.train, "train");
  dump_split(corpus.test, "test");
  manifest["items"] = items;
  write_text_file(data_dir + "/manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << corpus.train.size() << " train + " << corpus.test.size()
            << " test pairs under " << data_dir << "\n";
  return 0;
}

int cmd_train(const ExperimentConfig& cfg, int stage) {
  Corpus corpus = corpus_from_config(cfg);
  const std::string ck = cfg.out_dir + "/checkpoints";
  const std::string tr = cfg.out_dir + "/train";
  ensure_dir(ck);
  ensure_dir(tr);

  if (stage == 1) {
    TrainedStage1 t = run_stage1_training(cfg, corpus);
    save_denoiser(ck, t.bundle.net);
    save_autoencoder(ck, t.bundle.ae);

    CsvWriter steps(tr + "/losses.csv", {"step", "l_diff", "l_T", "l_t_max", "total"});
    for (size_t i = 0; i < t.curves.per_step.size(); ++i) {
      const LossBreakdown& r = t.curves.per_step[i];
      steps.row({std::to_string(i), CsvWriter::num(r.l_diff), CsvWriter::num(r.l_T),
                 CsvWriter::num(r.l_t_max), CsvWriter::num(r.total)});
    }
    steps.close();
    CsvWriter epochs(tr + "/epoch_losses.csv", {"step", "l_diff", "l_T", "l_t_max", "total"});
    for (size_t i = 0; i < t.curves.per_epoch.size(); ++i) {
      const LossBreakdown& r = t.curves.per_epoch[i];
      epochs.row({std::to_string(i), CsvWriter::num(r.l_diff), CsvWriter::num(r.l_T),
                  CsvWriter::num(r.l_t_max), CsvWriter::num(r.total)});
    }
    epochs.close();

    std::cout << "stage 1 done: " << t.curves.per_step.size() << " steps, autoencoder recon mse "
              << format_sig9(t.ae_recon_mse) << ", final total loss "
              << format_sig9(t.curves.per_epoch.empty() ? 0.0 : t.curves.per_epoch.back().total)
              << "\n";
    return 0;
  }

  if (stage != 2) throw ConfigError("stage must be 1 or 2");

  PipelineBundle b;
  b.schedule = schedule_from_config(cfg);
  b.plan = plan_from_config(cfg, b.schedule);
  b.total_evals = cfg.total_evals;
  b.baseline_uniform = cfg.baseline_uniform;
  b.scale = cfg.degradation.scale;
  b.net = load_denoiser(ck);
  b.ae = load_autoencoder(ck);

  Discriminator disc;
  auto rows = run_stage2_training(cfg, b, corpus, &disc);

  const std::string ft = stage2_dir(cfg);
  ensure_dir(ft);
  save_autoencoder(ft, b.ae);
  save_discriminator(ft, disc);

  CsvWriter c(tr + "/stage2_losses.csv", {"step", "l1", "gen_adv", "disc"});
  for (size_t i = 0; i < rows.size(); ++i)
    c.row({std::to_string(i), CsvWriter::num(rows[i].l1), CsvWriter::num(rows[i].gen),
           CsvWriter::num(rows[i].disc)});
  c.close();

  std::cout << "stage 2 done: " << rows.size() << " steps, final l1 "
            << format_sig9(rows.empty() ? 0.0 : rows.back().l1) << "\n";
  return 0;
}

int cmd_stability_report(const ExperimentConfig& cfg) {
  Corpus corpus = corpus_from_config(cfg);
  PipelineBundle b = bundle_from_checkpoints(cfg);
  StabilitySummary s = run_stability(b, corpus.test, cfg.n_runs,
                                     Rng::mix(cfg.seed, kStabilityStream), cfg.threads);
  const std::string dir = cfg.out_dir + "/report";
  write_stability_reports(s, corpus.test, b, dir);

  std::cout << "stability over " << s.n_images << " images x " << s.n_runs << " runs\n";
  std::cout << "  psnr  mean " << na_or_num(s.psnr_mean) << "  g_std " << na_or_num(s.psnr_gstd)
            << "\n";
  std::cout << "  ssim  mean " << na_or_num(s.ssim_mean) << "  g_std " << na_or_num(s.ssim_gstd)
            << "\n";
  std::cout << "  band  mean " << na_or_num(s.band_mean) << "  g_std " << na_or_num(s.band_gstd)
            << "\n";
  std::cout << "  l_std " << na_or_num(s.lstd) << "\n";
  std::cout << "reports under " << dir << "\n";
  return 0;
}

std::vector<AblationArm> default_ablation_arms(const ExperimentConfig& cfg) {
  AblationArm base;
  base.t_max_frac = cfg.t_max_frac;
  base.t_min_frac = cfg.t_min_frac;
  base.total_evals = cfg.total_evals;

  AblationArm full = base;
  full.name = "ccsr";
  AblationArm no_ft = base;
  no_ft.name = "v2_no_finetune";
  no_ft.decoder_finetune = false;
  AblationArm plain = base;
  plain.name = "v1_plain";
  plain.nutl = false;
  plain.decoder_finetune = false;
  AblationArm uniform = base;
  uniform.name = "uniform_baseline";
  uniform.nutl = false;
  uniform.decoder_finetune = false;
  uniform.baseline_uniform = true;
  return {full, no_ft, plain, uniform};
}

int cmd_ablate(const ExperimentConfig& cfg, const std::vector<AblationArm>& arms) {
  if (arms.empty()) throw ConfigError("ablation needs at least one arm");
  const std::string dir = cfg.out_dir + "/report";
  ensure_dir(dir);

  CsvWriter csv(dir + "/ablation.csv",
                {"arm", "default_plan", "psnr_mean", "ssim_mean", "band_energy_mean", "g_std_psnr",
                 "g_std_ssim", "l_std"});
  for (const AblationArm& arm : arms) {
    ExperimentConfig c = cfg;
    c.nutl = arm.nutl;
    c.decoder_finetune = arm.decoder_finetune;
    c.baseline_uniform = arm.baseline_uniform;
    c.t_max_frac = arm.t_max_frac;
    c.t_min_frac = arm.t_min_frac;
    c.total_evals = arm.total_evals;
    validate_config(c);

    Corpus corpus = corpus_from_config(c);
    TrainedStage1 t = run_stage1_training(c, corpus);
    if (c.decoder_finetune && !c.baseline_uniform && !t.bundle.ae.identity)
      run_stage2_training(c, t.bundle, corpus);
    StabilitySummary s = run_stability(t.bundle, corpus.test, c.n_runs,
                                       Rng::mix(c.seed, kStabilityStream), c.threads);

    const bool default_plan = std::abs(arm.t_max_frac - 2.0 / 3.0) < 1e-12 &&
                              std::abs(arm.t_min_frac - 1.0 / 3.0) < 1e-12 &&
                              arm.total_evals == 15;
    csv.row({arm.name, default_plan ? "yes" : "no", na_or_num(s.psnr_mean),
             na_or_num(s.ssim_mean), na_or_num(s.band_mean), na_or_num(s.psnr_gstd),
             na_or_num(s.ssim_gstd), na_or_num(s.lstd)});
    std::cout << "arm " << arm.name << ": psnr " << na_or_num(s.psnr_mean) << ", g_std(psnr) "
              << na_or_num(s.psnr_gstd) << ", l_std " << na_or_num(s.lstd) << "\n";
  }
  csv.close();
  std::cout << "ablation table at " << dir << "/ablation.csv\n";
  return 0;
}

}  // namespace ccsr
