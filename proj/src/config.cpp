#include "ccsr/config.hpp"

#include <cstdlib>

#include "ccsr/io.hpp"
#include "json.hpp"

namespace ccsr {

namespace {

using nlohmann::json;

json adam_to_json(const AdamConfig& a) {
  return {{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps}};
}

AdamConfig adam_from_json(const json& j, const AdamConfig& defaults) {
  AdamConfig a = defaults;
  a.lr = j.value("lr", a.lr);
  a.beta1 = j.value("beta1", a.beta1);
  a.beta2 = j.value("beta2", a.beta2);
  a.eps = j.value("eps", a.eps);
  return a;
}

const char* stage1_mode_name(Stage1Mode m) {
  switch (m) {
    case Stage1Mode::kNutl: return "nutl";
    case Stage1Mode::kNoNutl: return "no_nutl";
    case Stage1Mode::kFullUniform: return "full_uniform";
  }
  throw ConfigError("unknown stage-1 mode");
}

Stage1Mode stage1_mode_from_name(const std::string& s) {
  if (s == "nutl") return Stage1Mode::kNutl;
  if (s == "no_nutl") return Stage1Mode::kNoNutl;
  if (s == "full_uniform") return Stage1Mode::kFullUniform;
  throw ConfigError("unknown stage-1 mode: " + s);
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["schedule"] = {{"T", c.T}, {"beta_start", c.beta_start}, {"beta_end", c.beta_end}};
  j["plan"] = {{"t_max_frac", c.t_max_frac},
               {"t_min_frac", c.t_min_frac},
               {"total_evals", c.total_evals}};
  j["dataset"] = {{"kind", c.dataset_kind},
                  {"train_n", c.train_n},
                  {"test_n", c.test_n},
                  {"size", c.size},
                  {"blur_sigma_min", c.degradation.blur_sigma_min},
                  {"blur_sigma_max", c.degradation.blur_sigma_max},
                  {"scale", c.degradation.scale},
                  {"noise_sigma_min", c.degradation.noise_sigma_min},
                  {"noise_sigma_max", c.degradation.noise_sigma_max},
                  {"quant_levels", c.degradation.quant_levels}};
  j["model"] = {{"pixel_space", c.pixel_space}, {"latent_dim", c.latent_dim},
                {"hidden", c.hidden},           {"time_dim", c.time_dim},
                {"ae_hidden", c.ae_hidden},     {"disc_hidden", c.disc_hidden},
                {"disc_patch", c.disc_patch},   {"disc_patches", c.disc_patches}};
  j["ae_pretrain"] = {{"steps", c.ae_pretrain.steps},
                      {"batch", c.ae_pretrain.batch},
                      {"adam", adam_to_json(c.ae_pretrain.adam)},
                      {"kl_weight", c.ae_pretrain.kl_weight},
                      {"seed", c.ae_pretrain.seed}};
  j["stage1"] = {{"epochs", c.stage1.epochs},
                 {"batch", c.stage1.batch},
                 {"adam", adam_to_json(c.stage1.adam)},
                 {"p_T", c.stage1.p_T},
                 {"stop_gradient_second_eval", c.stage1.stop_gradient_second_eval},
                 {"mode", stage1_mode_name(c.stage1.mode)},
                 {"clip_norm", c.stage1.clip_norm},
                 {"cosine_lr", c.stage1.cosine_lr},
                 {"warmup_epochs", c.stage1.warmup_epochs},
                 {"seed", c.stage1.seed}};
  j["stage2"] = {{"steps", c.stage2.steps},
                 {"batch", c.stage2.batch},
                 {"dec_adam", adam_to_json(c.stage2.dec_adam)},
                 {"disc_adam", adam_to_json(c.stage2.disc_adam)},
                 {"l1_weight", c.stage2.l1_weight},
                 {"adv_weight", c.stage2.adv_weight},
                 {"seed", c.stage2.seed}};
  j["stability"] = {{"n_runs", c.n_runs}, {"threads", c.threads}};
  j["ablation"] = {{"nutl", c.nutl},
                   {"decoder_finetune", c.decoder_finetune},
                   {"baseline_uniform", c.baseline_uniform}};
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  try {
    if (j.contains("schedule")) {
      const auto& s = j["schedule"];
      c.T = s.value("T", c.T);
      c.beta_start = s.value("beta_start", c.beta_start);
      c.beta_end = s.value("beta_end", c.beta_end);
    }
    if (j.contains("plan")) {
      const auto& p = j["plan"];
      c.t_max_frac = p.value("t_max_frac", c.t_max_frac);
      c.t_min_frac = p.value("t_min_frac", c.t_min_frac);
      c.total_evals = p.value("total_evals", c.total_evals);
    }
    if (j.contains("dataset")) {
      const auto& d = j["dataset"];
      c.dataset_kind = d.value("kind", c.dataset_kind);
      c.train_n = d.value("train_n", c.train_n);
      c.test_n = d.value("test_n", c.test_n);
      c.size = d.value("size", c.size);
      c.degradation.blur_sigma_min = d.value("blur_sigma_min", c.degradation.blur_sigma_min);
      c.degradation.blur_sigma_max = d.value("blur_sigma_max", c.degradation.blur_sigma_max);
      c.degradation.scale = d.value("scale", c.degradation.scale);
      c.degradation.noise_sigma_min = d.value("noise_sigma_min", c.degradation.noise_sigma_min);
      c.degradation.noise_sigma_max = d.value("noise_sigma_max", c.degradation.noise_sigma_max);
      c.degradation.quant_levels = d.value("quant_levels", c.degradation.quant_levels);
    }
    if (j.contains("model")) {
      const auto& m = j["model"];
      c.pixel_space = m.value("pixel_space", c.pixel_space);
      c.latent_dim = m.value("latent_dim", c.latent_dim);
      c.hidden = m.value("hidden", c.hidden);
      c.time_dim = m.value("time_dim", c.time_dim);
      c.ae_hidden = m.value("ae_hidden", c.ae_hidden);
      c.disc_hidden = m.value("disc_hidden", c.disc_hidden);
      c.disc_patch = m.value("disc_patch", c.disc_patch);
      c.disc_patches = m.value("disc_patches", c.disc_patches);
    }
    if (j.contains("ae_pretrain")) {
      const auto& a = j["ae_pretrain"];
      c.ae_pretrain.steps = a.value("steps", c.ae_pretrain.steps);
      c.ae_pretrain.batch = a.value("batch", c.ae_pretrain.batch);
      if (a.contains("adam")) c.ae_pretrain.adam = adam_from_json(a["adam"], c.ae_pretrain.adam);
      c.ae_pretrain.kl_weight = a.value("kl_weight", c.ae_pretrain.kl_weight);
      c.ae_pretrain.seed = a.value("seed", c.ae_pretrain.seed);
    }
    if (j.contains("stage1")) {
      const auto& s = j["stage1"];
      c.stage1.epochs = s.value("epochs", c.stage1.epochs);
      c.stage1.batch = s.value("batch", c.stage1.batch);
      if (s.contains("adam")) c.stage1.adam = adam_from_json(s["adam"], c.stage1.adam);
      c.stage1.p_T = s.value("p_T", c.stage1.p_T);
      c.stage1.stop_gradient_second_eval =
          s.value("stop_gradient_second_eval", c.stage1.stop_gradient_second_eval);
      if (s.contains("mode")) c.stage1.mode = stage1_mode_from_name(s["mode"].get<std::string>());
      c.stage1.clip_norm = s.value("clip_norm", c.stage1.clip_norm);
      c.stage1.cosine_lr = s.value("cosine_lr", c.stage1.cosine_lr);
      c.stage1.warmup_epochs = s.value("warmup_epochs", c.stage1.warmup_epochs);
      c.stage1.seed = s.value("seed", c.stage1.seed);
    }
    if (j.contains("stage2")) {
      const auto& s = j["stage2"];
      c.stage2.steps = s.value("steps", c.stage2.steps);
      c.stage2.batch = s.value("batch", c.stage2.batch);
      if (s.contains("dec_adam")) c.stage2.dec_adam = adam_from_json(s["dec_adam"], c.stage2.dec_adam);
      if (s.contains("disc_adam"))
        c.stage2.disc_adam = adam_from_json(s["disc_adam"], c.stage2.disc_adam);
      c.stage2.l1_weight = s.value("l1_weight", c.stage2.l1_weight);
      c.stage2.adv_weight = s.value("adv_weight", c.stage2.adv_weight);
      c.stage2.seed = s.value("seed", c.stage2.seed);
    }
    if (j.contains("stability")) {
      const auto& s = j["stability"];
      c.n_runs = s.value("n_runs", c.n_runs);
      c.threads = s.value("threads", c.threads);
    }
    if (j.contains("ablation")) {
      const auto& a = j["ablation"];
      c.nutl = a.value("nutl", c.nutl);
      c.decoder_finetune = a.value("decoder_finetune", c.decoder_finetune);
      c.baseline_uniform = a.value("baseline_uniform", c.baseline_uniform);
    }
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig c = config_from_json(read_text_file(path));
  if (const char* env = std::getenv("CCSR_OUT_DIR"); env && *env) c.out_dir = env;
  validate_config(c);
  return c;
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  write_text_file(path, config_to_json(cfg));
}

void validate_config(const ExperimentConfig& c) {
  if (c.T < 2) throw ConfigError("config: T must be >= 2");
  if (!(c.t_min_frac > 0.0 && c.t_min_frac < c.t_max_frac && c.t_max_frac < 1.0))
    throw ConfigError("config: need 0 < t_min_frac < t_max_frac < 1");
  if (c.total_evals < 3) throw ConfigError("config: total_evals must be >= 3");
  if (c.train_n < 1 || c.test_n < 0) throw ConfigError("config: bad corpus sizes");
  if (c.size < 4) throw ConfigError("config: size must be >= 4");
  if (c.n_runs < 1) throw ConfigError("config: n_runs must be >= 1");
  if (c.stage1.p_T >= 1.0) throw ConfigError("config: p_T must be < 1");
  if (c.stage1.clip_norm < 0.0) throw ConfigError("config: clip_norm must be non-negative");
  if (c.stage1.warmup_epochs < 0)
    throw ConfigError("config: warmup_epochs must be non-negative");
  toy_kind_from_name(c.dataset_kind);  // throws on unknown kind
  if (c.out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
}

}  // namespace ccsr
