#pragma once

#include "ccsr/common.hpp"

namespace ccsr {

enum class Activation { kIdentity, kSilu };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  Activation act = Activation::kIdentity;
  Vec weights;  // row-major [out_dim][in_dim]
  Vec bias;     // [out_dim]
};

struct Mlp {
  std::vector<DenseLayer> layers;

  int in_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
  int out_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
  size_t param_count() const;
};

// dims = {in, hidden..., out}; hidden layers get hidden_act, the last layer is
// linear. Weights initialized uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Mlp make_mlp(const std::vector<int>& dims, Activation hidden_act, Rng& rng);

// Forward-pass cache required by mlp_backward.
struct MlpCache {
  Vec input;
  std::vector<Vec> pre;   // pre-activation per layer
  std::vector<Vec> post;  // post-activation per layer
};

Vec mlp_forward(const Mlp& net, const Vec& in, MlpCache* cache = nullptr);

// Parameter gradients mirroring an Mlp layer by layer.
struct GradientTape {
  std::vector<Vec> d_weights;
  std::vector<Vec> d_bias;

  void scale(double s);
  void add_scaled(const GradientTape& other, double s);
};

GradientTape make_tape(const Mlp& net);

// Accumulates parameter gradients into tape and returns the gradient w.r.t.
// the input vector (needed when a loss backpropagates through chained
// evaluations).
Vec mlp_backward(const Mlp& net, const MlpCache& cache, const Vec& d_out, GradientTape& tape);

// Flattened parameter access used by checkpoints, finite-difference tests and
// freeze checksums. Order: per layer, weights then bias.
Vec flatten_params(const Mlp& net);
void unflatten_params(Mlp& net, const Vec& flat);
std::uint64_t param_checksum(const Mlp& net);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  bool operator==(const AdamConfig&) const = default;
};

struct AdamState {
  AdamConfig cfg;
  long step = 0;
  std::vector<Vec> m_w, v_w, m_b, v_b;
};

AdamState make_adam(const Mlp& net, const AdamConfig& cfg);
void adam_step(Mlp& net, const GradientTape& tape, AdamState& state);

// Sinusoidal embedding of t/T: interleaved [sin, cos] pairs at geometrically
// spaced frequencies, lowest frequency 1 so t = T maps the first pair to
// [sin(1), cos(1)].
Vec time_embed(int t, int dim, int T);

// Conditional noise predictor: MLP over [x_t || time_embed(t) || condition].
struct DenoiserNet {
  Mlp mlp;
  int x_dim = 0;
  int cond_dim = 0;
  int time_dim = 0;
  int T = 0;
};

DenoiserNet make_denoiser(int x_dim, int cond_dim, int time_dim, int hidden, int T, Rng& rng);

Vec denoiser_forward(const DenoiserNet& net, const Vec& x_t, int t, const Vec& cond,
                     MlpCache* cache = nullptr);

// Backward through a cached denoiser evaluation; returns d(loss)/d(x_t).
Vec denoiser_backward(const DenoiserNet& net, const MlpCache& cache, const Vec& d_out,
                      GradientTape& tape);

}  // namespace ccsr
