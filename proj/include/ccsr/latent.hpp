#pragma once

#include "ccsr/nn.hpp"

namespace ccsr {

// Small VAE-style autoencoder: encoder emits [mean || logvar], decoder maps a
// latent back to signal space. identity mode bypasses both nets so the whole
// pipeline can run in pixel space.
struct AutoEncoder {
  bool identity = false;
  bool deterministic = false;  // encode returns the mean as the sample
  int signal_dim = 0;
  int latent_dim = 0;
  Mlp encoder;  // signal_dim -> 2 * latent_dim
  Mlp decoder;  // latent_dim -> signal_dim
};

AutoEncoder make_autoencoder(int signal_dim, int latent_dim, int hidden, Rng& rng);
AutoEncoder make_identity_autoencoder(int dim);

struct EncodeResult {
  Vec sample;
  Vec mean;
  Vec logvar;
};

EncodeResult encode(const AutoEncoder& ae, const Vec& x, Rng& rng);
Vec encode_mean(const AutoEncoder& ae, const Vec& x);
Vec decode(const AutoEncoder& ae, const Vec& z);

struct VaeLossTerms {
  double total = 0.0;
  double recon = 0.0;  // L1 mean
  double kl = 0.0;     // closed-form KL vs N(0, I), summed over latent dims
};

VaeLossTerms vae_pretrain_loss(const Vec& x, const Vec& x_rec, const Vec& mean,
                               const Vec& logvar, double kl_weight);

// Hinge-loss discriminator. patch == 0 scores the whole vector with one
// logit; otherwise fixed-grid square patches of a 2-D image are scored
// independently and losses averaged over patches.
struct Discriminator {
  Mlp net;
  int patch = 0;
  int img_h = 0;
  int img_w = 0;
  std::vector<std::pair<int, int>> offsets;  // patch top-left corners
};

Discriminator make_signal_discriminator(int signal_dim, int hidden, Rng& rng);
Discriminator make_patch_discriminator(int img_h, int img_w, int patch, int n_patches, int hidden,
                                       Rng& rng);

// One logit per patch (a single logit in whole-vector mode).
Vec disc_scores(const Discriminator& disc, const Vec& x, std::vector<MlpCache>* caches = nullptr);

// (disc_loss, gen_loss) under the hinge formulation:
//   disc_loss = mean(relu(1 - D(real))) + mean(relu(1 + D(fake)))
//   gen_loss  = -mean(D(fake))
std::pair<double, double> adversarial_losses(const Discriminator& disc, const Vec& real,
                                             const Vec& fake);

// Training-side gradient routes. disc_loss_backward accumulates discriminator
// parameter gradients; gen_loss_backward accumulates d(gen_loss)/d(fake) into
// d_fake so the decoder can be updated through the fake sample.
double disc_loss_backward(const Discriminator& disc, const Vec& real, const Vec& fake,
                          GradientTape& tape);
double gen_loss_backward(const Discriminator& disc, const Vec& fake, Vec& d_fake);

}  // namespace ccsr
