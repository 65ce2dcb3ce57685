#include "ccsr/latent.hpp"

#include <cmath>

namespace ccsr {

AutoEncoder make_autoencoder(int signal_dim, int latent_dim, int hidden, Rng& rng) {
  if (signal_dim <= 0 || latent_dim <= 0 || hidden <= 0)
    throw DimensionMismatchError("make_autoencoder: bad dimensions");
  AutoEncoder ae;
  ae.signal_dim = signal_dim;
  ae.latent_dim = latent_dim;
  ae.encoder = make_mlp({signal_dim, hidden, hidden, 2 * latent_dim}, Activation::kSilu, rng);
  ae.decoder = make_mlp({latent_dim, hidden, hidden, signal_dim}, Activation::kSilu, rng);
  return ae;
}

AutoEncoder make_identity_autoencoder(int dim) {
  if (dim <= 0) throw DimensionMismatchError("make_identity_autoencoder: bad dimension");
  AutoEncoder ae;
  ae.identity = true;
  ae.deterministic = true;
  ae.signal_dim = dim;
  ae.latent_dim = dim;
  return ae;
}

EncodeResult encode(const AutoEncoder& ae, const Vec& x, Rng& rng) {
  if (static_cast<int>(x.size()) != ae.signal_dim)
    throw DimensionMismatchError("encode: signal size mismatch");
  EncodeResult r;
  if (ae.identity) {
    r.sample = x;
    r.mean = x;
    r.logvar.assign(x.size(), 0.0);
    return r;
  }
  const Vec out = mlp_forward(ae.encoder, x);
  r.mean.assign(out.begin(), out.begin() + ae.latent_dim);
  r.logvar.assign(out.begin() + ae.latent_dim, out.end());
  if (ae.deterministic) {
    r.sample = r.mean;
    return r;
  }
  r.sample.resize(ae.latent_dim);
  for (int i = 0; i < ae.latent_dim; ++i)
    r.sample[i] = r.mean[i] + std::exp(0.5 * r.logvar[i]) * rng.normal();
  return r;
}

Vec encode_mean(const AutoEncoder& ae, const Vec& x) {
  if (static_cast<int>(x.size()) != ae.signal_dim)
    throw DimensionMismatchError("encode_mean: signal size mismatch");
  if (ae.identity) return x;
  const Vec out = mlp_forward(ae.encoder, x);
  return Vec(out.begin(), out.begin() + ae.latent_dim);
}

Vec decode(const AutoEncoder& ae, const Vec& z) {
  if (static_cast<int>(z.size()) != ae.latent_dim)
    throw DimensionMismatchError("decode: latent size mismatch");
  if (ae.identity) return z;
  return mlp_forward(ae.decoder, z);
}

VaeLossTerms vae_pretrain_loss(const Vec& x, const Vec& x_rec, const Vec& mean,
                               const Vec& logvar, double kl_weight) {
  if (x.size() != x_rec.size()) throw ShapeMismatchError("vae_pretrain_loss: recon shape mismatch");
  if (mean.size() != logvar.size())
    throw ShapeMismatchError("vae_pretrain_loss: mean/logvar shape mismatch");
  VaeLossTerms t;
  for (size_t i = 0; i < x.size(); ++i) t.recon += std::fabs(x_rec[i] - x[i]);
  t.recon /= static_cast<double>(x.size());
  for (size_t i = 0; i < mean.size(); ++i)
    t.kl += 0.5 * (mean[i] * mean[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
  t.total = t.recon + kl_weight * t.kl;
  if (!std::isfinite(t.total)) throw NonFiniteError("vae_pretrain_loss: non-finite loss");
  return t;
}

namespace {

Vec extract_patch(const Vec& x, int img_w, int r0, int c0, int patch) {
  Vec p(static_cast<size_t>(patch) * patch);
  for (int r = 0; r < patch; ++r)
    for (int c = 0; c < patch; ++c)
      p[static_cast<size_t>(r) * patch + c] = x[static_cast<size_t>(r0 + r) * img_w + (c0 + c)];
  return p;
}

void scatter_patch(Vec& dst, const Vec& dp, int img_w, int r0, int c0, int patch) {
  for (int r = 0; r < patch; ++r)
    for (int c = 0; c < patch; ++c)
      dst[static_cast<size_t>(r0 + r) * img_w + (c0 + c)] += dp[static_cast<size_t>(r) * patch + c];
}

}  // namespace

Discriminator make_signal_discriminator(int signal_dim, int hidden, Rng& rng) {
  if (signal_dim <= 0 || hidden <= 0)
    throw DimensionMismatchError("make_signal_discriminator: bad dimensions");
  Discriminator d;
  d.net = make_mlp({signal_dim, hidden, hidden, 1}, Activation::kSilu, rng);
  d.offsets = {{0, 0}};
  return d;
}

Discriminator make_patch_discriminator(int img_h, int img_w, int patch, int n_patches, int hidden,
                                       Rng& rng) {
  if (patch <= 0 || patch > img_h || patch > img_w)
    throw DimensionMismatchError("make_patch_discriminator: patch larger than image");
  if (n_patches < 1) throw InvalidRangeError("make_patch_discriminator: need at least one patch");
  Discriminator d;
  d.patch = patch;
  d.img_h = img_h;
  d.img_w = img_w;
  d.net = make_mlp({patch * patch, hidden, hidden, 1}, Activation::kSilu, rng);

  // Fixed grid, rows x cols = n_patches with rows the largest factor <= sqrt.
  int rows = static_cast<int>(std::sqrt(static_cast<double>(n_patches)));
  while (rows > 1 && n_patches % rows != 0) --rows;
  const int cols = n_patches / rows;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const int r0 = rows == 1 ? (img_h - patch) / 2
                               : static_cast<int>(std::floor(0.5 + static_cast<double>(i) *
                                                                       (img_h - patch) / (rows - 1)));
      const int c0 = cols == 1 ? (img_w - patch) / 2
                               : static_cast<int>(std::floor(0.5 + static_cast<double>(j) *
                                                                       (img_w - patch) / (cols - 1)));
      d.offsets.emplace_back(r0, c0);
    }
  }
  return d;
}

Vec disc_scores(const Discriminator& disc, const Vec& x, std::vector<MlpCache>* caches) {
  const int in_dim = disc.net.in_dim();
  if (caches) caches->assign(disc.offsets.size(), MlpCache{});
  Vec scores(disc.offsets.size());
  if (disc.patch == 0) {
    if (static_cast<int>(x.size()) != in_dim)
      throw DimensionMismatchError("disc_scores: signal size mismatch");
    scores[0] = mlp_forward(disc.net, x, caches ? &(*caches)[0] : nullptr)[0];
    return scores;
  }
  if (static_cast<int>(x.size()) != disc.img_h * disc.img_w)
    throw DimensionMismatchError("disc_scores: image size mismatch");
  for (size_t k = 0; k < disc.offsets.size(); ++k) {
    const Vec p = extract_patch(x, disc.img_w, disc.offsets[k].first, disc.offsets[k].second,
                                disc.patch);
    scores[k] = mlp_forward(disc.net, p, caches ? &(*caches)[k] : nullptr)[0];
  }
  return scores;
}

std::pair<double, double> adversarial_losses(const Discriminator& disc, const Vec& real,
                                             const Vec& fake) {
  if (real.size() != fake.size()) throw ShapeMismatchError("adversarial_losses: shape mismatch");
  const Vec sr = disc_scores(disc, real);
  const Vec sf = disc_scores(disc, fake);
  double d_loss = 0.0, g_loss = 0.0;
  for (size_t k = 0; k < sr.size(); ++k) {
    d_loss += std::max(0.0, 1.0 - sr[k]) + std::max(0.0, 1.0 + sf[k]);
    g_loss += -sf[k];
  }
  d_loss /= static_cast<double>(sr.size());
  g_loss /= static_cast<double>(sf.size());
  if (!std::isfinite(d_loss) || !std::isfinite(g_loss))
    throw NonFiniteError("adversarial_losses: non-finite loss");
  return {d_loss, g_loss};
}

double disc_loss_backward(const Discriminator& disc, const Vec& real, const Vec& fake,
                          GradientTape& tape) {
  if (real.size() != fake.size()) throw ShapeMismatchError("disc_loss_backward: shape mismatch");
  std::vector<MlpCache> caches_r, caches_f;
  const Vec sr = disc_scores(disc, real, &caches_r);
  const Vec sf = disc_scores(disc, fake, &caches_f);
  const double P = static_cast<double>(sr.size());
  double loss = 0.0;
  for (size_t k = 0; k < sr.size(); ++k) {
    loss += std::max(0.0, 1.0 - sr[k]) + std::max(0.0, 1.0 + sf[k]);
    if (1.0 - sr[k] > 0.0) mlp_backward(disc.net, caches_r[k], {-1.0 / P}, tape);
    if (1.0 + sf[k] > 0.0) mlp_backward(disc.net, caches_f[k], {+1.0 / P}, tape);
  }
  loss /= P;
  if (!std::isfinite(loss)) throw NonFiniteError("disc_loss_backward: non-finite loss");
  return loss;
}

double gen_loss_backward(const Discriminator& disc, const Vec& fake, Vec& d_fake) {
  if (d_fake.size() != fake.size())
    throw ShapeMismatchError("gen_loss_backward: gradient buffer shape mismatch");
  std::vector<MlpCache> caches;
  const Vec sf = disc_scores(disc, fake, &caches);
  const double P = static_cast<double>(sf.size());
  GradientTape scratch = make_tape(disc.net);
  double loss = 0.0;
  for (size_t k = 0; k < sf.size(); ++k) {
    loss += -sf[k];
    const Vec dp = mlp_backward(disc.net, caches[k], {-1.0 / P}, scratch);
    if (disc.patch == 0) {
      for (size_t i = 0; i < d_fake.size(); ++i) d_fake[i] += dp[i];
    } else {
      scatter_patch(d_fake, dp, disc.img_w, disc.offsets[k].first, disc.offsets[k].second,
                    disc.patch);
    }
  }
  loss /= P;
  if (!std::isfinite(loss)) throw NonFiniteError("gen_loss_backward: non-finite loss");
  return loss;
}

}  // namespace ccsr
