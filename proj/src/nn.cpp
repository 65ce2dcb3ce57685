#include "ccsr/nn.hpp"

#include <cmath>

namespace ccsr {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double apply_act(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kSilu: return x * sigmoid(x);
  }
  throw InvalidRangeError("apply_act: unknown activation");
}

double act_derivative(Activation a, double x) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kSilu: {
      const double s = sigmoid(x);
      return s * (1.0 + x * (1.0 - s));
    }
  }
  throw InvalidRangeError("act_derivative: unknown activation");
}

}  // namespace

const char* activation_name(Activation a) {
  return a == Activation::kSilu ? "silu" : "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "silu") return Activation::kSilu;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation name: " + name);
}

size_t Mlp::param_count() const {
  size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

Mlp make_mlp(const std::vector<int>& dims, Activation hidden_act, Rng& rng) {
  if (dims.size() < 2) throw DimensionMismatchError("make_mlp: need at least input and output dims");
  Mlp net;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] <= 0 || dims[i + 1] <= 0)
      throw DimensionMismatchError("make_mlp: non-positive layer dimension");
    DenseLayer l;
    l.in_dim = dims[i];
    l.out_dim = dims[i + 1];
    l.act = (i + 2 == dims.size()) ? Activation::kIdentity : hidden_act;
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
    l.weights = rng.uniform_vec(static_cast<size_t>(l.out_dim) * l.in_dim, -bound, bound);
    l.bias = rng.uniform_vec(static_cast<size_t>(l.out_dim), -bound, bound);
    net.layers.push_back(std::move(l));
  }
  return net;
}

Vec mlp_forward(const Mlp& net, const Vec& in, MlpCache* cache) {
  if (net.layers.empty()) throw DimensionMismatchError("mlp_forward: empty network");
  if (static_cast<int>(in.size()) != net.in_dim())
    throw DimensionMismatchError("mlp_forward: input size " + std::to_string(in.size()) +
                                 " != " + std::to_string(net.in_dim()));
  if (cache) {
    cache->input = in;
    cache->pre.clear();
    cache->post.clear();
  }
  Vec a = in;
  for (const auto& l : net.layers) {
    Vec z(l.out_dim);
    for (int r = 0; r < l.out_dim; ++r) {
      const double* wrow = &l.weights[static_cast<size_t>(r) * l.in_dim];
      double s = l.bias[r];
      for (int c = 0; c < l.in_dim; ++c) s += wrow[c] * a[c];
      z[r] = s;
    }
    Vec out(l.out_dim);
    for (int r = 0; r < l.out_dim; ++r) out[r] = apply_act(l.act, z[r]);
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->post.push_back(out);
    }
    a = std::move(out);
  }
  return a;
}

void GradientTape::scale(double s) {
  for (auto& w : d_weights)
    for (auto& x : w) x *= s;
  for (auto& b : d_bias)
    for (auto& x : b) x *= s;
}

void GradientTape::add_scaled(const GradientTape& other, double s) {
  if (d_weights.size() != other.d_weights.size())
    throw ShapeMismatchError("GradientTape::add_scaled: layer count mismatch");
  for (size_t l = 0; l < d_weights.size(); ++l) {
    if (d_weights[l].size() != other.d_weights[l].size() ||
        d_bias[l].size() != other.d_bias[l].size())
      throw ShapeMismatchError("GradientTape::add_scaled: layer shape mismatch");
    for (size_t i = 0; i < d_weights[l].size(); ++i) d_weights[l][i] += s * other.d_weights[l][i];
    for (size_t i = 0; i < d_bias[l].size(); ++i) d_bias[l][i] += s * other.d_bias[l][i];
  }
}

GradientTape make_tape(const Mlp& net) {
  GradientTape t;
  for (const auto& l : net.layers) {
    t.d_weights.emplace_back(l.weights.size(), 0.0);
    t.d_bias.emplace_back(l.bias.size(), 0.0);
  }
  return t;
}

Vec mlp_backward(const Mlp& net, const MlpCache& cache, const Vec& d_out, GradientTape& tape) {
  const size_t L = net.layers.size();
  if (cache.pre.size() != L || cache.post.size() != L ||
      static_cast<int>(cache.input.size()) != net.in_dim())
    throw StaleCacheError("mlp_backward: cache does not match network structure");
  for (size_t l = 0; l < L; ++l)
    if (static_cast<int>(cache.pre[l].size()) != net.layers[l].out_dim)
      throw StaleCacheError("mlp_backward: cached layer width mismatch");
  if (static_cast<int>(d_out.size()) != net.out_dim())
    throw ShapeMismatchError("mlp_backward: output gradient size mismatch");
  if (tape.d_weights.size() != L)
    throw ShapeMismatchError("mlp_backward: tape layer count mismatch");

  Vec da = d_out;
  for (size_t li = L; li-- > 0;) {
    const DenseLayer& l = net.layers[li];
    const Vec& z = cache.pre[li];
    const Vec& a_prev = (li == 0) ? cache.input : cache.post[li - 1];

    Vec dz(l.out_dim);
    for (int r = 0; r < l.out_dim; ++r) dz[r] = da[r] * act_derivative(l.act, z[r]);

    Vec& dW = tape.d_weights[li];
    Vec& db = tape.d_bias[li];
    for (int r = 0; r < l.out_dim; ++r) {
      double* drow = &dW[static_cast<size_t>(r) * l.in_dim];
      for (int c = 0; c < l.in_dim; ++c) drow[c] += dz[r] * a_prev[c];
      db[r] += dz[r];
    }

    Vec da_prev(l.in_dim, 0.0);
    for (int r = 0; r < l.out_dim; ++r) {
      const double* wrow = &l.weights[static_cast<size_t>(r) * l.in_dim];
      for (int c = 0; c < l.in_dim; ++c) da_prev[c] += wrow[c] * dz[r];
    }
    da = std::move(da_prev);
  }
  return da;
}

Vec flatten_params(const Mlp& net) {
  Vec flat;
  flat.reserve(net.param_count());
  for (const auto& l : net.layers) {
    flat.insert(flat.end(), l.weights.begin(), l.weights.end());
    flat.insert(flat.end(), l.bias.begin(), l.bias.end());
  }
  return flat;
}

void unflatten_params(Mlp& net, const Vec& flat) {
  if (flat.size() != net.param_count())
    throw ShapeMismatchError("unflatten_params: parameter count mismatch");
  size_t off = 0;
  for (auto& l : net.layers) {
    std::copy(flat.begin() + off, flat.begin() + off + l.weights.size(), l.weights.begin());
    off += l.weights.size();
    std::copy(flat.begin() + off, flat.begin() + off + l.bias.size(), l.bias.begin());
    off += l.bias.size();
  }
}

std::uint64_t param_checksum(const Mlp& net) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& l : net.layers) {
    h = fnv1a_hash(l.weights, h);
    h = fnv1a_hash(l.bias, h);
  }
  return h;
}

AdamState make_adam(const Mlp& net, const AdamConfig& cfg) {
  AdamState st;
  st.cfg = cfg;
  for (const auto& l : net.layers) {
    st.m_w.emplace_back(l.weights.size(), 0.0);
    st.v_w.emplace_back(l.weights.size(), 0.0);
    st.m_b.emplace_back(l.bias.size(), 0.0);
    st.v_b.emplace_back(l.bias.size(), 0.0);
  }
  return st;
}

namespace {

void adam_update_block(Vec& p, const Vec& g, Vec& m, Vec& v, const AdamConfig& c,
                       double bc1, double bc2) {
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size())
    throw ShapeMismatchError("adam_step: parameter/gradient shape mismatch");
  for (size_t i = 0; i < p.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

}  // namespace

void adam_step(Mlp& net, const GradientTape& tape, AdamState& state) {
  if (tape.d_weights.size() != net.layers.size() || state.m_w.size() != net.layers.size())
    throw ShapeMismatchError("adam_step: layer count mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.cfg.beta2, static_cast<double>(state.step));
  for (size_t l = 0; l < net.layers.size(); ++l) {
    adam_update_block(net.layers[l].weights, tape.d_weights[l], state.m_w[l], state.v_w[l],
                      state.cfg, bc1, bc2);
    adam_update_block(net.layers[l].bias, tape.d_bias[l], state.m_b[l], state.v_b[l],
                      state.cfg, bc1, bc2);
  }
}

Vec time_embed(int t, int dim, int T) {
  if (dim <= 0 || dim % 2 != 0) throw InvalidRangeError("time_embed: dim must be even and positive");
  if (T < 1) throw InvalidRangeError("time_embed: T must be >= 1");
  if (t < 0 || t > T) throw TimestepRangeError("time_embed: t outside [0, T]");
  const int half = dim / 2;
  const double u = static_cast<double>(t) / T;
  Vec emb(dim);
  for (int k = 0; k < half; ++k) {
    const double omega = std::pow(1000.0, static_cast<double>(k) / half);
    emb[2 * k] = std::sin(omega * u);
    emb[2 * k + 1] = std::cos(omega * u);
  }
  return emb;
}

DenoiserNet make_denoiser(int x_dim, int cond_dim, int time_dim, int hidden, int T, Rng& rng) {
  if (x_dim <= 0 || cond_dim < 0 || hidden <= 0)
    throw DimensionMismatchError("make_denoiser: bad dimensions");
  if (time_dim <= 0 || time_dim % 2 != 0)
    throw InvalidRangeError("make_denoiser: time_dim must be even and positive");
  DenoiserNet net;
  net.x_dim = x_dim;
  net.cond_dim = cond_dim;
  net.time_dim = time_dim;
  net.T = T;
  net.mlp = make_mlp({x_dim + time_dim + cond_dim, hidden, hidden, x_dim}, Activation::kSilu, rng);
  return net;
}

Vec denoiser_forward(const DenoiserNet& net, const Vec& x_t, int t, const Vec& cond,
                     MlpCache* cache) {
  if (static_cast<int>(x_t.size()) != net.x_dim)
    throw DimensionMismatchError("denoiser_forward: x_t size mismatch");
  if (static_cast<int>(cond.size()) != net.cond_dim)
    throw DimensionMismatchError("denoiser_forward: condition size mismatch");
  Vec in;
  in.reserve(x_t.size() + net.time_dim + cond.size());
  in.insert(in.end(), x_t.begin(), x_t.end());
  const Vec emb = time_embed(t, net.time_dim, net.T);
  in.insert(in.end(), emb.begin(), emb.end());
  in.insert(in.end(), cond.begin(), cond.end());
  return mlp_forward(net.mlp, in, cache);
}

Vec denoiser_backward(const DenoiserNet& net, const MlpCache& cache, const Vec& d_out,
                      GradientTape& tape) {
  Vec d_in = mlp_backward(net.mlp, cache, d_out, tape);
  return Vec(d_in.begin(), d_in.begin() + net.x_dim);
}

}  // namespace ccsr
