#include "ccsr/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "json.hpp"

namespace ccsr {

namespace {

using nlohmann::json;

void write_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                        static_cast<unsigned char>((v >> 8) & 0xFF),
                        static_cast<unsigned char>((v >> 16) & 0xFF),
                        static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("tensor read: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

constexpr std::uint32_t kTensorMagic = 0x31544343;  // "CCT1" little-endian

}  // namespace

void write_pgm(const std::string& path, const Image& img, int maxval) {
  if (maxval != 255 && maxval != 65535) throw InvalidRangeError("write_pgm: maxval must be 255 or 65535");
  if (img.h < 1 || img.w < 1) throw InvalidRangeError("write_pgm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_pgm: cannot open " + path);
  out << "P5\n" << img.w << " " << img.h << "\n" << maxval << "\n";
  for (double v : img.v) {
    const long q = std::lround(clamp01(v) * maxval);
    if (maxval == 255) {
      const unsigned char b = static_cast<unsigned char>(q);
      out.write(reinterpret_cast<const char*>(&b), 1);
    } else {
      const unsigned char b[2] = {static_cast<unsigned char>((q >> 8) & 0xFF),
                                  static_cast<unsigned char>(q & 0xFF)};
      out.write(reinterpret_cast<const char*>(b), 2);
    }
  }
  if (!out) throw IoError("write_pgm: write failed for " + path);
}

namespace {

int next_pgm_token(std::istream& in) {
  // Skips whitespace and '#' comment lines, returns the next integer.
  while (true) {
    const int c = in.peek();
    if (c == EOF) throw IoError("read_pgm: unexpected end of header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    int value = 0;
    in >> value;
    if (!in) throw IoError("read_pgm: malformed header");
    return value;
  }
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_pgm: cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0).get(m1);
  if (m0 != 'P' || m1 != '5') throw IoError("read_pgm: not a binary PGM file: " + path);
  const int w = next_pgm_token(in);
  const int h = next_pgm_token(in);
  const int maxval = next_pgm_token(in);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw IoError("read_pgm: bad dimensions/maxval in " + path);
  in.get();  // single whitespace byte after maxval

  Image img(h, w);
  const size_t n = img.v.size();
  if (maxval <= 255) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in) throw IoError("read_pgm: truncated pixel data in " + path);
    for (size_t i = 0; i < n; ++i) img.v[i] = buf[i] / static_cast<double>(maxval);
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (!in) throw IoError("read_pgm: truncated pixel data in " + path);
    for (size_t i = 0; i < n; ++i) {
      const int v = (buf[2 * i] << 8) | buf[2 * i + 1];
      img.v[i] = v / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_tensor(const std::string& path, const Vec& data, int d0, int d1) {
  const int rank = d1 > 0 ? 2 : 1;
  const std::int64_t expect = rank == 2 ? static_cast<std::int64_t>(d0) * d1 : d0;
  if (d0 < 1 || (rank == 2 && d1 < 1) || expect != static_cast<std::int64_t>(data.size()))
    throw ShapeMismatchError("write_tensor: dims do not match data length");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_tensor: cannot open " + path);
  write_u32_le(out, kTensorMagic);
  write_u32_le(out, static_cast<std::uint32_t>(rank));
  write_u32_le(out, static_cast<std::uint32_t>(d0));
  write_u32_le(out, static_cast<std::uint32_t>(rank == 2 ? d1 : 1));
  for (double v : data) {
    const float f = static_cast<float>(v);
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(f));
    std::memcpy(&bits, &f, 4);
    write_u32_le(out, bits);
  }
  if (!out) throw IoError("write_tensor: write failed for " + path);
}

Tensor read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_tensor: cannot open " + path);
  if (read_u32_le(in) != kTensorMagic) throw IoError("read_tensor: bad magic in " + path);
  Tensor t;
  t.rank = static_cast<int>(read_u32_le(in));
  t.d0 = static_cast<int>(read_u32_le(in));
  t.d1 = static_cast<int>(read_u32_le(in));
  if (t.rank < 1 || t.rank > 2 || t.d0 < 1 || t.d1 < 1)
    throw IoError("read_tensor: bad header in " + path);
  const std::int64_t n = static_cast<std::int64_t>(t.d0) * (t.rank == 2 ? t.d1 : 1);
  t.data.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint32_t bits = read_u32_le(in);
    float f;
    std::memcpy(&f, &bits, 4);
    t.data[i] = f;
  }
  return t;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), n_cols_(header.size()) {
  if (!out_) throw IoError("CsvWriter: cannot open " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw ShapeMismatchError("CsvWriter: wrong column count");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("CsvWriter: close failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_text_file: cannot open " + path);
  out << content;
  if (!out) throw IoError("write_text_file: write failed for " + path);
}

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("ensure_dir: cannot create " + path + ": " + ec.message());
}

namespace {

json mlp_manifest(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers)
    layers.push_back({{"in", l.in_dim}, {"out", l.out_dim}, {"act", activation_name(l.act)}});
  return layers;
}

Mlp mlp_from_manifest(const json& layers, const std::string& dir, const std::string& name) {
  Mlp net;
  int idx = 0;
  for (const auto& lj : layers) {
    DenseLayer l;
    l.in_dim = lj.at("in").get<int>();
    l.out_dim = lj.at("out").get<int>();
    l.act = activation_from_name(lj.at("act").get<std::string>());
    const std::string base = dir + "/" + name + ".l" + std::to_string(idx);
    Tensor w = read_tensor(base + ".w.bin");
    Tensor b = read_tensor(base + ".b.bin");
    if (w.rank != 2 || w.d0 != l.out_dim || w.d1 != l.in_dim ||
        b.d0 != l.out_dim)
      throw IoError("load_mlp: tensor shape disagrees with manifest for " + base);
    l.weights = std::move(w.data);
    l.bias = std::move(b.data);
    net.layers.push_back(std::move(l));
    ++idx;
  }
  if (net.layers.empty()) throw IoError("load_mlp: manifest has no layers");
  return net;
}

void save_mlp_tensors(const std::string& dir, const std::string& name, const Mlp& net) {
  for (size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    const std::string base = dir + "/" + name + ".l" + std::to_string(i);
    write_tensor(base + ".w.bin", l.weights, l.out_dim, l.in_dim);
    write_tensor(base + ".b.bin", l.bias, l.out_dim);
  }
}

}  // namespace

void save_mlp(const std::string& dir, const std::string& name, const Mlp& net) {
  ensure_dir(dir);
  json j;
  j["layers"] = mlp_manifest(net);
  write_text_file(dir + "/" + name + ".json", j.dump(2) + "\n");
  save_mlp_tensors(dir, name, net);
}

Mlp load_mlp(const std::string& dir, const std::string& name) {
  const std::string mpath = dir + "/" + name + ".json";
  if (!file_exists(mpath)) throw MissingDependencyError("load_mlp: no manifest at " + mpath);
  const json j = json::parse(read_text_file(mpath));
  return mlp_from_manifest(j.at("layers"), dir, name);
}

void save_denoiser(const std::string& dir, const DenoiserNet& net) {
  ensure_dir(dir);
  json j;
  j["x_dim"] = net.x_dim;
  j["cond_dim"] = net.cond_dim;
  j["time_dim"] = net.time_dim;
  j["T"] = net.T;
  j["layers"] = mlp_manifest(net.mlp);
  write_text_file(dir + "/denoiser.json", j.dump(2) + "\n");
  save_mlp_tensors(dir, "denoiser", net.mlp);
}

DenoiserNet load_denoiser(const std::string& dir) {
  const std::string mpath = dir + "/denoiser.json";
  if (!file_exists(mpath))
    throw MissingDependencyError("load_denoiser: no checkpoint at " + mpath);
  const json j = json::parse(read_text_file(mpath));
  DenoiserNet net;
  net.x_dim = j.at("x_dim").get<int>();
  net.cond_dim = j.at("cond_dim").get<int>();
  net.time_dim = j.at("time_dim").get<int>();
  net.T = j.at("T").get<int>();
  net.mlp = mlp_from_manifest(j.at("layers"), dir, "denoiser");
  return net;
}

void save_autoencoder(const std::string& dir, const AutoEncoder& ae) {
  ensure_dir(dir);
  json j;
  j["identity"] = ae.identity;
  j["deterministic"] = ae.deterministic;
  j["signal_dim"] = ae.signal_dim;
  j["latent_dim"] = ae.latent_dim;
  if (!ae.identity) {
    j["encoder"] = mlp_manifest(ae.encoder);
    j["decoder"] = mlp_manifest(ae.decoder);
  }
  write_text_file(dir + "/autoencoder.json", j.dump(2) + "\n");
  if (!ae.identity) {
    save_mlp_tensors(dir, "encoder", ae.encoder);
    save_mlp_tensors(dir, "decoder", ae.decoder);
  }
}

AutoEncoder load_autoencoder(const std::string& dir) {
  const std::string mpath = dir + "/autoencoder.json";
  if (!file_exists(mpath))
    throw MissingDependencyError("load_autoencoder: no checkpoint at " + mpath);
  const json j = json::parse(read_text_file(mpath));
  AutoEncoder ae;
  ae.identity = j.at("identity").get<bool>();
  ae.deterministic = j.at("deterministic").get<bool>();
  ae.signal_dim = j.at("signal_dim").get<int>();
  ae.latent_dim = j.at("latent_dim").get<int>();
  if (!ae.identity) {
    ae.encoder = mlp_from_manifest(j.at("encoder"), dir, "encoder");
    ae.decoder = mlp_from_manifest(j.at("decoder"), dir, "decoder");
  }
  return ae;
}

void save_discriminator(const std::string& dir, const Discriminator& disc) {
  ensure_dir(dir);
  json j;
  j["patch"] = disc.patch;
  j["img_h"] = disc.img_h;
  j["img_w"] = disc.img_w;
  json offs = json::array();
  for (const auto& o : disc.offsets) offs.push_back({o.first, o.second});
  j["offsets"] = offs;
  j["layers"] = mlp_manifest(disc.net);
  write_text_file(dir + "/discriminator.json", j.dump(2) + "\n");
  save_mlp_tensors(dir, "discriminator", disc.net);
}

Discriminator load_discriminator(const std::string& dir) {
  const std::string mpath = dir + "/discriminator.json";
  if (!file_exists(mpath))
    throw MissingDependencyError("load_discriminator: no checkpoint at " + mpath);
  const json j = json::parse(read_text_file(mpath));
  Discriminator d;
  d.patch = j.at("patch").get<int>();
  d.img_h = j.at("img_h").get<int>();
  d.img_w = j.at("img_w").get<int>();
  for (const auto& o : j.at("offsets")) d.offsets.emplace_back(o[0].get<int>(), o[1].get<int>());
  d.net = mlp_from_manifest(j.at("layers"), dir, "discriminator");
  return d;
}

}  // namespace ccsr
