#pragma once

#include <fstream>
#include <string>

#include "ccsr/common.hpp"
#include "ccsr/latent.hpp"
#include "ccsr/nn.hpp"

namespace ccsr {

// Binary PGM (P5). maxval 255 writes one byte per sample, 65535 two bytes
// big-endian per the format. Values are clamped to [0,1] and scaled.
void write_pgm(const std::string& path, const Image& img, int maxval = 255);
Image read_pgm(const std::string& path);

// Raw tensor file: 16-byte header of four little-endian u32 fields
// (magic "CCT1", rank 1 or 2, d0, d1) followed by float32 little-endian data.
struct Tensor {
  int rank = 1;
  int d0 = 0;
  int d1 = 1;
  Vec data;
};

void write_tensor(const std::string& path, const Vec& data, int d0, int d1 = 0);
Tensor read_tensor(const std::string& path);

// CSV with a header row, LF line endings, 9-significant-digit numbers.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void close();

  static std::string num(double x) { return format_sig9(x); }

 private:
  std::ofstream out_;
  size_t n_cols_ = 0;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
bool file_exists(const std::string& path);
void ensure_dir(const std::string& path);

// Checkpoints: <dir>/<name>.json manifest plus one raw tensor per layer
// block. Weights are stored as float32, so a save/load round trip quantizes
// parameters; checksums are taken after loading.
void save_mlp(const std::string& dir, const std::string& name, const Mlp& net);
Mlp load_mlp(const std::string& dir, const std::string& name);

void save_denoiser(const std::string& dir, const DenoiserNet& net);
DenoiserNet load_denoiser(const std::string& dir);

void save_autoencoder(const std::string& dir, const AutoEncoder& ae);
AutoEncoder load_autoencoder(const std::string& dir);

void save_discriminator(const std::string& dir, const Discriminator& disc);
Discriminator load_discriminator(const std::string& dir);

}  // namespace ccsr
