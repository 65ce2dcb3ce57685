#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ccsr/io.hpp"
#include "doctest.h"

using namespace ccsr;

namespace {

std::string tmp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / ("ccsr_io_" + leaf);
  std::filesystem::remove_all(dir);
  ensure_dir(dir.string());
  return dir.string();
}

}  // namespace

TEST_CASE("pgm round trip quantizes to the stated depth") {
  const std::string dir = tmp_dir("pgm");
  Rng rng(11);
  Image img(5, 9);
  for (auto& v : img.v) v = rng.uniform();

  write_pgm(dir + "/a8.pgm", img, 255);
  const Image r8 = read_pgm(dir + "/a8.pgm");
  CHECK(r8.h == 5);
  CHECK(r8.w == 9);
  for (size_t i = 0; i < img.v.size(); ++i)
    CHECK(std::abs(r8.v[i] - img.v[i]) <= 0.5 / 255 + 1e-12);

  write_pgm(dir + "/a16.pgm", img, 65535);
  const Image r16 = read_pgm(dir + "/a16.pgm");
  for (size_t i = 0; i < img.v.size(); ++i)
    CHECK(std::abs(r16.v[i] - img.v[i]) <= 0.5 / 65535 + 1e-12);

  // Writing a quantized image back is exact, so the bytes stabilize.
  write_pgm(dir + "/b8.pgm", r8, 255);
  CHECK(read_text_file(dir + "/a8.pgm") == read_text_file(dir + "/b8.pgm"));
}

TEST_CASE("pgm writer clamps and validates") {
  const std::string dir = tmp_dir("pgmv");
  Image img(1, 3);
  img.v = {-0.5, 0.5, 1.5};
  write_pgm(dir + "/c.pgm", img);
  const Image r = read_pgm(dir + "/c.pgm");
  CHECK(r.v[0] == 0.0);
  CHECK(r.v[2] == 1.0);
  CHECK_THROWS_AS(write_pgm(dir + "/d.pgm", img, 512), InvalidRangeError);
}

TEST_CASE("pgm reader handles comments and rejects junk") {
  const std::string dir = tmp_dir("pgmr");
  std::string body = "P5\n# a comment line\n2 2\n255\n";
  body += std::string("\x10\x20\x30\x40", 4);
  write_text_file(dir + "/ok.pgm", body);
  const Image r = read_pgm(dir + "/ok.pgm");
  CHECK(r.h == 2);
  CHECK(r.v[0] == doctest::Approx(0x10 / 255.0));

  write_text_file(dir + "/ascii.pgm", "P2\n2 2\n255\n0 1 2 3\n");
  CHECK_THROWS_AS(read_pgm(dir + "/ascii.pgm"), IoError);
  write_text_file(dir + "/short.pgm", "P5\n4 4\n255\nxy");
  CHECK_THROWS_AS(read_pgm(dir + "/short.pgm"), IoError);
  CHECK_THROWS_AS(read_pgm(dir + "/absent.pgm"), IoError);
}

TEST_CASE("tensor files round trip through float32") {
  const std::string dir = tmp_dir("tensor");
  Rng rng(3);
  Vec data = rng.normal_vec(12);

  write_tensor(dir + "/v.bin", data, 12);
  const Tensor t1 = read_tensor(dir + "/v.bin");
  CHECK(t1.rank == 1);
  CHECK(t1.d0 == 12);
  for (size_t i = 0; i < data.size(); ++i)
    CHECK(t1.data[i] == static_cast<double>(static_cast<float>(data[i])));

  write_tensor(dir + "/m.bin", data, 3, 4);
  const Tensor t2 = read_tensor(dir + "/m.bin");
  CHECK(t2.rank == 2);
  CHECK(t2.d0 == 3);
  CHECK(t2.d1 == 4);
  CHECK(t2.data == t1.data);
}

TEST_CASE("tensor reader validates header fields") {
  const std::string dir = tmp_dir("tensorv");
  Vec data{1.0, 2.0};
  CHECK_THROWS_AS(write_tensor(dir + "/bad.bin", data, 3), ShapeMismatchError);
  CHECK_THROWS_AS(write_tensor(dir + "/bad.bin", data, 2, 3), ShapeMismatchError);

  write_text_file(dir + "/magic.bin", std::string("XXXX") + std::string(12, '\0'));
  CHECK_THROWS_AS(read_tensor(dir + "/magic.bin"), IoError);
  write_text_file(dir + "/trunc.bin", "CC");
  CHECK_THROWS_AS(read_tensor(dir + "/trunc.bin"), IoError);
  write_text_file(dir + "/rank.bin", std::string("CCT1") + '\x03' + std::string(11, '\0'));
  CHECK_THROWS_AS(read_tensor(dir + "/rank.bin"), IoError);
}

TEST_CASE("csv writer emits LF rows with nine significant digits") {
  const std::string dir = tmp_dir("csv");
  CsvWriter csv(dir + "/t.csv", {"step", "loss"});
  csv.row({"1", CsvWriter::num(1.0 / 3.0)});
  csv.row({"2", CsvWriter::num(2.0)});
  CHECK_THROWS_AS(csv.row({"lonely"}), ShapeMismatchError);
  csv.close();
  CHECK(read_text_file(dir + "/t.csv") == "step,loss\n1,0.333333333\n2,2\n");
}

TEST_CASE("text helpers and directory creation") {
  const std::string dir = tmp_dir("txt");
  CHECK(!file_exists(dir + "/x/y/z.txt"));
  ensure_dir(dir + "/x/y");
  write_text_file(dir + "/x/y/z.txt", "hello\n");
  CHECK(file_exists(dir + "/x/y/z.txt"));
  CHECK(read_text_file(dir + "/x/y/z.txt") == "hello\n");
  CHECK_THROWS_AS(read_text_file(dir + "/nope.txt"), IoError);
}

TEST_CASE("mlp checkpoints restore architecture and quantized weights") {
  const std::string dir = tmp_dir("mlp");
  Rng rng(21);
  const Mlp net = make_mlp({4, 7, 2}, Activation::kSilu, rng);
  save_mlp(dir, "net", net);
  const Mlp back = load_mlp(dir, "net");

  REQUIRE(back.layers.size() == net.layers.size());
  CHECK(back.layers[0].act == Activation::kSilu);
  CHECK(back.layers[1].act == Activation::kIdentity);
  CHECK(back.in_dim() == 4);
  CHECK(back.out_dim() == 2);
  for (size_t l = 0; l < net.layers.size(); ++l)
    for (size_t i = 0; i < net.layers[l].weights.size(); ++i)
      CHECK(back.layers[l].weights[i] ==
            static_cast<double>(static_cast<float>(net.layers[l].weights[i])));

  // Stored form is a fixed point: loading twice gives bit-identical params.
  save_mlp(dir, "net2", back);
  const Mlp again = load_mlp(dir, "net2");
  CHECK(param_checksum(again) == param_checksum(back));

  CHECK_THROWS_AS(load_mlp(dir, "ghost"), MissingDependencyError);
}

TEST_CASE("denoiser checkpoint round trip preserves the forward map") {
  const std::string dir = tmp_dir("den");
  Rng rng(5);
  const DenoiserNet net = make_denoiser(3, 3, 8, 16, 45, rng);
  save_denoiser(dir, net);
  const DenoiserNet back = load_denoiser(dir);
  CHECK(back.x_dim == 3);
  CHECK(back.cond_dim == 3);
  CHECK(back.time_dim == 8);
  CHECK(back.T == 45);

  Rng xr(6);
  const Vec x = xr.normal_vec(3), c = xr.normal_vec(3);
  const Vec y0 = denoiser_forward(net, x, 17, c);
  const Vec y1 = denoiser_forward(back, x, 17, c);
  for (int i = 0; i < 3; ++i) CHECK(y1[i] == doctest::Approx(y0[i]).epsilon(1e-5));

  CHECK_THROWS_AS(load_denoiser(dir + "/empty"), MissingDependencyError);
}

TEST_CASE("autoencoder checkpoints cover identity and mlp variants") {
  const std::string dir = tmp_dir("ae");
  const AutoEncoder id = make_identity_autoencoder(6);
  save_autoencoder(dir + "/id", id);
  const AutoEncoder id_back = load_autoencoder(dir + "/id");
  CHECK(id_back.identity);
  Rng rng(8);
  const Vec x = rng.uniform_vec(6, 0.0, 1.0);
  CHECK(decode(id_back, encode_mean(id_back, x)) == x);

  Rng wr(9);
  const AutoEncoder ae = make_autoencoder(6, 2, 10, wr);
  save_autoencoder(dir + "/vae", ae);
  const AutoEncoder back = load_autoencoder(dir + "/vae");
  CHECK(!back.identity);
  CHECK(back.signal_dim == 6);
  CHECK(back.latent_dim == 2);
  const Vec z0 = encode_mean(ae, x), z1 = encode_mean(back, x);
  for (int i = 0; i < 2; ++i) CHECK(z1[i] == doctest::Approx(z0[i]).epsilon(1e-5));

  CHECK_THROWS_AS(load_autoencoder(dir), MissingDependencyError);
}

TEST_CASE("discriminator checkpoints keep patch geometry") {
  const std::string dir = tmp_dir("disc");
  Rng rng(13);
  const Discriminator disc = make_patch_discriminator(16, 16, 8, 4, 12, rng);
  save_discriminator(dir, disc);
  const Discriminator back = load_discriminator(dir);
  CHECK(back.patch == 8);
  CHECK(back.img_h == 16);
  CHECK(back.img_w == 16);
  CHECK(back.offsets == disc.offsets);

  Rng xr(14);
  const Vec img = xr.uniform_vec(256, 0.0, 1.0);
  const Vec s0 = disc_scores(disc, img);
  const Vec s1 = disc_scores(back, img);
  REQUIRE(s1.size() == s0.size());
  for (size_t i = 0; i < s0.size(); ++i) CHECK(s1[i] == doctest::Approx(s0[i]).epsilon(1e-5));

  CHECK_THROWS_AS(load_discriminator(dir + "/void"), MissingDependencyError);
}
