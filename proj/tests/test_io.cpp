#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "sdc/io.hpp"

using namespace sdc;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sdc_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("PFM round trip is bit exact") {
  TempDir dir;
  std::mt19937 rng(3);
  std::uniform_real_distribution<float> dist(-100.0f, 100.0f);
  Grid<float> g(13, 7, 0.0f);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 13; ++x) g(x, y) = dist(rng);
  pfm_write(dir.file("t.pfm"), g);
  const Grid<float> back = pfm_read(dir.file("t.pfm"));
  CHECK(back == g);
}

TEST_CASE("hand-built little-endian PFM fixture") {
  TempDir dir;
  std::vector<uint8_t> bytes{'P', 'f', '\n', '3', ' ', '2', '\n',
                             '-', '1', '.', '0', '\n'};
  // Bottom row first: 1 2 3, then top row 4 5 6.
  const float values[6] = {1, 2, 3, 4, 5, 6};
  for (float v : values) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    bytes.push_back(static_cast<uint8_t>(bits));
    bytes.push_back(static_cast<uint8_t>(bits >> 8));
    bytes.push_back(static_cast<uint8_t>(bits >> 16));
    bytes.push_back(static_cast<uint8_t>(bits >> 24));
  }
  write_bytes(dir.file("fix.pfm"), bytes);
  const Grid<float> g = pfm_read(dir.file("fix.pfm"));
  REQUIRE(g.width() == 3);
  REQUIRE(g.height() == 2);
  CHECK(g(0, 1) == 1.0f);  // bottom-up storage
  CHECK(g(2, 1) == 3.0f);
  CHECK(g(0, 0) == 4.0f);
  CHECK(g(2, 0) == 6.0f);
}

TEST_CASE("big-endian PFM fixture is byte swapped") {
  TempDir dir;
  std::vector<uint8_t> bytes{'P', 'f', '\n', '1', ' ', '1', '\n',
                             '1', '.', '0', '\n'};
  const float v = 42.5f;
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  bytes.push_back(static_cast<uint8_t>(bits >> 24));
  bytes.push_back(static_cast<uint8_t>(bits >> 16));
  bytes.push_back(static_cast<uint8_t>(bits >> 8));
  bytes.push_back(static_cast<uint8_t>(bits));
  write_bytes(dir.file("be.pfm"), bytes);
  const Grid<float> g = pfm_read(dir.file("be.pfm"));
  CHECK(g(0, 0) == 42.5f);
}

TEST_CASE("PFM rejects bad inputs") {
  TempDir dir;
  Grid<float> g(2, 2, 1.0f);
  g(0, 0) = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(pfm_write(dir.file("inf.pfm"), g), FormatError);

  write_bytes(dir.file("trunc.pfm"), {'P', 'f', '\n', '4', ' ', '4', '\n',
                                      '-', '1', '\n', 1, 2, 3});
  CHECK_THROWS_AS(pfm_read(dir.file("trunc.pfm")), FormatError);
  write_bytes(dir.file("color.pfm"), {'P', 'F', '\n'});
  CHECK_THROWS_AS(pfm_read(dir.file("color.pfm")), FormatError);
  CHECK_THROWS_AS(pfm_read(dir.file("missing.pfm")), FormatError);
}

TEST_CASE("PFM depth adapters enforce density and positivity") {
  TempDir dir;
  InvDepthMap sparse(3, 3);
  sparse.set(0, 0, 0.5f);
  CHECK_THROWS_AS(pfm_write_inv_depth(dir.file("s.pfm"), sparse), FormatError);

  InvDepthMap dense(2, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) dense.set(x, y, 0.25f + 0.1f * x);
  pfm_write_inv_depth(dir.file("d.pfm"), dense);
  const InvDepthMap back = pfm_read_inv_depth(dir.file("d.pfm"));
  CHECK(back == dense);

  Grid<float> nonpositive(2, 2, -1.0f);
  pfm_write(dir.file("neg.pfm"), nonpositive);
  CHECK_THROWS_AS(pfm_read_inv_depth(dir.file("neg.pfm")), FormatError);
}

TEST_CASE("PGM round trip preserves quantized values") {
  TempDir dir;
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  Grid<float> g(11, 9, 0.0f);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 11; ++x) g(x, y) = dist(rng);
  const ImageGrid img(std::move(g));

  for (int maxval : {255, 65535}) {
    const std::string path = dir.file("t" + std::to_string(maxval) + ".pgm");
    pgm_write(path, img, maxval);
    const ImageGrid a = pgm_read(path);
    pgm_write(dir.file("round2.pgm"), a, maxval);
    const ImageGrid b = pgm_read(dir.file("round2.pgm"));
    CHECK(a == b);  // quantized values are a fixed point
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 11; ++x)
        CHECK(std::abs(a(x, y) - img(x, y)) <= 0.5f / maxval + 1e-7f);
  }
}

TEST_CASE("hand-built P5 fixture") {
  TempDir dir;
  write_bytes(dir.file("p5.pgm"),
              {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n',
               0, 51, 102, 255});
  const ImageGrid img = pgm_read(dir.file("p5.pgm"));
  CHECK(img(0, 0) == 0.0f);
  CHECK(img(1, 0) == doctest::Approx(51.0 / 255.0));
  CHECK(img(0, 1) == doctest::Approx(102.0 / 255.0));
  CHECK(img(1, 1) == 1.0f);
}

TEST_CASE("PGM header comments are tolerated") {
  TempDir dir;
  write_bytes(dir.file("c.pgm"), {'P', '5', '\n', '#', ' ', 'x', '\n', '1', ' ',
                                  '1', '\n', '2', '5', '5', '\n', 128});
  CHECK(pgm_read(dir.file("c.pgm"))(0, 0) == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("16-bit depth PNG round trip") {
  TempDir dir;
  InvDepthMap m(9, 6);
  m.set(0, 0, 1.0f);                   // depth 1 m -> stored 256
  m.set(1, 0, 1.0f / 85.33f);          // stored 21844
  m.set(8, 5, 1.0f / 200.0f);          // far point
  m.set(3, 2, 2.0f);                   // half a meter
  png16_depth_write(dir.file("d.png"), m);
  const InvDepthMap back = png16_depth_read(dir.file("d.png"));
  CHECK(back.valid_count() == 4);
  CHECK(*back.at(0, 0) == 1.0f);
  CHECK(1.0f / *back.at(1, 0) == doctest::Approx(85.328125).epsilon(1e-6));
  CHECK(back.empty_at(4, 4));
  // A second trip is lossless at the format precision.
  png16_depth_write(dir.file("d2.png"), back);
  const InvDepthMap again = png16_depth_read(dir.file("d2.png"));
  CHECK(again == back);
}

TEST_CASE("depth PNG range checks") {
  TempDir dir;
  InvDepthMap too_far(1, 1);
  too_far.set(0, 0, 1.0f / 300.0f);  // stored value would exceed 16 bits
  CHECK_THROWS_AS(png16_depth_write(dir.file("far.png"), too_far), FormatError);
}

TEST_CASE("PNG with the wrong bit depth is rejected") {
  TempDir dir;
  InvDepthMap m(2, 2);
  m.set(0, 0, 0.5f);
  png16_depth_write(dir.file("ok.png"), m);
  std::vector<uint8_t> bytes = read_bytes(dir.file("ok.png"));
  bytes[24] = 8;  // IHDR bit-depth field
  write_bytes(dir.file("bad.png"), bytes);
  CHECK_THROWS_AS(png16_depth_read(dir.file("bad.png")), FormatError);
}

TEST_CASE("PLY output") {
  TempDir dir;
  ply_write(dir.file("empty.ply"), {});
  const auto empty = read_bytes(dir.file("empty.ply"));
  const std::string empty_text(empty.begin(), empty.end());
  CHECK(empty_text.find("element vertex 0") != std::string::npos);

  PointCloud cloud{{1.0, 2.0, 3.0}, {-0.5, 0.0, 4.25}};
  std::vector<std::array<uint8_t, 3>> colors{{255, 0, 0}, {0, 255, 0}};
  ply_write(dir.file("c.ply"), cloud, &colors);
  const auto bytes = read_bytes(dir.file("c.ply"));
  const std::string text(bytes.begin(), bytes.end());
  CHECK(text.find("property uchar red") != std::string::npos);
  CHECK(text.find("1 2 3 255 0 0") != std::string::npos);
  CHECK(text.find("-0.5 0 4.25 0 255 0") != std::string::npos);

  std::vector<std::array<uint8_t, 3>> wrong{{1, 2, 3}};
  CHECK_THROWS_AS(ply_write(dir.file("w.ply"), cloud, &wrong), FormatError);
}

TEST_CASE("fuzzed malformed files fail with structured errors, never crash") {
  TempDir dir;
  // Seed corpus: one valid file per format.
  Grid<float> g(4, 3, 0.5f);
  pfm_write(dir.file("seed.pfm"), g);
  pgm_write(dir.file("seed.pgm"), ImageGrid(4, 3, 0.25f));
  InvDepthMap m(4, 3);
  m.set(1, 1, 0.5f);
  png16_depth_write(dir.file("seed.png"), m);

  std::mt19937 rng(99);
  const std::vector<std::string> seeds{dir.file("seed.pfm"), dir.file("seed.pgm"),
                                       dir.file("seed.png")};
  int structured = 0;
  for (int round = 0; round < 400; ++round) {
    std::vector<uint8_t> bytes = read_bytes(seeds[static_cast<size_t>(round) % 3]);
    const int mode = round % 4;
    if (mode == 0 && !bytes.empty()) {
      bytes.resize(rng() % bytes.size());  // truncate
    } else if (mode == 1) {
      for (int i = 0; i < 8; ++i)
        bytes[rng() % bytes.size()] = static_cast<uint8_t>(rng());
    } else if (mode == 2) {
      bytes.assign(rng() % 64, 0);
      for (auto& b : bytes) b = static_cast<uint8_t>(rng());
    } else {
      bytes.insert(bytes.begin() + static_cast<long>(rng() % bytes.size()),
                   static_cast<uint8_t>(rng()));
    }
    const std::string path = dir.file("fuzz.bin");
    write_bytes(path, bytes);
    try {
      (void)pfm_read(path);
    } catch (const Error&) {
      ++structured;
    }
    try {
      (void)pgm_read(path);
    } catch (const Error&) {
      ++structured;
    }
    try {
      (void)png16_depth_read(path);
    } catch (const Error&) {
      ++structured;
    }
  }
  CHECK(structured > 0);
}
