#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "diskcover/io.hpp"
#include "diskcover/projection.hpp"

using namespace diskcover;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(std::string_view bytes) {
  try {
    parse_pgm(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::Usage;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("diskcover_io_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(Pgm, DiagonalMask) {
  const std::string bytes = std::string("P5\n2 2\n255\n") + std::string("\xff\x00\x00\xff", 4);
  const BinaryMask m = decode_mask_pgm(bytes);
  EXPECT_EQ(m, BinaryMask(2, 2, {1, 0, 0, 1}));
}

TEST(Pgm, ThresholdAt127) {
  const std::string bytes = std::string("P5 3 1 255 ") + std::string("\x7f\x80\x00", 3);
  EXPECT_EQ(decode_mask_pgm(bytes), BinaryMask(3, 1, {0, 1, 0}));
}

TEST(Pgm, HeaderComments) {
  const std::string bytes = std::string("P5\n# made by hand\n2 1\n255\n") + std::string("\xff\x00", 2);
  EXPECT_EQ(decode_mask_pgm(bytes), BinaryMask(2, 1, {1, 0}));
}

TEST(Pgm, DistinctParseErrors) {
  EXPECT_EQ(code_of("P2\n2 2\n255\n0 0 0 0\n"), ErrorCode::UnsupportedVariant);
  EXPECT_EQ(code_of("GIF89a"), ErrorCode::BadMagic);
  EXPECT_EQ(code_of(std::string("P5\n4 4\n255\n") + std::string(15, '\0')), ErrorCode::Truncated);
  EXPECT_EQ(code_of(std::string("P5\n2 2\n65535\n") + std::string(8, '\0')), ErrorCode::BadMaxval);
  EXPECT_EQ(code_of(std::string("P5\n2 2\n255\n") + std::string(5, '\0')), ErrorCode::TrailingData);
  EXPECT_EQ(code_of("P5\n2 x\n255\n"), ErrorCode::BadHeader);
  EXPECT_EQ(code_of("P5\n0 2\n255\n"), ErrorCode::BadHeader);
}

TEST(Pgm, MaskRoundTrip) {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution b(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40);
    const int h = 1 + static_cast<int>(rng() % 40);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
    for (auto& v : bits) v = b(rng);
    const BinaryMask m(w, h, bits);
    EXPECT_EQ(decode_mask_pgm(encode_mask_pgm(m)), m);
  }
}

TEST(Pgm, FieldBytes) {
  const std::string bytes = encode_field_pgm(ScalarField(3, 1, {1.0, 0.0, 50.0}));
  const std::string payload = bytes.substr(bytes.size() - 3);
  EXPECT_EQ(static_cast<unsigned char>(payload[0]), 194);
  EXPECT_EQ(static_cast<unsigned char>(payload[1]), 0);
  EXPECT_EQ(static_cast<unsigned char>(payload[2]), 255);
}

TEST(Pgm, SingleByteHeaderCorruptionNeverYieldsWrongMask) {
  const BinaryMask original(5, 3, {1, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1, 1, 0, 0, 1});
  const std::string clean = encode_mask_pgm(original);
  const std::size_t header = clean.size() - original.size();
  for (std::size_t pos = 0; pos < header; ++pos) {
    for (int v = 0; v < 256; ++v) {
      if (static_cast<unsigned char>(clean[pos]) == v) continue;
      std::string bad = clean;
      bad[pos] = static_cast<char>(v);
      try {
        EXPECT_EQ(decode_mask_pgm(bad), original) << "byte " << pos << " -> " << v;
      } catch (const Error&) {
      }
    }
  }
}

TEST(Files, WriteAndReadBack) {
  TempDir dir;
  const BinaryMask m(3, 2, {1, 1, 0, 0, 1, 0});
  write_mask_pgm(m, dir.path() / "m.pgm");
  EXPECT_EQ(read_mask_pgm(dir.path() / "m.pgm"), m);
  EXPECT_FALSE(fs::exists(dir.path() / "m.pgm.tmp"));
  try {
    read_mask_pgm(dir.path() / "missing.pgm");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("missing.pgm"), std::string::npos);
  }
  EXPECT_THROW(write_mask_pgm(m, dir.path() / "no" / "such" / "dir.pgm"), Error);
}

TEST(DiskSetJson, SingleDisk) {
  const DiskSet d({{1.5, 2.25}}, {3.0}, {0});
  EXPECT_EQ(diskset_to_json(d), R"({"n":1,"m":1,"assoc":[1],"centers":[[1.5,2.25]],"sigmas":[3]}
)");
}

TEST(DiskSetJson, RoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100.0, 200.0);
  std::uniform_real_distribution<double> us(0.01, 40.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    const int m = 1 + static_cast<int>(rng() % n);
    std::vector<Point> c;
    for (int i = 0; i < n; ++i) c.push_back({u(rng), u(rng)});
    std::vector<double> s;
    for (int j = 0; j < m; ++j) s.push_back(us(rng));
    const DiskSet d(c, s, make_assoc(n, m, assoc_kind_for(n, m)));
    EXPECT_EQ(diskset_from_json(diskset_to_json(d)), d);
  }
}

TEST(DiskSetJson, ErrorsNameTheField) {
  const auto fails_on = [](const std::string& text, ErrorCode code, const std::string& field) {
    try {
      diskset_from_json(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << text;
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  fails_on(R"({"n":1,"m":0,"assoc":[1],"centers":[[0,0]],"sigmas":[]})", ErrorCode::InvalidArgument, "\"m\"");
  fails_on(R"({"n":1,"m":1,"assoc":[1],"centers":[[0,0]]})", ErrorCode::Schema, "\"sigmas\"");
  fails_on(R"({"n":1,"m":1,"assoc":[1],"centers":[[0]],"sigmas":[1]})", ErrorCode::Schema, "\"centers\"");
  fails_on(R"({"n":2,"m":1,"assoc":[1],"centers":[[0,0]],"sigmas":[1]})", ErrorCode::Schema, "\"assoc\"");
  fails_on(R"({"n":1,"m":1,"assoc":[2],"centers":[[0,0]],"sigmas":[1]})", ErrorCode::Schema, "\"assoc\"");
  fails_on("[1,2]", ErrorCode::Schema, "object");
  fails_on("{", ErrorCode::Schema, "JSON");
}

TEST(Overlay, EmptyListCopiesBackground) {
  const GrayImage bg{2, 1, {10, 200}};
  const std::string ppm = encode_overlay_ppm(bg, {});
  EXPECT_EQ(ppm, std::string("P6\n2 1\n255\n") + std::string("\x0a\x0a\x0a\xc8\xc8\xc8", 6));
}

TEST(Overlay, FullFrameMaskBlendsPaletteZero) {
  const GrayImage bg{1, 1, {100}};
  const BinaryMask full(1, 1, {1});
  const std::string ppm = encode_overlay_ppm(bg, {{full, 0}});
  const std::string px = ppm.substr(ppm.size() - 3);
  for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(static_cast<unsigned char>(px[ch]), (100 + kPalette[0][ch] + 1) / 2);
}

TEST(Overlay, LaterMaskWins) {
  const BinaryMask a(2, 1, {1, 1});
  const BinaryMask b(2, 1, {0, 1});
  const std::string ppm = encode_overlay_ppm(std::nullopt, {{a, 1}, {b, 10}});
  const std::string px = ppm.substr(ppm.size() - 6);
  for (int ch = 0; ch < 3; ++ch) {
    EXPECT_EQ(static_cast<unsigned char>(px[ch]), (kPalette[1][ch] + 1) / 2);
    EXPECT_EQ(static_cast<unsigned char>(px[3 + ch]), (kPalette[2][ch] + 1) / 2);
  }
  EXPECT_THROW(encode_overlay_ppm(std::nullopt, {{a, 0}, {BinaryMask(3, 1), 0}}), Error);
}

TEST(Corpus, NameParsing) {
  const auto e = parse_corpus_name("frankfurt_000_12_3_4.pgm");
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->image, "frankfurt_000_12");
  EXPECT_EQ(e->instance, 3);
  EXPECT_EQ(e->category, 4);
  EXPECT_FALSE(parse_corpus_name("a_b.pgm"));
  EXPECT_FALSE(parse_corpus_name("a_1_x.pgm"));
  EXPECT_FALSE(parse_corpus_name("a_1_2.png"));
}

TEST(Corpus, DirectoryScanAndManifest) {
  TempDir dir;
  const BinaryMask m(2, 2, {1, 0, 0, 0});
  write_mask_pgm(m, dir.path() / "img_1_2.pgm");
  write_mask_pgm(m, dir.path() / "img_0_5.pgm");
  write_file_atomic(dir.path() / "notes.txt", "x");
  auto entries = list_corpus(dir.path());
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].file.filename(), "img_0_5.pgm");
  EXPECT_EQ(entries[1].category, 2);

  write_file_atomic(dir.path() / "suite.json", corpus_manifest_json({entries[1]}));
  entries = list_corpus(dir.path());
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].file.filename(), "img_1_2.pgm");

  write_file_atomic(dir.path() / "suite.json", R"({"entries":[{"file":"gone_0_0.pgm","category":0}]})");
  EXPECT_THROW(list_corpus(dir.path()), Error);
  write_file_atomic(dir.path() / "suite.json", R"({"entries":[{"file":"img_1_2.pgm","category":-1}]})");
  EXPECT_THROW(list_corpus(dir.path()), Error);
}
