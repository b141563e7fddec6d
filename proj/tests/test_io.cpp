#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "patchwarp/error.hpp"
#include "patchwarp/fixtures.hpp"
#include "patchwarp/io.hpp"
#include "patchwarp/modulation.hpp"

using namespace patchwarp;
namespace fx = patchwarp::fixtures;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("patchwarp_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Png, RgbaRoundTripQuantizesTo8Bit) {
  const RasterImage img = fx::render_texture(fx::TextureKind::Stripes, 17, 9, 3);
  const RasterImage back = io::decode_png_rgba(io::encode_png_rgba(img));
  ASSERT_EQ(back.width(), 17);
  ASSERT_EQ(back.height(), 9);
  for (std::size_t i = 0; i < img.pixels().size(); ++i)
    for (int c = 0; c < 4; ++c) ASSERT_NEAR(back.pixels()[i][c], img.pixels()[i][c], 0.5 / 255 + 1e-6);
  // Second trip is exact.
  EXPECT_EQ(io::decode_png_rgba(io::encode_png_rgba(back)), back);
}

TEST(Png, MaskThresholdAndEncoding) {
  BinaryMask m = fx::random_mask(11, 7, 0.5, 1);
  EXPECT_EQ(io::decode_png_mask(io::encode_png_mask(m)), m);

  // Gray levels 127 and 128 straddle the threshold.
  RasterImage gray(2, 1);
  gray.at(0, 0) = {127 / 255.0f, 127 / 255.0f, 127 / 255.0f, 1};
  gray.at(1, 0) = {128 / 255.0f, 128 / 255.0f, 128 / 255.0f, 1};
  const BinaryMask t = io::decode_png_mask(io::encode_png_rgb(gray));
  EXPECT_EQ(t.at(0, 0), 0);
  EXPECT_EQ(t.at(1, 0), 1);
}

TEST(Png, GarbageIsParseError) {
  const io::Bytes junk = {1, 2, 3, 4, 5};
  EXPECT_EQ(code_of([&] { io::decode_png_rgba(junk); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([&] { io::read_png_rgba("/nonexistent/file.png"); }), ErrorCode::Io);
}

TEST(Png, IndexedPaletteRoundTrip) {
  Grid<std::uint8_t> idx(4, 2);
  for (int i = 0; i < 8; ++i) idx.values()[i] = static_cast<std::uint8_t>(i % 3);
  const std::array<io::Rgb8, 3> palette = {{{0, 0, 0}, {255, 0, 0}, {0, 255, 0}}};
  const RasterImage back = io::decode_png_rgba(io::encode_png_indexed(idx, palette));
  for (int i = 0; i < 8; ++i) {
    const auto& want = palette[idx.values()[i]];
    for (int c = 0; c < 3; ++c) EXPECT_EQ(std::lround(back.pixels()[i][c] * 255), want[c]);
  }
}

TEST(PoseJson, RoundTripAndUnknownJointsIgnored) {
  const PoseKeypoints p = fx::canonical_tpose();
  const PoseKeypoints back = io::parse_pose_json(io::pose_to_json(p));
  for (int i = 0; i < kJointCount; ++i) {
    const auto j = static_cast<Joint>(i);
    ASSERT_TRUE(back.get(j).has_value());
    EXPECT_EQ(back.get(j)->position, p.get(j)->position);
  }
  const PoseKeypoints q = io::parse_pose_json(
      R"({"format":"coco18","keypoints":{"l_eye":[1,2,0.9],"neck":[3,4,0.5]}})");
  EXPECT_TRUE(q.get(Joint::Neck).has_value());
  EXPECT_EQ(q.get(Joint::Neck)->confidence, 0.5);
  EXPECT_FALSE(q.get(Joint::Nose).has_value());
}

TEST(PoseJson, MalformedInputs) {
  for (const char* bad : {"not json", "[]", R"({"format":"body25","keypoints":{}})", R"({"format":"coco18"})",
                          R"({"keypoints":{"neck":[1,2]}})", R"({"keypoints":{"neck":[1,2,1.5]}})",
                          R"({"keypoints":{"neck":["a",2,1]}})"}) {
    EXPECT_EQ(code_of([&] { io::parse_pose_json(bad); }), ErrorCode::Parse) << bad;
  }
}

TEST(PoseJson, MissingFileNamesPath) {
  try {
    io::read_pose_json("/nonexistent/pose.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("/nonexistent/pose.json"), std::string::npos);
  }
}

TEST(ConvFile, RoundTripAndLayout) {
  const ConvParams p = random_conv_params(3, 2, 3, 7);
  const io::Bytes bytes = io::encode_conv_params(p);
  EXPECT_EQ(bytes.size(), 4u + 4 * 4 + 4 * (3 * 2 * 9 + 3) + 8);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PCNV");
  EXPECT_EQ(bytes[4], 1);  // version, little-endian
  EXPECT_EQ(bytes[8], 3);  // out channels
  EXPECT_EQ(io::decode_conv_params(bytes), p);
}

TEST(ConvFile, CorruptionDetected) {
  const io::Bytes good = io::encode_conv_params(random_conv_params(2, 2, 1, 1));
  io::Bytes flipped = good;
  flipped[30] ^= 0x40;
  EXPECT_EQ(code_of([&] { io::decode_conv_params(flipped); }), ErrorCode::Parse);
  io::Bytes truncated(good.begin(), good.end() - 3);
  EXPECT_EQ(code_of([&] { io::decode_conv_params(truncated); }), ErrorCode::Parse);
  io::Bytes magic = good;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { io::decode_conv_params(magic); }), ErrorCode::Parse);
}

TEST(ConvFile, Fnv1aKnownVectors) {
  EXPECT_EQ(io::fnv1a64({}), 0xcbf29ce484222325ULL);
  const io::Bytes a = {'a'};
  EXPECT_EQ(io::fnv1a64(a), 0xaf63dc4c8601ec8cULL);
}

TEST(Files, AtomicWriteLeavesNoTemporary) {
  const fs::path dir = scratch("atomic");
  io::write_file_atomic(dir / "x.txt", std::string_view("hello"));
  io::write_file_atomic(dir / "x.txt", std::string_view("world"));
  const io::Bytes b = io::read_file(dir / "x.txt");
  EXPECT_EQ(std::string(b.begin(), b.end()), "world");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1);
  EXPECT_THROW(io::write_file_atomic(dir / "missing" / "y.txt", std::string_view("z")), Error);
}
