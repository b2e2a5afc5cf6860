#include <cmath>
#include <fstream>

#include "doctest.h"
#include "rppg/common.hpp"
#include "rppg/frames.hpp"
#include "support.hpp"

using namespace rppg;
using namespace rppg::frames;
using testing::code;
using testing::error_code_of;

namespace {

// Reference bilinear demosaic written pixel by pixel: every missing channel is
// the mean of the same-channel sites in the 3x3 neighbourhood, with indices
// mirrored about the edge pixel.
RgbFrame demosaic_oracle(const RawBayerFrame& raw) {
  auto refl = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * n - 2 - i : i); };
  RgbFrame out = RgbFrame::filled(raw.width, raw.height, 0, 0, 0);
  for (int y = 0; y < raw.height; ++y) {
    for (int x = 0; x < raw.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (cfa_channel(raw.layout, x, y) == c) {
          out.at(c, x, y) = raw.at(x, y);
          continue;
        }
        double sum = 0.0;
        int count = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            // Channel is decided by the virtual (unmirrored) position.
            if (cfa_channel(raw.layout, x + dx + 2, y + dy + 2) != c) continue;
            sum += raw.at(refl(x + dx, raw.width), refl(y + dy, raw.height));
            ++count;
          }
        }
        out.at(c, x, y) = static_cast<std::uint8_t>(std::lround(sum / count));
      }
    }
  }
  return out;
}

RawBayerFrame raw_from(int w, int h, CfaLayout layout, auto&& value) {
  RawBayerFrame raw{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h), layout};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) raw.samples[static_cast<std::size_t>(y) * w + x] = value(x, y);
  }
  return raw;
}

RgbFrame gradient_frame(int w, int h) {
  RgbFrame f = RgbFrame::filled(w, h, 0, 0, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      f.at(0, x, y) = static_cast<std::uint8_t>(x + 10 * y);
      f.at(1, x, y) = static_cast<std::uint8_t>(2 * x + y);
      f.at(2, x, y) = static_cast<std::uint8_t>(255 - x - y);
    }
  }
  return f;
}

constexpr CfaLayout kLayouts[] = {CfaLayout::kRggb, CfaLayout::kBggr, CfaLayout::kGrbg, CfaLayout::kGbrg};

}  // namespace

TEST_CASE("cfa layout parsing") {
  CHECK(parse_cfa("RGGB") == CfaLayout::kRggb);
  CHECK(parse_cfa("gbrg") == CfaLayout::kGbrg);
  for (auto l : kLayouts) CHECK(parse_cfa(to_string(l)) == l);
  CHECK(error_code_of([] { parse_cfa("rgbg"); }) == code(ErrorCode::kArgument));
  CHECK(cfa_channel(CfaLayout::kRggb, 0, 0) == kRed);
  CHECK(cfa_channel(CfaLayout::kRggb, 1, 1) == kBlue);
  CHECK(cfa_channel(CfaLayout::kGrbg, 1, 0) == kRed);
  CHECK(cfa_channel(CfaLayout::kGbrg, 0, 1) == kRed);
}

TEST_CASE("demosaic of a constant raw frame is constant") {
  for (auto layout : kLayouts) {
    const auto out = demosaic_bilinear(raw_from(8, 6, layout, [](int, int) { return 77; }));
    for (int c = 0; c < 3; ++c) {
      for (auto v : out.planes[c]) CHECK(v == 77);
    }
  }
}

TEST_CASE("demosaic of per-channel constants fills every plane") {
  const RawBayerFrame raw = raw_from(4, 4, CfaLayout::kRggb, [](int x, int y) {
    const auto ch = cfa_channel(CfaLayout::kRggb, x, y);
    return ch == kRed ? 100 : ch == kGreen ? 50 : 10;
  });
  const auto out = demosaic_bilinear(raw);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(out.at(kRed, x, y) == 100);
      CHECK(out.at(kGreen, x, y) == 50);
      CHECK(out.at(kBlue, x, y) == 10);
    }
  }
}

TEST_CASE("demosaic matches the scalar oracle") {
  SUBCASE("4x4 horizontal gradient") {
    const auto raw = raw_from(4, 4, CfaLayout::kRggb, [](int x, int) { return 20 + 30 * x; });
    CHECK(demosaic_bilinear(raw) == demosaic_oracle(raw));
  }
  SUBCASE("random content, every layout") {
    std::mt19937 rng(7);
    for (auto layout : kLayouts) {
      const auto raw = raw_from(10, 8, layout, [&](int, int) { return static_cast<int>(rng() % 256); });
      CHECK(demosaic_bilinear(raw) == demosaic_oracle(raw));
    }
  }
}

TEST_CASE("demosaic keeps sampled sites and rejects odd sizes") {
  const auto rgb = gradient_frame(12, 8);
  for (auto layout : kLayouts) {
    const auto raw = mosaic(rgb, layout);
    const auto out = demosaic_bilinear(raw);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 12; ++x) CHECK(out.at(cfa_channel(layout, x, y), x, y) == raw.at(x, y));
    }
  }
  CHECK(error_code_of([] { demosaic_bilinear(raw_from(5, 4, CfaLayout::kRggb, [](int, int) { return 0; })); }) ==
        code(ErrorCode::kDimension));
  CHECK(error_code_of([] { demosaic_bilinear(RawBayerFrame{}); }) == code(ErrorCode::kDimension));
}

TEST_CASE("downsample") {
  CHECK(downsample(RgbFrame::filled(1920, 1200, 1, 2, 3), 3).width == 640);
  CHECK(downsample(RgbFrame::filled(1920, 1200, 1, 2, 3), 3).height == 400);
  CHECK(downsample(RgbFrame::filled(10, 7, 9, 8, 7), 2) == RgbFrame::filled(5, 3, 9, 8, 7));

  RgbFrame block = RgbFrame::filled(3, 3, 0, 0, 0);
  const std::uint8_t values[] = {10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::copy(std::begin(values), std::end(values), block.planes[1].begin());
  const auto one = downsample(block, 3);
  CHECK(one.width == 1);
  CHECK(one.at(1, 0, 0) == 50);
  CHECK(downsample(block, 1) == block);
  CHECK(error_code_of([&] { downsample(block, 0); }) == code(ErrorCode::kArgument));
}

TEST_CASE("gray-world balance") {
  const auto gray = RgbFrame::filled(6, 4, 80, 80, 80);
  CHECK(gray_world_balance(gray) == gray);

  // Channel means (100, 50, 25): gray 58.333, gains 0.5833 / 1.1667 / 2.3333.
  const auto f = RgbFrame::filled(4, 4, 100, 50, 25);
  const auto out = gray_world_balance(f);
  const double gray_level = (100.0 + 50.0 + 25.0) / 3.0;
  CHECK(gray_level / 100.0 == doctest::Approx(0.5833).epsilon(1e-4));
  CHECK(gray_level / 50.0 == doctest::Approx(1.1667).epsilon(1e-4));
  CHECK(gray_level / 25.0 == doctest::Approx(2.3333).epsilon(1e-4));
  for (int c = 0; c < 3; ++c) {
    for (auto v : out.planes[c]) CHECK(v == 58);
  }
  CHECK(error_code_of([] { gray_world_balance(RgbFrame::filled(3, 3, 0, 0, 0)); }) == code(ErrorCode::kDegenerate));
}

TEST_CASE("crop_roi") {
  const auto f = gradient_frame(10, 8);
  CHECK(crop_roi(f, {0, 0, 10, 8}) == f);
  const auto px = crop_roi(f, {0, 0, 1, 1});
  for (int c = 0; c < 3; ++c) CHECK(px.at(c, 0, 0) == f.at(c, 0, 0));
  const auto sub = crop_roi(f, {2, 2, 4, 4});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(sub.at(0, x, y) == (x + 2) + 10 * (y + 2));
      CHECK(sub.at(2, x, y) == 255 - (x + 2) - (y + 2));
    }
  }
  CHECK(error_code_of([&] { crop_roi(f, {8, 0, 4, 4}); }) == code(ErrorCode::kBounds));
}

TEST_CASE("roi parsing") {
  CHECK(parse_roi("1,2,30,40") == Roi{1, 2, 30, 40});
  CHECK(parse_roi("1,2,30,40").to_string() == "1,2,30,40");
  CHECK(error_code_of([] { parse_roi("1,2,3"); }) == code(ErrorCode::kArgument));
  CHECK(error_code_of([] { parse_roi("1,2,0,4"); }) == code(ErrorCode::kArgument));
  CHECK(error_code_of([] { parse_roi("a,2,3,4"); }) != -1);
}

TEST_CASE("pnm encode/decode") {
  const auto f = gradient_frame(7, 5);
  CHECK(from_pnm(decode_pnm(encode_pnm(to_pnm(f)))) == f);
  const auto gray = RgbFrame::filled(3, 2, 9, 9, 9);
  const auto pgm = encode_pnm(to_pnm(gray, true));
  CHECK(pgm.substr(0, 2) == "P5");
  CHECK(from_pnm(decode_pnm(pgm)) == gray);
  CHECK(decode_pnm("P6\n# comment\n1 1\n255\nabc").data == std::vector<std::uint8_t>{'a', 'b', 'c'});
  CHECK(error_code_of([] { decode_pnm("P3\n1 1\n255\n1 2 3"); }) == code(ErrorCode::kFormat));
  CHECK(error_code_of([] { decode_pnm("P6\n2 2\n255\nabc"); }) == code(ErrorCode::kFormat));
}

TEST_CASE("frame directory") {
  testing::TempDir tmp;

  SUBCASE("three identical frames load with their fps") {
    FrameSequence seq;
    seq.fps = 25.0;
    seq.source_id = "three";
    seq.frames.assign(3, gradient_frame(6, 4));
    write_sequence(tmp.path(), seq);
    const auto loaded = load_sequence(tmp.path());
    CHECK(loaded.size() == 3);
    CHECK(loaded.fps == 25.0);
    CHECK(loaded.source_id == "three");
    CHECK(list_frame_files(tmp.path()).front().filename() == frame_filename(0, ".ppm"));
  }

  SUBCASE("round-trip is bit-identical") {
    FrameSequence seq;
    seq.fps = 30.000001;
    std::mt19937 rng(3);
    for (int i = 0; i < 5; ++i) {
      RgbFrame f = RgbFrame::filled(9, 7, 0, 0, 0);
      for (auto& p : f.planes) {
        for (auto& v : p) v = static_cast<std::uint8_t>(rng());
      }
      seq.frames.push_back(f);
    }
    write_sequence(tmp.path(), seq);
    const auto loaded = load_sequence(tmp.path());
    CHECK(loaded.fps == seq.fps);
    REQUIRE(loaded.size() == seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) CHECK(loaded.frames[i] == seq.frames[i]);
  }

  SUBCASE("bayer round-trip") {
    RawSequence raw;
    raw.meta = {20.0, ColorFormat::kBayer, CfaLayout::kGbrg, "cam"};
    raw.frames.push_back(mosaic(gradient_frame(8, 6), CfaLayout::kGbrg));
    write_raw_sequence(tmp.path(), raw);
    const auto meta = read_meta(tmp.path());
    CHECK(meta.color == ColorFormat::kBayer);
    CHECK(meta.cfa == CfaLayout::kGbrg);
    const auto back = load_raw_sequence(tmp.path());
    CHECK(back.frames.front().samples == raw.frames.front().samples);
    CHECK(back.frames.front().layout == CfaLayout::kGbrg);
    CHECK(error_code_of([&] { load_sequence(tmp.path()); }) == code(ErrorCode::kFormat));
  }

  SUBCASE("mixed sizes") {
    FrameSequence seq;
    seq.fps = 25.0;
    seq.frames = {RgbFrame::filled(4, 4, 1, 1, 1), RgbFrame::filled(4, 4, 1, 1, 1)};
    write_sequence(tmp.path(), seq);
    write_file_atomic(tmp / frame_filename(1, ".ppm"), encode_pnm(to_pnm(RgbFrame::filled(6, 4, 1, 1, 1))));
    CHECK(error_code_of([&] { load_sequence(tmp.path()); }) == code(ErrorCode::kDimension));
  }

  SUBCASE("missing or incomplete metadata") {
    CHECK(error_code_of([&] { load_sequence(tmp / "nothing"); }) == code(ErrorCode::kMissingMetadata));
    write_file_atomic(tmp / "meta.json", R"({"fps": 25, "color": "bayer"})");
    CHECK(error_code_of([&] { read_meta(tmp.path()); }) == code(ErrorCode::kMissingMetadata));
    write_file_atomic(tmp / "meta.json", R"({"color": "rgb"})");
    CHECK(error_code_of([&] { read_meta(tmp.path()); }) == code(ErrorCode::kMissingMetadata));
  }
}
