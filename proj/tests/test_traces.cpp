#include "doctest.h"
#include "rppg/common.hpp"
#include "rppg/traces.hpp"
#include "support.hpp"

using namespace rppg;
using namespace rppg::traces;
using frames::FrameSequence;
using frames::RgbFrame;
using testing::code;
using testing::error_code_of;

namespace {

FrameSequence sequence_of(std::vector<RgbFrame> frames, double fps = 25.0) {
  FrameSequence seq;
  seq.frames = std::move(frames);
  seq.fps = fps;
  return seq;
}

}  // namespace

TEST_CASE("spatial_average") {
  SUBCASE("constant red") {
    const auto seq = sequence_of(std::vector<RgbFrame>(4, RgbFrame::filled(8, 8, 200, 0, 0)));
    const auto t = spatial_average(seq, {1, 2, 5, 3});
    REQUIRE(t.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(t.r[i] == 200.0);
      CHECK(t.g[i] == 0.0);
      CHECK(t.b[i] == 0.0);
    }
    CHECK(t.fps == 25.0);
  }
  SUBCASE("1x1 roi follows the pixel") {
    std::vector<RgbFrame> frames;
    for (int i = 0; i < 6; ++i) {
      auto f = RgbFrame::filled(4, 4, 1, 2, 3);
      f.at(0, 2, 1) = static_cast<std::uint8_t>(10 * i);
      f.at(2, 2, 1) = static_cast<std::uint8_t>(100 + i);
      frames.push_back(f);
    }
    const auto t = spatial_average(sequence_of(frames), {2, 1, 1, 1});
    for (int i = 0; i < 6; ++i) {
      CHECK(t.r[i] == 10.0 * i);
      CHECK(t.g[i] == 2.0);
      CHECK(t.b[i] == 100.0 + i);
    }
  }
  SUBCASE("2x2 mean") {
    auto f = RgbFrame::filled(3, 3, 0, 0, 0);
    f.at(0, 0, 0) = 10;
    f.at(0, 1, 0) = 20;
    f.at(0, 0, 1) = 30;
    f.at(0, 1, 1) = 40;
    CHECK(spatial_average(sequence_of({f}), {0, 0, 2, 2}).r[0] == 25.0);
  }
  SUBCASE("errors") {
    const auto seq = sequence_of({RgbFrame::filled(4, 4, 1, 1, 1)});
    CHECK(error_code_of([&] { spatial_average(seq, {2, 2, 4, 4}); }) == code(ErrorCode::kBounds));
  }
}

TEST_CASE("temporal normalization") {
  const auto seg = normalize_segment(std::vector<double>{90, 100, 110});
  REQUIRE(seg.size() == 3);
  CHECK(seg[0] == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(seg[1] == 0.0);
  CHECK(seg[2] == doctest::Approx(0.1).epsilon(1e-12));

  RgbTrace t;
  t.fps = 10.0;
  for (int i = 0; i < 23; ++i) {
    t.r.push_back(50.0);
    t.g.push_back(100.0 + std::sin(0.3 * i));
    t.b.push_back(80.0 + i);
  }
  const auto n = temporal_normalize(t, 10);
  REQUIRE(n.size() == 23);
  for (double v : n.rn) CHECK(v == 0.0);

  // Scale invariance.
  RgbTrace scaled = t;
  for (auto* ch : {&scaled.r, &scaled.g, &scaled.b}) {
    for (auto& v : *ch) v *= 3.7;
  }
  const auto ns = temporal_normalize(scaled, 10);
  for (std::size_t i = 0; i < n.size(); ++i) {
    CHECK(ns.gn[i] == doctest::Approx(n.gn[i]).epsilon(1e-12));
    CHECK(ns.bn[i] == doctest::Approx(n.bn[i]).epsilon(1e-12));
  }

  // Each window (including the 3-sample remainder) averages to zero.
  for (std::size_t start : {0u, 10u, 20u}) {
    double sum = 0.0;
    for (std::size_t i = start; i < std::min<std::size_t>(start + 10, 23); ++i) sum += n.bn[i];
    CHECK(sum == doctest::Approx(0.0));
  }

  CHECK(error_code_of([&] { temporal_normalize(t, 1); }) == code(ErrorCode::kArgument));
  CHECK(error_code_of([] { normalize_segment(std::vector<double>{0, 0, 0}); }) == code(ErrorCode::kDegenerate));
}

TEST_CASE("trace CSV round-trip") {
  testing::TempDir tmp;
  RgbTrace t;
  t.fps = 29.97;
  const auto noise = testing::gaussian(50, 11, 100.0, 13.0);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    t.r.push_back(noise[i]);
    t.g.push_back(noise[i] / 3.0);
    t.b.push_back(1e-9 * noise[i]);
  }
  write_trace_csv(tmp / "trace.csv", t);
  const auto table = read_csv(tmp / "trace.csv");
  CHECK(table.header == std::vector<std::string>{"frame_index", "time_s", "r", "g", "b"});
  const auto back = read_trace_csv(tmp / "trace.csv");
  CHECK(back.r == t.r);
  CHECK(back.g == t.g);
  CHECK(back.b == t.b);
  CHECK(back.fps == doctest::Approx(t.fps).epsilon(1e-9));
}
