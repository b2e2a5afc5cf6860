#include <cmath>

#include "doctest.h"
#include "rppg/common.hpp"
#include "rppg/hr.hpp"
#include "support.hpp"

using namespace rppg;
using namespace rppg::hr;
using pulse::PulseSignal;
using testing::code;
using testing::error_code_of;

namespace {

constexpr double kGridStep = 60.0 * 25.0 / 4096.0;  // bpm per FFT bin at fs 25, nfft 4096

PulseSignal signal_of(std::vector<double> samples, double fps = 25.0) {
  PulseSignal p;
  p.samples = std::move(samples);
  p.fps = fps;
  return p;
}

}  // namespace

TEST_CASE("window geometry") {
  CHECK(window_count(1500, 250, 25) == 51);
  CHECK(window_count(250, 250, 25) == 1);
  CHECK(window_count(249, 250, 25) == 0);
  for (std::size_t n : {250u, 251u, 274u, 275u, 276u, 1013u}) CHECK(window_count(n, 250, 25) == (n - 250) / 25 + 1);

  const auto est = estimate_hr(signal_of(testing::sinusoid(1500, 25.0, 2.0)));
  REQUIRE(est.size() == 51);
  CHECK(est.t_s.front() == 5.0);
  CHECK(est.t_s.back() == 55.0);
  CHECK(est.window_s == 10.0);
  CHECK(est.low_bpm == 90.0);
}

TEST_CASE("spectral peak picking") {
  SUBCASE("2.0 Hz") {
    const auto est = estimate_hr(signal_of(testing::sinusoid(1500, 25.0, 2.0)));
    for (std::size_t w = 0; w < est.size(); ++w) {
      CHECK(std::abs(est.bpm[w] - 120.0) <= kGridStep);
      CHECK(est.valid[w] == 1);
    }
  }
  SUBCASE("1.3 Hz at the bottom of the label band") {
    const auto est = estimate_hr(signal_of(testing::sinusoid(1500, 25.0, 1.3)), kSgtHrConfig);
    for (double b : est.bpm) CHECK(std::abs(b - 78.0) <= kGridStep);
  }
  SUBCASE("dominant component wins") {
    auto x = testing::sinusoid(1500, 25.0, 1.5);
    const auto y = testing::sinusoid(1500, 25.0, 3.0, 0.5);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    const auto est = estimate_hr(signal_of(x));
    for (double b : est.bpm) CHECK(std::abs(b - 90.0) <= kGridStep);
  }
  SUBCASE("out-of-band energy is ignored") {
    auto x = testing::sinusoid(1500, 25.0, 0.5, 10.0);
    const auto y = testing::sinusoid(1500, 25.0, 2.5);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    for (double b : estimate_hr(signal_of(x)).bpm) CHECK(std::abs(b - 150.0) <= kGridStep);
  }
  SUBCASE("every tone in the band is exact to one grid step") {
    for (double bpm = 91.0; bpm < 240.0; bpm += 3.7) {
      CAPTURE(bpm);
      const auto est = estimate_hr(signal_of(testing::sinusoid(500, 25.0, bpm / 60.0, 1.0, 0.3)));
      for (double b : est.bpm) CHECK(std::abs(b - bpm) <= kGridStep);
    }
  }
  SUBCASE("invariant to positive scaling and offset") {
    auto x = testing::sinusoid(1500, 25.0, 1.9);
    const auto noise = testing::gaussian(1500, 4, 0.0, 0.8);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += noise[i];
    auto y = x;
    for (double& v : y) v = 37.5 * v + 250.0;
    CHECK(estimate_hr(signal_of(y)).bpm == estimate_hr(signal_of(x)).bpm);
  }
  SUBCASE("argument checks") {
    CHECK(error_code_of([] { estimate_hr(signal_of(std::vector<double>(100, 0.0))); }) == code(ErrorCode::kArgument));
    CHECK(error_code_of([] { estimate_hr(signal_of(std::vector<double>(1500, 0.0)), {10, 1, 200, 100}); }) ==
          code(ErrorCode::kArgument));
    CHECK(error_code_of([] { estimate_hr(signal_of(std::vector<double>(1500, 0.0)), {10, 1, 90, 900}); }) ==
          code(ErrorCode::kArgument));
  }
}

TEST_CASE("amplitude filter") {
  SUBCASE("clean input passes untouched") {
    const auto p = signal_of(testing::sinusoid(25 * 90, 25.0, 2.0));
    const auto est = estimate_hr(p);
    AmplitudeFilterReport rep;
    const auto out = amplitude_filter(est, p, {}, &rep);
    CHECK(rep.invalidated == 0);
    CHECK_FALSE(rep.all_invalid);
    CHECK(out.bpm == est.bpm);
    CHECK(out.valid == est.valid);
  }

  SUBCASE("noise burst is invalidated and interpolated") {
    // Non-overlapping windows so the burst touches exactly one of them.
    const HrConfig cfg{10.0, 10.0, 90.0, 240.0};
    auto x = testing::sinusoid(25 * 110, 25.0, 2.0);
    const auto noise = testing::gaussian(250, 17, 0.0, 20.0 / std::sqrt(2.0));
    for (std::size_t i = 0; i < 250; ++i) x[5 * 250 + i] = noise[i];
    const auto p = signal_of(x);
    const auto est = estimate_hr(p, cfg);
    REQUIRE(est.size() == 11);

    AmplitudeFilterReport rep;
    const auto out = amplitude_filter(est, p, {}, &rep);
    CHECK(out.valid[5] == 0);
    CHECK(rep.invalidated == 1);
    CHECK(rep.robust_z[5] > 3.0);
    CHECK(std::abs(out.bpm[5] - out.bpm[4]) <= 0.5);
    CHECK(std::abs(out.bpm[5] - out.bpm[6]) <= 0.5);
    for (std::size_t w = 0; w < out.size(); ++w) {
      if (w != 5) CHECK(out.bpm[w] == est.bpm[w]);
    }
  }

  SUBCASE("interpolation between unequal neighbours and at the edges") {
    HrSeries hr;
    hr.window_s = 10.0;
    hr.stride_s = 10.0;
    hr.t_s = {5, 15, 25, 35, 45};
    hr.bpm = {100, 110, 0, 130, 140};
    hr.valid = {1, 1, 1, 1, 1};
    auto x = testing::sinusoid(25 * 50, 25.0, 2.0);
    for (std::size_t i = 500; i < 750; ++i) x[i] *= 20.0;
    for (std::size_t i = 0; i < 250; ++i) x[i] *= 20.0;
    AmplitudeFilterParams wide;
    wide.context_s = 100.0;  // every window sees the whole series
    const auto out = amplitude_filter(hr, signal_of(x), wide);
    CHECK(out.valid == std::vector<std::uint8_t>{0, 1, 0, 1, 1});
    CHECK(out.bpm[2] == doctest::Approx(120.0));
    CHECK(out.bpm[0] == 110.0);
  }

  SUBCASE("spectral SNR gate and the all-invalid branch") {
    const auto p = signal_of(testing::gaussian(25 * 60, 23));
    const auto est = estimate_hr(p);
    AmplitudeFilterParams strict;
    strict.min_snr_db = 15.0;
    AmplitudeFilterReport rep;
    const auto out = amplitude_filter(est, p, strict, &rep);
    CHECK(rep.all_invalid);
    CHECK(rep.invalidated == est.size());
    CHECK(out.bpm == est.bpm);
    for (auto v : out.valid) CHECK(v == 0);
    // A clean tone clears the same gate comfortably.
    const auto tone = signal_of(testing::sinusoid(25 * 60, 25.0, 2.0));
    AmplitudeFilterReport tone_rep;
    amplitude_filter(estimate_hr(tone), tone, strict, &tone_rep);
    CHECK(tone_rep.invalidated == 0);
  }

  SUBCASE("series must match the pulse") {
    const auto p = signal_of(testing::sinusoid(1500, 25.0, 2.0));
    auto est = estimate_hr(p);
    est.t_s.pop_back();
    est.bpm.pop_back();
    est.valid.pop_back();
    CHECK(error_code_of([&] { amplitude_filter(est, p); }) == code(ErrorCode::kArgument));
  }
}

TEST_CASE("HR CSV") {
  testing::TempDir tmp;
  HrSeries hr;
  hr.t_s = {5, 6, 7.5};
  hr.bpm = {120.1171875, 1.0 / 3.0, 99.99999999999999};
  hr.valid = {1, 0, 1};

  write_hr_csv(tmp / "hr.csv", hr);
  CHECK(read_csv(tmp / "hr.csv").header == std::vector<std::string>{"t_s", "bpm", "valid"});
  const auto back = read_hr_csv(tmp / "hr.csv");
  CHECK(back.t_s == hr.t_s);
  CHECK(back.bpm == hr.bpm);
  CHECK(back.valid == hr.valid);

  write_file_atomic(tmp / "ref.csv", "t_s,bpm\n1,140\n2,141.5\n");
  const auto ref = read_hr_csv(tmp / "ref.csv");
  CHECK(ref.valid == std::vector<std::uint8_t>{1, 1});
  CHECK(ref.bpm[1] == 141.5);

  write_file_atomic(tmp / "bad.csv", "t_s,bpm\n2,140\n2,141\n");
  CHECK(error_code_of([&] { read_hr_csv(tmp / "bad.csv"); }) == code(ErrorCode::kFormat));
  write_file_atomic(tmp / "bad2.csv", "t_s,bpm,valid\n1,140,2\n");
  CHECK(error_code_of([&] { read_hr_csv(tmp / "bad2.csv"); }) == code(ErrorCode::kFormat));
}
