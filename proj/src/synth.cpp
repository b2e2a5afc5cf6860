#include "rppg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rppg/error.hpp"
#include "rppg/parallel.hpp"

namespace rppg::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per frame so frames can be rendered in any order.
std::uint64_t frame_seed(std::uint64_t seed, std::size_t frame) { return splitmix64(seed ^ splitmix64(frame + 1)); }

double flicker_gain(const SynthConfig& c, double t) {
  return c.flicker ? 1.0 + c.flicker->relative_amp * std::sin(kTwoPi * c.flicker->freq_hz * t) : 1.0;
}

}  // namespace

std::size_t SynthConfig::frame_count() const { return static_cast<std::size_t>(std::lround(duration_s * fps)); }

void validate(const SynthConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kArgument, "synth config: " + msg); };
  if (c.width <= 0 || c.height <= 0) fail("frame size must be positive");
  if (!(c.fps > 0.0)) fail("fps must be > 0");
  if (!(c.duration_s > 0.0) || c.frame_count() == 0) fail("duration must cover at least one frame");
  const double nyquist_bpm = c.fps * 30.0;
  for (double bpm : {c.pulse_bpm_start, c.pulse_bpm_end}) {
    if (!(bpm > 0.0 && bpm < nyquist_bpm)) fail("pulse rate must lie in (0, fps/2)");
  }
  for (double a : c.pulse_amp_rgb) {
    if (a < 0.0) fail("pulse amplitudes must be >= 0");
  }
  if (c.noise_sigma < 0.0) fail("noise sigma must be >= 0");
  if (c.jitter_px < 0) fail("jitter must be >= 0");
  if (c.flicker && (!(c.flicker->freq_hz > 0.0) || c.flicker->relative_amp < 0.0)) fail("bad flicker");
  const frames::Roi& s = c.skin_region;
  if (s.w <= 0 || s.h <= 0 || s.x - c.jitter_px < 0 || s.y - c.jitter_px < 0 ||
      s.x + s.w + c.jitter_px > c.width || s.y + s.h + c.jitter_px > c.height) {
    fail("skin region (plus jitter) must fit the frame");
  }
}

double instantaneous_bpm(const SynthConfig& c, double t) {
  return c.pulse_bpm_start + (c.pulse_bpm_end - c.pulse_bpm_start) * t / c.duration_s;
}

double pulse_phase(const SynthConfig& c, double t) {
  const double f0 = c.pulse_bpm_start / 60.0;
  const double f1 = c.pulse_bpm_end / 60.0;
  return kTwoPi * (f0 * t + 0.5 * (f1 - f0) * t * t / c.duration_s);
}

hr::HrSeries truth_hr(const SynthConfig& config, double window_s, double stride_s) {
  validate(config);
  const std::size_t n = config.frame_count();
  const auto length = static_cast<std::size_t>(std::lround(window_s * config.fps));
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(stride_s * config.fps)));
  const std::size_t count = hr::window_count(n, length, stride);

  hr::HrSeries out;
  out.window_s = window_s;
  out.stride_s = stride_s;
  for (std::size_t w = 0; w < count; ++w) {
    const double a = static_cast<double>(w * stride) / config.fps;
    const double b = static_cast<double>(w * stride + length) / config.fps;
    out.t_s.push_back(0.5 * (a + b));
    out.bpm.push_back(60.0 * (pulse_phase(config, b) - pulse_phase(config, a)) / (kTwoPi * (b - a)));
    out.valid.push_back(1);
  }
  return out;
}

traces::RgbTrace skin_trace(const SynthConfig& config) {
  validate(config);
  traces::RgbTrace trace;
  trace.fps = config.fps;
  for (std::size_t i = 0; i < config.frame_count(); ++i) {
    const double t = static_cast<double>(i) / config.fps;
    const double gain = flicker_gain(config, t);
    const double wave = std::sin(pulse_phase(config, t));
    trace.r.push_back(gain * (config.base_rgb[0] + config.pulse_amp_rgb[0] * wave));
    trace.g.push_back(gain * (config.base_rgb[1] + config.pulse_amp_rgb[1] * wave));
    trace.b.push_back(gain * (config.base_rgb[2] + config.pulse_amp_rgb[2] * wave));
  }
  return trace;
}

SynthOutput generate(const SynthConfig& config, double window_s, double stride_s) {
  validate(config);
  const std::size_t n = config.frame_count();
  SynthOutput out;
  out.sequence.fps = config.fps;
  out.sequence.source_id = "synth-" + std::to_string(config.seed);
  out.sequence.frames.resize(n);
  out.truth.pulse.fps = config.fps;
  out.truth.pulse.samples.resize(n);

  parallel_for(n, [&](std::size_t i) {
    const double t = static_cast<double>(i) / config.fps;
    const double wave = std::sin(pulse_phase(config, t));
    out.truth.pulse.samples[i] = wave;

    const double gain = flicker_gain(config, t);
    int dx = 0, dy = 0;
    if (config.jitter_px > 0) {
      dx = static_cast<int>(std::lround(config.jitter_px * std::sin(kTwoPi * config.jitter_hz * t)));
      dy = static_cast<int>(std::lround(config.jitter_px * std::cos(kTwoPi * config.jitter_hz * t)));
    }
    const frames::Roi skin{config.skin_region.x + dx, config.skin_region.y + dy, config.skin_region.w,
                           config.skin_region.h};
    std::array<double, 3> skin_level{}, background_level{};
    for (int c = 0; c < 3; ++c) {
      skin_level[c] = gain * (config.base_rgb[c] + config.pulse_amp_rgb[c] * wave);
      background_level[c] = gain * config.background_rgb[c];
    }

    std::mt19937_64 rng(frame_seed(config.seed, i));
    std::normal_distribution<double> noise(0.0, config.noise_sigma > 0.0 ? config.noise_sigma : 1.0);
    auto& frame = out.sequence.frames[i];
    frame = frames::RgbFrame::filled(config.width, config.height, 0, 0, 0);
    for (int y = 0; y < config.height; ++y) {
      for (int x = 0; x < config.width; ++x) {
        const bool on_skin = x >= skin.x && x < skin.x + skin.w && y >= skin.y && y < skin.y + skin.h;
        const auto& level = on_skin ? skin_level : background_level;
        for (int c = 0; c < 3; ++c) {
          double v = level[c];
          if (config.noise_sigma > 0.0) v += noise(rng);
          frame.at(c, x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
      }
    }
  });

  out.truth.hr = truth_hr(config, window_s, stride_s);
  return out;
}

}  // namespace rppg::synth
