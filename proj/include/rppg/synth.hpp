#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rppg/frames.hpp"
#include "rppg/hr.hpp"
#include "rppg/pulse.hpp"
#include "rppg/traces.hpp"

namespace rppg::synth {

struct Flicker {
  double freq_hz = 0.5;
  double relative_amp = 0.1;
};

struct SynthConfig {
  int width = 64;
  int height = 64;
  double fps = 25.0;
  double duration_s = 60.0;
  frames::Roi skin_region{16, 16, 32, 32};
  std::array<double, 3> base_rgb{150.0, 100.0, 80.0};
  std::array<double, 3> background_rgb{90.0, 90.0, 90.0};
  // Linear chirp from start to end over the clip; equal values give a constant rate.
  double pulse_bpm_start = 120.0;
  double pulse_bpm_end = 120.0;
  std::array<double, 3> pulse_amp_rgb{0.8, 1.5, 0.6};
  double noise_sigma = 0.0;
  std::optional<Flicker> flicker;
  int jitter_px = 0;  // 0 disables translation
  double jitter_hz = 0.2;
  std::uint64_t seed = 42;

  std::size_t frame_count() const;
};

// Throws kArgument for an inconsistent config.
void validate(const SynthConfig& config);

// Instantaneous pulse rate and its integrated phase (radians).
double instantaneous_bpm(const SynthConfig& config, double t);
double pulse_phase(const SynthConfig& config, double t);

struct SynthTruth {
  pulse::PulseSignal pulse;  // sin(phase), the injected modulation shape
  hr::HrSeries hr;
};

struct SynthOutput {
  frames::FrameSequence sequence;
  SynthTruth truth;
};

SynthOutput generate(const SynthConfig& config, double window_s = 10.0, double stride_s = 1.0);

// Mean skin-patch colour per frame before noise and 8-bit quantization.
traces::RgbTrace skin_trace(const SynthConfig& config);

// Window-mean pulse rate on the estimate_hr window grid, in closed form.
hr::HrSeries truth_hr(const SynthConfig& config, double window_s = 10.0, double stride_s = 1.0);

}  // namespace rppg::synth
