#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rppg/dsp.hpp"
#include "rppg/frames.hpp"
#include "rppg/traces.hpp"

namespace rppg::pulse {

struct PulseSignal {
  std::vector<double> samples;
  double fps = 0.0;
  double t0 = 0.0;

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / fps; }
};

enum class Method { kChrom, kPos };

Method parse_method(std::string_view name);
std::string to_string(Method method);

// Sliding-window projection settings shared by CHROM and POS.
struct ChromParams {
  double window_s = 1.6;
  double overlap = 0.5;
  // CHROM band-limits X and Y inside each window before estimating alpha.
  dsp::Band band{1.3, 4.0};
  int filter_order = 3;
};

struct ProjectionDiagnostics {
  std::size_t window_count = 0;
  std::vector<std::size_t> degenerate_windows;  // flat windows that contributed zero
};

// Window geometry used by chrom/pos: length in samples and start offsets.
struct WindowPlan {
  std::size_t length = 0;
  std::vector<std::size_t> starts;
};
WindowPlan plan_windows(std::size_t n, double fps, double window_s, double overlap);

// Chrominance projection: X = 3Rn - 2Gn, Y = 1.5Rn + Gn - 1.5Bn, S = Xf - (sd(Xf)/sd(Yf)) Yf
// per window, combined by weighted overlap-add.
PulseSignal chrom(const traces::RgbTrace& trace, const ChromParams& params = {},
                  ProjectionDiagnostics* diagnostics = nullptr);

// Plane-orthogonal-to-skin: S1 = Gn - Bn, S2 = Gn + Bn - 2Rn, h = S1 + (sd(S1)/sd(S2)) S2.
PulseSignal pos(const traces::RgbTrace& trace, const ChromParams& params = {},
                ProjectionDiagnostics* diagnostics = nullptr);

PulseSignal project(const traces::RgbTrace& trace, Method method, const ChromParams& params = {},
                    ProjectionDiagnostics* diagnostics = nullptr);

struct SgtConfig {
  Method method = Method::kChrom;
  dsp::Band band{1.3, 4.0};  // 78-240 bpm
  int filter_order = 4;
  ChromParams projection;  // projection.band is overridden by band
};

struct SgtLabels {
  PulseSignal pulse;
  Method method = Method::kChrom;
  dsp::Band band;
  frames::Roi source_roi;
  std::string source_id;
};

// spatial_average -> projection -> zero-phase Butterworth band-pass.
SgtLabels generate_sgt(const frames::FrameSequence& seq, const frames::Roi& roi, const SgtConfig& config = {},
                       ProjectionDiagnostics* diagnostics = nullptr);

// Pulse CSV: frame_index,time_s,ppg
std::string pulse_csv(const PulseSignal& pulse);
void write_pulse_csv(const std::filesystem::path& path, const PulseSignal& pulse);
// fps comes from a sidecar JSON next to the file when present, else from the time column.
PulseSignal read_pulse_csv(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// Label CSV plus sidecar {method, band_hz, roi, fps, source_id}.
void write_sgt(const std::filesystem::path& csv_path, const SgtLabels& labels);
SgtLabels read_sgt(const std::filesystem::path& csv_path);

}  // namespace rppg::pulse
