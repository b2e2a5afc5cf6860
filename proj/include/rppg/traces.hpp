#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "rppg/frames.hpp"

namespace rppg::traces {

// Per-channel ROI means over time.
struct RgbTrace {
  std::vector<double> r, g, b;
  double fps = 0.0;
  double t0 = 0.0;

  std::size_t size() const { return r.size(); }
};

struct NormalizedTrace {
  std::vector<double> rn, gn, bn;
  double fps = 0.0;

  std::size_t size() const { return rn.size(); }
};

RgbTrace spatial_average(const frames::FrameSequence& seq, const frames::Roi& roi);

// c(t) / mean(c) - 1 over consecutive windows of window_len samples. A shorter
// trailing remainder is normalized as its own window.
NormalizedTrace temporal_normalize(const RgbTrace& trace, std::size_t window_len);

// Single-segment form of the above; throws kDegenerate on a zero mean.
std::vector<double> normalize_segment(std::span<const double> segment);

// CSV columns: frame_index,time_s,r,g,b
void write_trace_csv(const std::filesystem::path& path, const RgbTrace& trace);
RgbTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace rppg::traces
