#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rppg/frames.hpp"
#include "rppg/pulse.hpp"

namespace rppg::clips {

enum class ResizeMode { kBilinear, kNearest };

ResizeMode parse_resize_mode(std::string_view name);
std::string to_string(ResizeMode mode);

// Pixel-centre aligned resampling (edge samples clamp).
frames::RgbFrame resize(const frames::RgbFrame& frame, int width, int height, ResizeMode mode);

struct ClipOptions {
  std::size_t length = 148;
  int size = 128;
  std::size_t stride = 148;
  ResizeMode resize = ResizeMode::kBilinear;
  double train_ratio = 0.6;
  std::uint64_t seed = 42;
};

struct ClipExport {
  std::vector<std::string> clips;
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::size_t unused_frames = 0;
};

// Start frames of every full clip.
std::vector<std::size_t> clip_starts(std::size_t frame_count, std::size_t length, std::size_t stride);

// Seeded shuffle, then the first round(ratio * n) names go to train.
void assign_split(ClipExport& result, double train_ratio, std::uint64_t seed);

// Writes clip_NNNN/ directories (frames + meta.json, labels.csv, clip.json)
// and split.json under out_dir. Fewer frames than one clip yields no clips.
ClipExport export_clips(const frames::FrameSequence& seq, const pulse::PulseSignal& labels, const frames::Roi& roi,
                        const ClipOptions& options, const std::filesystem::path& out_dir);

}  // namespace rppg::clips
