#include "rppg/clips.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"
#include "rppg/parallel.hpp"

namespace rppg::clips {

namespace fs = std::filesystem;

ResizeMode parse_resize_mode(std::string_view name) {
  if (name == "bilinear") return ResizeMode::kBilinear;
  if (name == "nearest") return ResizeMode::kNearest;
  throw Error(ErrorCode::kArgument, "resize must be bilinear|nearest, got '" + std::string(name) + "'");
}

std::string to_string(ResizeMode mode) { return mode == ResizeMode::kBilinear ? "bilinear" : "nearest"; }

frames::RgbFrame resize(const frames::RgbFrame& frame, int width, int height, ResizeMode mode) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kArgument, "resize target must be positive");
  auto out = frames::RgbFrame::filled(width, height, 0, 0, 0);
  const double sx = static_cast<double>(frame.width) / width;
  const double sy = static_cast<double>(frame.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(frame.height - 1));
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(frame.width - 1));
      for (int c = 0; c < 3; ++c) {
        if (mode == ResizeMode::kNearest) {
          const int nx = std::min(static_cast<int>((x + 0.5) * sx), frame.width - 1);
          const int ny = std::min(static_cast<int>((y + 0.5) * sy), frame.height - 1);
          out.at(c, x, y) = frame.at(c, nx, ny);
          continue;
        }
        const int x0 = static_cast<int>(fx);
        const int y0 = static_cast<int>(fy);
        const int x1 = std::min(x0 + 1, frame.width - 1);
        const int y1 = std::min(y0 + 1, frame.height - 1);
        const double ax = fx - x0;
        const double ay = fy - y0;
        const double top = (1 - ax) * frame.at(c, x0, y0) + ax * frame.at(c, x1, y0);
        const double bottom = (1 - ax) * frame.at(c, x0, y1) + ax * frame.at(c, x1, y1);
        out.at(c, x, y) = static_cast<std::uint8_t>(std::clamp(std::lround((1 - ay) * top + ay * bottom), 0L, 255L));
      }
    }
  }
  return out;
}

std::vector<std::size_t> clip_starts(std::size_t frame_count, std::size_t length, std::size_t stride) {
  if (length == 0 || stride == 0) throw Error(ErrorCode::kArgument, "clip length and stride must be > 0");
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + length <= frame_count; s += stride) starts.push_back(s);
  return starts;
}

void assign_split(ClipExport& result, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio >= 0.0 && train_ratio <= 1.0)) throw Error(ErrorCode::kArgument, "split ratio must be in [0, 1]");
  auto order = result.clips;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::lround(train_ratio * static_cast<double>(order.size())));
  result.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  result.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(result.train.begin(), result.train.end());
  std::sort(result.val.begin(), result.val.end());
}

ClipExport export_clips(const frames::FrameSequence& seq, const pulse::PulseSignal& labels, const frames::Roi& roi,
                        const ClipOptions& options, const fs::path& out_dir) {
  if (labels.size() != seq.size()) {
    throw Error(ErrorCode::kDimension, "label count " + std::to_string(labels.size()) + " differs from frame count " +
                                           std::to_string(seq.size()));
  }
  if (!seq.empty() && !roi.fits(seq.width(), seq.height())) {
    throw Error(ErrorCode::kBounds, "clip ROI " + roi.to_string() + " outside the frame");
  }
  const auto starts = clip_starts(seq.size(), options.length, options.stride);
  ClipExport result;
  result.unused_frames = starts.empty() ? seq.size() : seq.size() - (starts.back() + options.length);
  if (starts.empty()) return result;

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    std::string name = std::to_string(k);
    name.insert(0, name.size() < 4 ? 4 - name.size() : 0, '0');
    result.clips.push_back("clip_" + name);
  }

  for (std::size_t k = 0; k < starts.size(); ++k) {
    const fs::path dir = out_dir / result.clips[k];
    const std::size_t start = starts[k];
    frames::FrameSequence clip;
    clip.fps = seq.fps;
    clip.source_id = seq.source_id + "/" + result.clips[k];
    clip.monochrome = seq.monochrome;
    clip.frames.resize(options.length);
    parallel_for(options.length, [&](std::size_t i) {
      clip.frames[i] = resize(frames::crop_roi(seq.frames[start + i], roi), options.size, options.size, options.resize);
    });
    frames::write_sequence(dir, clip);

    pulse::PulseSignal clip_labels;
    clip_labels.fps = labels.fps;
    clip_labels.t0 = labels.time_at(start);
    clip_labels.samples.assign(labels.samples.begin() + static_cast<std::ptrdiff_t>(start),
                               labels.samples.begin() + static_cast<std::ptrdiff_t>(start + options.length));
    pulse::write_pulse_csv(dir / "labels.csv", clip_labels);

    nlohmann::ordered_json manifest;
    manifest["source_id"] = seq.source_id;
    manifest["roi"] = {{"x", roi.x}, {"y", roi.y}, {"w", roi.w}, {"h", roi.h}};
    manifest["fps"] = seq.fps;
    manifest["start_frame"] = start;
    manifest["n_frames"] = options.length;
    manifest["width"] = options.size;
    manifest["height"] = options.size;
    manifest["channels"] = seq.monochrome ? 1 : 3;
    manifest["resize"] = to_string(options.resize);
    manifest["labels"] = "labels.csv";
    write_file_atomic(dir / "clip.json", manifest.dump(2) + "\n");
  }

  assign_split(result, options.train_ratio, options.seed);
  nlohmann::ordered_json split;
  split["seed"] = options.seed;
  split["train_ratio"] = options.train_ratio;
  split["train"] = result.train;
  split["val"] = result.val;
  write_file_atomic(out_dir / "split.json", split.dump(2) + "\n");
  return result;
}

}  // namespace rppg::clips
