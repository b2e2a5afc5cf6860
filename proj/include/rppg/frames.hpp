#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rppg::frames {

enum class CfaLayout { kRggb, kBggr, kGrbg, kGbrg };

CfaLayout parse_cfa(std::string_view name);  // case-insensitive
std::string to_string(CfaLayout layout);

enum Channel : int { kRed = 0, kGreen = 1, kBlue = 2 };

// Channel sampled at (x, y) under the given CFA.
Channel cfa_channel(CfaLayout layout, int x, int y);

struct RawBayerFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;  // row-major
  CfaLayout layout = CfaLayout::kRggb;

  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
};

struct RgbFrame {
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> planes;  // R, G, B; row-major

  static RgbFrame filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::uint8_t at(int channel, int x, int y) const {
    return planes[channel][static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int channel, int x, int y) { return planes[channel][static_cast<std::size_t>(y) * width + x]; }

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

  bool operator==(const RgbFrame&) const = default;
};

struct Roi {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool fits(int frame_width, int frame_height) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= frame_width && y + h <= frame_height;
  }
  std::string to_string() const;

  bool operator==(const Roi&) const = default;
};

// Parses "x,y,w,h".
Roi parse_roi(std::string_view text);

struct FrameSequence {
  std::vector<RgbFrame> frames;
  double fps = 0.0;
  std::string source_id;
  bool monochrome = false;  // loaded from a gray directory; planes are identical

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
};

// Bilinear CFA interpolation. Sampled positions keep their raw value; missing
// values average the 2 or 4 nearest same-channel sites. Borders mirror about
// the edge pixel, which keeps the CFA phase of the virtual neighbours intact.
RgbFrame demosaic_bilinear(const RawBayerFrame& raw);

// Samples an RGB frame through a CFA (inverse of demosaic on sampled sites).
RawBayerFrame mosaic(const RgbFrame& frame, CfaLayout layout);

// Box-filter block averaging. Trailing rows/cols that do not fill a block are dropped.
RgbFrame downsample(const RgbFrame& frame, int factor);

// Per-frame gray-world white balance: gain_c = mean(all) / mean(c).
RgbFrame gray_world_balance(const RgbFrame& frame);

RgbFrame crop_roi(const RgbFrame& frame, const Roi& roi);

// ---- frame directory format -------------------------------------------------

enum class ColorFormat { kRgb, kBayer, kGray };

std::string to_string(ColorFormat color);

struct SequenceMeta {
  double fps = 0.0;
  ColorFormat color = ColorFormat::kRgb;
  std::optional<CfaLayout> cfa;
  std::string source_id;
};

SequenceMeta read_meta(const std::filesystem::path& dir);
void write_meta(const std::filesystem::path& dir, const SequenceMeta& meta);

// Frame files in lexical order (frame_000001.ppm, ...).
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

// Loads an rgb or gray directory. Bayer directories go through load_raw_sequence.
FrameSequence load_sequence(const std::filesystem::path& dir);

struct RawSequence {
  std::vector<RawBayerFrame> frames;
  SequenceMeta meta;
};
RawSequence load_raw_sequence(const std::filesystem::path& dir);

void write_sequence(const std::filesystem::path& dir, const FrameSequence& seq);
void write_raw_sequence(const std::filesystem::path& dir, const RawSequence& seq);

std::string frame_filename(std::size_t index, std::string_view extension);

// Binary PNM (P5 / P6, maxval 255).
struct PnmImage {
  int width = 0;
  int height = 0;
  int channels = 0;                // 1 or 3
  std::vector<std::uint8_t> data;  // interleaved
};

PnmImage decode_pnm(std::string_view bytes);
std::string encode_pnm(const PnmImage& image);

PnmImage to_pnm(const RgbFrame& frame, bool monochrome = false);
RgbFrame from_pnm(const PnmImage& image);

}  // namespace rppg::frames
