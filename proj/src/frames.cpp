#include "rppg/frames.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rppg/common.hpp"
#include "rppg/error.hpp"

namespace rppg::frames {

namespace {

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Mirror index about the first/last sample (reflect-101).
int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

}  // namespace

CfaLayout parse_cfa(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "rggb") return CfaLayout::kRggb;
  if (lower == "bggr") return CfaLayout::kBggr;
  if (lower == "grbg") return CfaLayout::kGrbg;
  if (lower == "gbrg") return CfaLayout::kGbrg;
  throw Error(ErrorCode::kArgument, "unknown CFA layout '" + std::string(name) + "'");
}

std::string to_string(CfaLayout layout) {
  switch (layout) {
    case CfaLayout::kRggb: return "rggb";
    case CfaLayout::kBggr: return "bggr";
    case CfaLayout::kGrbg: return "grbg";
    case CfaLayout::kGbrg: return "gbrg";
  }
  return "rggb";
}

Channel cfa_channel(CfaLayout layout, int x, int y) {
  static constexpr Channel kTables[4][4] = {
      {kRed, kGreen, kGreen, kBlue},  // RGGB
      {kBlue, kGreen, kGreen, kRed},  // BGGR
      {kGreen, kRed, kBlue, kGreen},  // GRBG
      {kGreen, kBlue, kRed, kGreen},  // GBRG
  };
  return kTables[static_cast<int>(layout)][(y & 1) * 2 + (x & 1)];
}

RgbFrame RgbFrame::filled(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbFrame f;
  f.width = width;
  f.height = height;
  const auto n = static_cast<std::size_t>(width) * height;
  f.planes = {std::vector<std::uint8_t>(n, r), std::vector<std::uint8_t>(n, g), std::vector<std::uint8_t>(n, b)};
  return f;
}

std::string Roi::to_string() const {
  return std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(w) + "," + std::to_string(h);
}

Roi parse_roi(std::string_view text) {
  std::vector<long long> parts;
  std::size_t start = 0;
  while (true) {
    auto comma = text.find(',', start);
    parts.push_back(parse_int(text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 4) throw Error(ErrorCode::kArgument, "ROI must be x,y,w,h");
  Roi roi{static_cast<int>(parts[0]), static_cast<int>(parts[1]), static_cast<int>(parts[2]),
          static_cast<int>(parts[3])};
  if (roi.w <= 0 || roi.h <= 0 || roi.x < 0 || roi.y < 0) {
    throw Error(ErrorCode::kArgument, "ROI needs x,y >= 0 and w,h > 0");
  }
  return roi;
}

RgbFrame demosaic_bilinear(const RawBayerFrame& raw) {
  if (raw.width <= 0 || raw.height <= 0 || raw.width % 2 != 0 || raw.height % 2 != 0) {
    throw Error(ErrorCode::kDimension, "Bayer frame dimensions must be positive and even, got " +
                                           std::to_string(raw.width) + "x" + std::to_string(raw.height));
  }
  if (raw.samples.size() != static_cast<std::size_t>(raw.width) * raw.height) {
    throw Error(ErrorCode::kDimension, "Bayer sample count does not match dimensions");
  }
  const int w = raw.width;
  const int h = raw.height;
  auto sample = [&](int x, int y) -> double { return raw.at(mirror(x, w), mirror(y, h)); };

  RgbFrame out = RgbFrame::filled(w, h, 0, 0, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Channel site = cfa_channel(raw.layout, x, y);
      out.at(site, x, y) = raw.at(x, y);
      if (site == kGreen) {
        const Channel row_ch = cfa_channel(raw.layout, x + 1, y);  // R or B, shares this row
        const Channel col_ch = row_ch == kRed ? kBlue : kRed;
        out.at(row_ch, x, y) = quantize((sample(x - 1, y) + sample(x + 1, y)) / 2.0);
        out.at(col_ch, x, y) = quantize((sample(x, y - 1) + sample(x, y + 1)) / 2.0);
      } else {
        const Channel other = site == kRed ? kBlue : kRed;
        out.at(kGreen, x, y) =
            quantize((sample(x - 1, y) + sample(x + 1, y) + sample(x, y - 1) + sample(x, y + 1)) / 4.0);
        out.at(other, x, y) = quantize(
            (sample(x - 1, y - 1) + sample(x + 1, y - 1) + sample(x - 1, y + 1) + sample(x + 1, y + 1)) / 4.0);
      }
    }
  }
  return out;
}

RawBayerFrame mosaic(const RgbFrame& frame, CfaLayout layout) {
  RawBayerFrame raw;
  raw.width = frame.width;
  raw.height = frame.height;
  raw.layout = layout;
  raw.samples.resize(frame.pixel_count());
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      raw.samples[static_cast<std::size_t>(y) * frame.width + x] = frame.at(cfa_channel(layout, x, y), x, y);
    }
  }
  return raw;
}

RgbFrame downsample(const RgbFrame& frame, int factor) {
  if (factor <= 0) throw Error(ErrorCode::kArgument, "downsample factor must be >= 1");
  if (factor == 1) return frame;
  const int ow = frame.width / factor;
  const int oh = frame.height / factor;
  if (ow == 0 || oh == 0) throw Error(ErrorCode::kDimension, "frame smaller than one downsample block");
  RgbFrame out = RgbFrame::filled(ow, oh, 0, 0, 0);
  const double inv_area = 1.0 / (static_cast<double>(factor) * factor);
  for (int c = 0; c < 3; ++c) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double sum = 0.0;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) sum += frame.at(c, ox * factor + dx, oy * factor + dy);
        }
        out.at(c, ox, oy) = quantize(sum * inv_area);
      }
    }
  }
  return out;
}

RgbFrame gray_world_balance(const RgbFrame& frame) {
  const std::size_t n = frame.pixel_count();
  if (n == 0) throw Error(ErrorCode::kDimension, "empty frame");
  std::array<double, 3> means{};
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (auto v : frame.planes[c]) sum += v;
    means[c] = sum / static_cast<double>(n);
  }
  if (means[0] == 0.0 || means[1] == 0.0 || means[2] == 0.0) {
    throw Error(ErrorCode::kDegenerate, "gray-world balance undefined: a channel has zero mean");
  }
  const double gray = (means[0] + means[1] + means[2]) / 3.0;
  RgbFrame out = frame;
  for (int c = 0; c < 3; ++c) {
    const double gain = gray / means[c];
    for (auto& v : out.planes[c]) v = quantize(v * gain);
  }
  return out;
}

RgbFrame crop_roi(const RgbFrame& frame, const Roi& roi) {
  if (!roi.fits(frame.width, frame.height)) {
    throw Error(ErrorCode::kBounds, "ROI " + roi.to_string() + " outside " + std::to_string(frame.width) + "x" +
                                        std::to_string(frame.height) + " frame");
  }
  RgbFrame out = RgbFrame::filled(roi.w, roi.h, 0, 0, 0);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < roi.h; ++y) {
      const auto* src = frame.planes[c].data() + static_cast<std::size_t>(roi.y + y) * frame.width + roi.x;
      std::copy(src, src + roi.w, out.planes[c].data() + static_cast<std::size_t>(y) * roi.w);
    }
  }
  return out;
}

}  // namespace rppg::frames
