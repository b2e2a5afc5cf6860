#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"
#include "rppg/frames.hpp"
#include "rppg/parallel.hpp"

namespace rppg::frames {

namespace fs = std::filesystem;

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  if (start == pos) throw Error(ErrorCode::kFormat, "truncated PNM header");
  return bytes.substr(start, pos - start);
}

}  // namespace

PnmImage decode_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  const auto magic = next_token(bytes, pos);
  PnmImage img;
  if (magic == "P6") {
    img.channels = 3;
  } else if (magic == "P5") {
    img.channels = 1;
  } else {
    throw Error(ErrorCode::kFormat, "unsupported image format (expected binary P5/P6)");
  }
  img.width = static_cast<int>(parse_int(next_token(bytes, pos)));
  img.height = static_cast<int>(parse_int(next_token(bytes, pos)));
  const auto maxval = parse_int(next_token(bytes, pos));
  if (img.width <= 0 || img.height <= 0) throw Error(ErrorCode::kFormat, "bad PNM dimensions");
  if (maxval != 255) throw Error(ErrorCode::kFormat, "only 8-bit PNM (maxval 255) is supported");
  ++pos;  // single whitespace before raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (pos + n > bytes.size()) throw Error(ErrorCode::kFormat, "truncated PNM raster");
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

std::string encode_pnm(const PnmImage& image) {
  std::string out = (image.channels == 3 ? "P6\n" : "P5\n") + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
  return out;
}

PnmImage to_pnm(const RgbFrame& frame, bool monochrome) {
  PnmImage img{frame.width, frame.height, monochrome ? 1 : 3, {}};
  const std::size_t n = frame.pixel_count();
  if (monochrome) {
    img.data = frame.planes[kGreen];
    return img;
  }
  img.data.resize(n * 3);
  for (std::size_t i = 0; i < n; ++i) {
    img.data[3 * i] = frame.planes[0][i];
    img.data[3 * i + 1] = frame.planes[1][i];
    img.data[3 * i + 2] = frame.planes[2][i];
  }
  return img;
}

RgbFrame from_pnm(const PnmImage& image) {
  RgbFrame f = RgbFrame::filled(image.width, image.height, 0, 0, 0);
  const std::size_t n = f.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) f.planes[c][i] = image.channels == 3 ? image.data[3 * i + c] : image.data[i];
  }
  return f;
}

std::string to_string(ColorFormat color) {
  switch (color) {
    case ColorFormat::kRgb: return "rgb";
    case ColorFormat::kBayer: return "bayer";
    case ColorFormat::kGray: return "gray";
  }
  return "rgb";
}

SequenceMeta read_meta(const fs::path& dir) {
  const auto path = dir / "meta.json";
  if (!fs::exists(path)) throw Error(ErrorCode::kMissingMetadata, "missing metadata: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, "invalid meta.json: " + std::string(e.what()));
  }
  SequenceMeta meta;
  if (!j.contains("fps") || !j["fps"].is_number()) throw Error(ErrorCode::kMissingMetadata, "meta.json lacks numeric fps");
  meta.fps = j["fps"].get<double>();
  if (!(meta.fps > 0.0)) throw Error(ErrorCode::kFormat, "meta.json fps must be > 0");
  const std::string color = j.value("color", std::string("rgb"));
  if (color == "rgb") {
    meta.color = ColorFormat::kRgb;
  } else if (color == "bayer") {
    meta.color = ColorFormat::kBayer;
  } else if (color == "gray") {
    meta.color = ColorFormat::kGray;
  } else {
    throw Error(ErrorCode::kFormat, "meta.json color must be rgb|bayer|gray, got '" + color + "'");
  }
  if (j.contains("cfa")) meta.cfa = parse_cfa(j["cfa"].get<std::string>());
  if (meta.color == ColorFormat::kBayer && !meta.cfa) {
    throw Error(ErrorCode::kMissingMetadata, "meta.json needs 'cfa' when color is bayer");
  }
  meta.source_id = j.value("source_id", dir.filename().string());
  return meta;
}

void write_meta(const fs::path& dir, const SequenceMeta& meta) {
  nlohmann::ordered_json j;
  j["fps"] = meta.fps;
  j["color"] = to_string(meta.color);
  if (meta.cfa) j["cfa"] = to_string(*meta.cfa);
  j["source_id"] = meta.source_id;
  write_file_atomic(dir / "meta.json", j.dump(2) + "\n");
}

std::string frame_filename(std::size_t index, std::string_view extension) {
  std::string digits = std::to_string(index + 1);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return "frame_" + digits + std::string(extension);
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

namespace {

std::vector<PnmImage> load_images(const std::vector<fs::path>& files, int expected_channels) {
  std::vector<PnmImage> images(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    images[i] = decode_pnm(read_file(files[i]));
    if (images[i].channels != expected_channels) {
      throw Error(ErrorCode::kFormat, files[i].filename().string() + ": channel count does not match meta.json color");
    }
  });
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (images[i].width != images[0].width || images[i].height != images[0].height) {
      throw Error(ErrorCode::kDimension, "inconsistent frame dimensions: " + files[i].filename().string());
    }
  }
  return images;
}

}  // namespace

FrameSequence load_sequence(const fs::path& dir) {
  const auto meta = read_meta(dir);
  if (meta.color == ColorFormat::kBayer) {
    throw Error(ErrorCode::kFormat, "raw Bayer directory; demosaic it first (preprocess)");
  }
  const auto files = list_frame_files(dir);
  const auto images = load_images(files, meta.color == ColorFormat::kGray ? 1 : 3);
  FrameSequence seq;
  seq.fps = meta.fps;
  seq.source_id = meta.source_id;
  seq.monochrome = meta.color == ColorFormat::kGray;
  seq.frames.reserve(images.size());
  for (const auto& img : images) seq.frames.push_back(from_pnm(img));
  return seq;
}

RawSequence load_raw_sequence(const fs::path& dir) {
  RawSequence seq;
  seq.meta = read_meta(dir);
  if (seq.meta.color != ColorFormat::kBayer) throw Error(ErrorCode::kFormat, "not a Bayer directory");
  const auto images = load_images(list_frame_files(dir), 1);
  for (const auto& img : images) {
    seq.frames.push_back(RawBayerFrame{img.width, img.height, img.data, *seq.meta.cfa});
  }
  return seq;
}

void write_sequence(const fs::path& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  const char* ext = seq.monochrome ? ".pgm" : ".ppm";
  parallel_for(seq.size(), [&](std::size_t i) {
    write_file_atomic(dir / frame_filename(i, ext), encode_pnm(to_pnm(seq.frames[i], seq.monochrome)));
  });
  write_meta(dir, SequenceMeta{seq.fps, seq.monochrome ? ColorFormat::kGray : ColorFormat::kRgb, std::nullopt,
                               seq.source_id});
}

void write_raw_sequence(const fs::path& dir, const RawSequence& seq) {
  fs::create_directories(dir);
  parallel_for(seq.frames.size(), [&](std::size_t i) {
    const auto& f = seq.frames[i];
    write_file_atomic(dir / frame_filename(i, ".pgm"), encode_pnm(PnmImage{f.width, f.height, 1, f.samples}));
  });
  SequenceMeta meta = seq.meta;
  meta.color = ColorFormat::kBayer;
  if (!meta.cfa && !seq.frames.empty()) meta.cfa = seq.frames.front().layout;
  write_meta(dir, meta);
}

}  // namespace rppg::frames
