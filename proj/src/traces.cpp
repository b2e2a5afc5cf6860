#include "rppg/traces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rppg/common.hpp"
#include "rppg/error.hpp"
#include "rppg/parallel.hpp"

namespace rppg::traces {

RgbTrace spatial_average(const frames::FrameSequence& seq, const frames::Roi& roi) {
  if (seq.empty()) throw Error(ErrorCode::kArgument, "empty frame sequence");
  if (!roi.fits(seq.width(), seq.height())) {
    throw Error(ErrorCode::kBounds, "ROI " + roi.to_string() + " outside " + std::to_string(seq.width()) + "x" +
                                        std::to_string(seq.height()) + " frames");
  }
  const std::size_t n = seq.size();
  RgbTrace trace{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), seq.fps, 0.0};
  std::vector<double>* out[3] = {&trace.r, &trace.g, &trace.b};
  const double inv_area = 1.0 / (static_cast<double>(roi.w) * roi.h);
  parallel_for(n, [&](std::size_t t) {
    const auto& frame = seq.frames[t];
    for (int c = 0; c < 3; ++c) {
      // Integer accumulation is exact; one division per sample.
      std::uint64_t sum = 0;
      for (int y = roi.y; y < roi.y + roi.h; ++y) {
        const auto* row = frame.planes[c].data() + static_cast<std::size_t>(y) * frame.width;
        for (int x = roi.x; x < roi.x + roi.w; ++x) sum += row[x];
      }
      (*out[c])[t] = static_cast<double>(sum) * inv_area;
    }
  });
  return trace;
}

std::vector<double> normalize_segment(std::span<const double> segment) {
  double sum = 0.0;
  for (double v : segment) sum += v;
  const double mean = sum / static_cast<double>(segment.size());
  if (mean == 0.0 || !std::isfinite(mean)) {
    throw Error(ErrorCode::kDegenerate, "temporal normalization undefined: window mean is zero");
  }
  std::vector<double> out(segment.size());
  for (std::size_t i = 0; i < segment.size(); ++i) out[i] = segment[i] / mean - 1.0;
  return out;
}

NormalizedTrace temporal_normalize(const RgbTrace& trace, std::size_t window_len) {
  if (window_len < 2) throw Error(ErrorCode::kArgument, "normalization window must be >= 2 samples");
  const std::size_t n = trace.size();
  if (trace.g.size() != n || trace.b.size() != n) throw Error(ErrorCode::kDimension, "trace channels differ in length");
  NormalizedTrace out{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), trace.fps};
  for (std::size_t start = 0; start < n; start += window_len) {
    const std::size_t len = std::min(window_len, n - start);
    const std::span<const double> src[3] = {std::span(trace.r).subspan(start, len),
                                            std::span(trace.g).subspan(start, len),
                                            std::span(trace.b).subspan(start, len)};
    std::vector<double>* dst[3] = {&out.rn, &out.gn, &out.bn};
    for (int c = 0; c < 3; ++c) {
      const auto seg = normalize_segment(src[c]);
      std::copy(seg.begin(), seg.end(), dst[c]->begin() + static_cast<std::ptrdiff_t>(start));
    }
  }
  return out;
}

void write_trace_csv(const std::filesystem::path& path, const RgbTrace& trace) {
  std::string out = "frame_index,time_s,r,g,b\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += std::to_string(i) + "," + format_double(trace.t0 + static_cast<double>(i) / trace.fps) + "," +
           format_double(trace.r[i]) + "," + format_double(trace.g[i]) + "," + format_double(trace.b[i]) + "\n";
  }
  write_file_atomic(path, out);
}

RgbTrace read_trace_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto ti = table.column("time_s");
  const auto ri = table.column("r");
  const auto gi = table.column("g");
  const auto bi = table.column("b");
  RgbTrace trace;
  std::vector<double> times;
  for (const auto& row : table.rows) {
    times.push_back(parse_double(row[ti]));
    trace.r.push_back(parse_double(row[ri]));
    trace.g.push_back(parse_double(row[gi]));
    trace.b.push_back(parse_double(row[bi]));
  }
  if (times.size() < 2) throw Error(ErrorCode::kFormat, "trace CSV needs at least two rows to infer fps");
  trace.t0 = times.front();
  trace.fps = static_cast<double>(times.size() - 1) / (times.back() - times.front());
  return trace;
}

}  // namespace rppg::traces
