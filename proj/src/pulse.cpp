#include "rppg/pulse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"

namespace rppg::pulse {

namespace {

constexpr double kFlatSd = 1e-12;

double stddev(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

// sin^2 taper offset by half a sample: strictly positive, and two copies at
// 50 % overlap sum to exactly one.
std::vector<double> ola_weights(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(len));
    w[k] = s * s;
  }
  return w;
}

struct Channels {
  std::vector<double> r, g, b;
};

template <typename WindowFn>
PulseSignal overlap_add(const traces::RgbTrace& trace, const ChromParams& params, ProjectionDiagnostics* diagnostics,
                        WindowFn&& project_window) {
  if (trace.g.size() != trace.size() || trace.b.size() != trace.size()) {
    throw Error(ErrorCode::kDimension, "trace channels differ in length");
  }
  if (!(params.overlap >= 0.0 && params.overlap < 1.0)) throw Error(ErrorCode::kArgument, "overlap must be in [0, 1)");
  const auto plan = plan_windows(trace.size(), trace.fps, params.window_s, params.overlap);
  const auto weights = ola_weights(plan.length);

  std::vector<double> acc(trace.size(), 0.0);
  std::vector<double> wsum(trace.size(), 0.0);
  ProjectionDiagnostics diag;
  diag.window_count = plan.starts.size();
  for (std::size_t w = 0; w < plan.starts.size(); ++w) {
    const std::size_t start = plan.starts[w];
    Channels norm{traces::normalize_segment(std::span(trace.r).subspan(start, plan.length)),
                  traces::normalize_segment(std::span(trace.g).subspan(start, plan.length)),
                  traces::normalize_segment(std::span(trace.b).subspan(start, plan.length))};
    bool degenerate = false;
    const auto segment = project_window(norm, degenerate);
    if (degenerate) diag.degenerate_windows.push_back(w);
    for (std::size_t k = 0; k < plan.length; ++k) {
      acc[start + k] += weights[k] * segment[k];
      wsum[start + k] += weights[k];
    }
  }
  PulseSignal out{std::move(acc), trace.fps, trace.t0};
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] /= wsum[i];
  if (diagnostics) *diagnostics = std::move(diag);
  return out;
}

}  // namespace

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "chrom") return Method::kChrom;
  if (lower == "pos") return Method::kPos;
  throw Error(ErrorCode::kArgument, "unknown method '" + std::string(name) + "' (chrom|pos)");
}

std::string to_string(Method method) { return method == Method::kChrom ? "CHROM" : "POS"; }

WindowPlan plan_windows(std::size_t n, double fps, double window_s, double overlap) {
  if (!(fps > 0.0) || !(window_s > 0.0)) throw Error(ErrorCode::kArgument, "window and fps must be > 0");
  WindowPlan plan;
  plan.length = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(window_s * fps)));
  const auto hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(plan.length) * (1.0 - overlap))));
  if (n < plan.length) {
    throw Error(ErrorCode::kArgument, "trace of " + std::to_string(n) + " samples is shorter than one " +
                                          std::to_string(plan.length) + "-sample window");
  }
  for (std::size_t s = 0; s + plan.length <= n; s += hop) plan.starts.push_back(s);
  if (plan.starts.back() + plan.length < n) plan.starts.push_back(n - plan.length);
  return plan;
}

PulseSignal chrom(const traces::RgbTrace& trace, const ChromParams& params, ProjectionDiagnostics* diagnostics) {
  const auto filter = dsp::butterworth_bandpass(params.filter_order, params.band.low_hz, params.band.high_hz, trace.fps);
  return overlap_add(trace, params, diagnostics, [&](const Channels& n, bool& degenerate) {
    const std::size_t len = n.r.size();
    std::vector<double> x(len), y(len);
    for (std::size_t k = 0; k < len; ++k) {
      x[k] = 3.0 * n.r[k] - 2.0 * n.g[k];
      y[k] = 1.5 * n.r[k] + n.g[k] - 1.5 * n.b[k];
    }
    const auto xf = dsp::filter_zero_phase(x, filter);
    const auto yf = dsp::filter_zero_phase(y, filter);
    const double sd_y = stddev(yf);
    double alpha = 0.0;
    if (sd_y < kFlatSd) {
      degenerate = true;
    } else {
      alpha = stddev(xf) / sd_y;
    }
    std::vector<double> s(len);
    for (std::size_t k = 0; k < len; ++k) s[k] = xf[k] - alpha * yf[k];
    return s;
  });
}

PulseSignal pos(const traces::RgbTrace& trace, const ChromParams& params, ProjectionDiagnostics* diagnostics) {
  return overlap_add(trace, params, diagnostics, [&](const Channels& n, bool& degenerate) {
    const std::size_t len = n.r.size();
    std::vector<double> s1(len), s2(len);
    for (std::size_t k = 0; k < len; ++k) {
      s1[k] = n.g[k] - n.b[k];
      s2[k] = n.g[k] + n.b[k] - 2.0 * n.r[k];
    }
    const double sd2 = stddev(s2);
    double ratio = 0.0;
    if (sd2 < kFlatSd) {
      degenerate = true;
    } else {
      ratio = stddev(s1) / sd2;
    }
    std::vector<double> h(len);
    double mean = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      h[k] = s1[k] + ratio * s2[k];
      mean += h[k];
    }
    mean /= static_cast<double>(len);
    for (double& v : h) v -= mean;
    return h;
  });
}

PulseSignal project(const traces::RgbTrace& trace, Method method, const ChromParams& params,
                    ProjectionDiagnostics* diagnostics) {
  return method == Method::kChrom ? chrom(trace, params, diagnostics) : pos(trace, params, diagnostics);
}

SgtLabels generate_sgt(const frames::FrameSequence& seq, const frames::Roi& roi, const SgtConfig& config,
                       ProjectionDiagnostics* diagnostics) {
  dsp::check_band(config.band, seq.fps);
  const auto trace = traces::spatial_average(seq, roi);
  ChromParams params = config.projection;
  params.band = config.band;
  const auto raw = project(trace, config.method, params, diagnostics);
  const auto filter = dsp::butterworth_bandpass(config.filter_order, config.band.low_hz, config.band.high_hz, seq.fps);

  SgtLabels labels;
  labels.pulse = PulseSignal{dsp::filter_zero_phase(raw.samples, filter), raw.fps, raw.t0};
  labels.method = config.method;
  labels.band = config.band;
  labels.source_roi = roi;
  labels.source_id = seq.source_id;
  return labels;
}

std::string pulse_csv(const PulseSignal& pulse) {
  std::string out = "frame_index,time_s,ppg\n";
  for (std::size_t i = 0; i < pulse.size(); ++i) {
    out += std::to_string(i) + "," + format_double(pulse.time_at(i)) + "," + format_double(pulse.samples[i]) + "\n";
  }
  return out;
}

void write_pulse_csv(const std::filesystem::path& path, const PulseSignal& pulse) {
  write_file_atomic(path, pulse_csv(pulse));
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

PulseSignal read_pulse_csv(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto ti = table.column("time_s");
  const auto pi = table.column("ppg");
  PulseSignal pulse;
  std::vector<double> times;
  for (const auto& row : table.rows) {
    times.push_back(parse_double(row[ti]));
    pulse.samples.push_back(parse_double(row[pi]));
  }
  if (times.empty()) throw Error(ErrorCode::kFormat, "pulse CSV has no rows: " + path.string());
  pulse.t0 = times.front();

  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    const auto j = nlohmann::json::parse(read_file(side));
    if (j.contains("fps")) pulse.fps = j["fps"].get<double>();
  }
  if (pulse.fps <= 0.0) {
    if (times.size() < 2 || !(times.back() > times.front())) {
      throw Error(ErrorCode::kFormat, "cannot infer fps from " + path.string());
    }
    const double fps = static_cast<double>(times.size() - 1) / (times.back() - times.front());
    const double snapped = std::round(fps * 1e6) / 1e6;
    pulse.fps = std::abs(snapped - fps) < 1e-6 ? snapped : fps;
  }
  return pulse;
}

void write_sgt(const std::filesystem::path& csv_path, const SgtLabels& labels) {
  write_pulse_csv(csv_path, labels.pulse);
  nlohmann::ordered_json j;
  j["method"] = to_string(labels.method);
  j["band_hz"] = {labels.band.low_hz, labels.band.high_hz};
  j["roi"] = {{"x", labels.source_roi.x}, {"y", labels.source_roi.y}, {"w", labels.source_roi.w},
              {"h", labels.source_roi.h}};
  j["fps"] = labels.pulse.fps;
  j["source_id"] = labels.source_id;
  write_file_atomic(sidecar_path(csv_path), j.dump(2) + "\n");
}

SgtLabels read_sgt(const std::filesystem::path& csv_path) {
  const auto side = sidecar_path(csv_path);
  if (!std::filesystem::exists(side)) {
    throw Error(ErrorCode::kMissingMetadata, "missing metadata: SGT sidecar " + side.string());
  }
  SgtLabels labels;
  try {
    const auto j = nlohmann::json::parse(read_file(side));
    labels.method = parse_method(j.at("method").get<std::string>());
    labels.band = {j.at("band_hz").at(0).get<double>(), j.at("band_hz").at(1).get<double>()};
    const auto& roi = j.at("roi");
    labels.source_roi = {roi.at("x").get<int>(), roi.at("y").get<int>(), roi.at("w").get<int>(),
                         roi.at("h").get<int>()};
    labels.source_id = j.value("source_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, "invalid SGT sidecar " + side.string() + ": " + e.what());
  }
  labels.pulse = read_pulse_csv(csv_path);
  return labels;
}

}  // namespace rppg::pulse
