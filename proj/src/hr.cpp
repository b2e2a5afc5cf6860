#include "rppg/hr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rppg/common.hpp"
#include "rppg/dsp.hpp"
#include "rppg/error.hpp"
#include "rppg/parallel.hpp"

namespace rppg::hr {

namespace {

struct WindowGeometry {
  std::size_t length = 0;
  std::size_t stride = 0;
  std::size_t count = 0;
};

WindowGeometry geometry(std::size_t n, double fps, double window_s, double stride_s) {
  if (!(fps > 0.0) || !(window_s > 0.0) || !(stride_s > 0.0)) {
    throw Error(ErrorCode::kArgument, "fps, window and stride must be > 0");
  }
  WindowGeometry g;
  g.length = static_cast<std::size_t>(std::lround(window_s * fps));
  g.stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(stride_s * fps)));
  if (g.length < 2) throw Error(ErrorCode::kArgument, "HR window shorter than two samples");
  if (n < g.length) {
    throw Error(ErrorCode::kArgument, "pulse of " + std::to_string(n) + " samples is shorter than one " +
                                          std::to_string(g.length) + "-sample HR window");
  }
  g.count = window_count(n, g.length, g.stride);
  return g;
}

struct PeakAnalysis {
  double bpm = 0.0;
  double peak = 0.0;
  double median = 0.0;
};

PeakAnalysis analyse_window(std::span<const double> segment, double fps, double low_bpm, double high_bpm,
                            const std::vector<double>& taper) {
  double mean = 0.0;
  for (double v : segment) mean += v;
  mean /= static_cast<double>(segment.size());
  std::vector<double> x(segment.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = (segment[k] - mean) * taper[k];

  const auto spec = dsp::magnitude_spectrum(x, fps, dsp::default_nfft(x.size()));
  std::vector<double> in_band;
  PeakAnalysis out;
  double best = -1.0;
  for (std::size_t k = 0; k < spec.freqs_hz.size(); ++k) {
    const double bpm = spec.freqs_hz[k] * 60.0;
    if (bpm < low_bpm || bpm > high_bpm) continue;
    in_band.push_back(spec.magnitudes[k]);
    if (spec.magnitudes[k] > best) {
      best = spec.magnitudes[k];
      out.bpm = bpm;
    }
  }
  if (in_band.empty()) throw Error(ErrorCode::kArgument, "HR band contains no spectral bins");
  out.peak = best;
  auto mid = in_band.begin() + static_cast<std::ptrdiff_t>(in_band.size() / 2);
  std::nth_element(in_band.begin(), mid, in_band.end());
  out.median = *mid;
  return out;
}

void check_bpm_band(double low_bpm, double high_bpm, double fps) {
  if (!(low_bpm > 0.0 && low_bpm < high_bpm && high_bpm < fps * 30.0)) {
    throw Error(ErrorCode::kArgument, "HR band must satisfy 0 < low < high < Nyquist (" +
                                          std::to_string(fps * 30.0) + " bpm)");
  }
}

double median_of(std::vector<double> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

std::size_t window_count(std::size_t n, std::size_t window, std::size_t stride) {
  if (n < window || stride == 0) return 0;
  return (n - window) / stride + 1;
}

HrSeries estimate_hr(const pulse::PulseSignal& pulse, const HrConfig& config) {
  const auto g = geometry(pulse.size(), pulse.fps, config.window_s, config.stride_s);
  check_bpm_band(config.low_bpm, config.high_bpm, pulse.fps);
  const auto taper = dsp::hann_window(g.length);

  HrSeries out;
  out.window_s = config.window_s;
  out.stride_s = config.stride_s;
  out.low_bpm = config.low_bpm;
  out.high_bpm = config.high_bpm;
  out.t_s.resize(g.count);
  out.bpm.resize(g.count);
  out.valid.assign(g.count, 1);
  parallel_for(g.count, [&](std::size_t w) {
    const std::size_t start = w * g.stride;
    const auto peak = analyse_window(std::span(pulse.samples).subspan(start, g.length), pulse.fps, config.low_bpm,
                                     config.high_bpm, taper);
    out.bpm[w] = peak.bpm;
    out.t_s[w] = pulse.t0 + (static_cast<double>(start) + 0.5 * static_cast<double>(g.length)) / pulse.fps;
  });
  return out;
}

HrSeries amplitude_filter(const HrSeries& hr, const pulse::PulseSignal& pulse, const AmplitudeFilterParams& params,
                          AmplitudeFilterReport* report) {
  if (!(params.z_max > 0.0)) throw Error(ErrorCode::kArgument, "z_max must be > 0");
  if (params.context_s < hr.window_s) throw Error(ErrorCode::kArgument, "context must be at least one HR window");
  const auto g = geometry(pulse.size(), pulse.fps, hr.window_s, hr.stride_s);
  if (g.count != hr.size()) {
    throw Error(ErrorCode::kArgument, "HR series has " + std::to_string(hr.size()) + " windows but the pulse yields " +
                                          std::to_string(g.count));
  }
  const std::size_t n = hr.size();
  const auto taper = dsp::hann_window(g.length);

  AmplitudeFilterReport rep;
  rep.peak_to_peak.resize(n);
  rep.snr_db.resize(n);
  rep.robust_z.resize(n);
  parallel_for(n, [&](std::size_t w) {
    const auto seg = std::span(pulse.samples).subspan(w * g.stride, g.length);
    const auto [lo, hi] = std::minmax_element(seg.begin(), seg.end());
    rep.peak_to_peak[w] = *hi - *lo;
    const auto peak = analyse_window(seg, pulse.fps, hr.low_bpm, hr.high_bpm, taper);
    rep.snr_db[w] = peak.median > 0.0 ? 20.0 * std::log10(peak.peak / peak.median)
                                      : (peak.peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  });

  HrSeries out = hr;
  const double half = 0.5 * params.context_s;
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<double> context;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(hr.t_s[j] - hr.t_s[w]) <= half + 1e-9) context.push_back(rep.peak_to_peak[j]);
    }
    const double med = median_of(context);
    std::vector<double> dev(context.size());
    for (std::size_t j = 0; j < context.size(); ++j) dev[j] = std::abs(context[j] - med);
    const double scale = std::max(1.4826 * median_of(dev), params.min_rel_spread * med);
    const double diff = std::abs(rep.peak_to_peak[w] - med);
    rep.robust_z[w] = scale > 0.0 ? diff / scale : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

    const bool outlier = rep.robust_z[w] > params.z_max || rep.snr_db[w] < params.min_snr_db;
    if (outlier && out.valid[w]) {
      out.valid[w] = 0;
      ++rep.invalidated;
    }
  }

  std::vector<std::size_t> good;
  for (std::size_t w = 0; w < n; ++w) {
    if (out.valid[w]) good.push_back(w);
  }
  if (good.empty()) {
    rep.all_invalid = true;
    out.bpm = hr.bpm;
  } else {
    std::size_t next = 0;  // index into good of the first valid window at or after w
    for (std::size_t w = 0; w < n; ++w) {
      while (next < good.size() && good[next] < w) ++next;
      if (out.valid[w]) continue;
      if (next == 0) {
        out.bpm[w] = hr.bpm[good.front()];
      } else if (next == good.size()) {
        out.bpm[w] = hr.bpm[good.back()];
      } else {
        const std::size_t a = good[next - 1];
        const std::size_t b = good[next];
        const double f = (hr.t_s[w] - hr.t_s[a]) / (hr.t_s[b] - hr.t_s[a]);
        out.bpm[w] = hr.bpm[a] + f * (hr.bpm[b] - hr.bpm[a]);
      }
    }
  }
  if (report) *report = std::move(rep);
  return out;
}

std::string hr_csv(const HrSeries& hr) {
  std::string out = "t_s,bpm,valid\n";
  for (std::size_t i = 0; i < hr.size(); ++i) {
    out += format_double(hr.t_s[i]) + "," + format_double(hr.bpm[i]) + "," + (hr.valid[i] ? "1" : "0") + "\n";
  }
  return out;
}

void write_hr_csv(const std::filesystem::path& path, const HrSeries& hr) { write_file_atomic(path, hr_csv(hr)); }

HrSeries read_hr_csv(const std::filesystem::path& path, double window_s, double stride_s) {
  const auto table = read_csv(path);
  const auto ti = table.column("t_s");
  const auto bi = table.column("bpm");
  const bool has_valid = table.has_column("valid");
  HrSeries hr;
  hr.window_s = window_s;
  hr.stride_s = stride_s;
  for (const auto& row : table.rows) {
    hr.t_s.push_back(parse_double(row[ti]));
    hr.bpm.push_back(parse_double(row[bi]));
    std::uint8_t v = 1;
    if (has_valid) {
      const auto iv = parse_int(row[table.column("valid")]);
      if (iv != 0 && iv != 1) throw Error(ErrorCode::kFormat, "valid column must be 0 or 1");
      v = static_cast<std::uint8_t>(iv);
    }
    hr.valid.push_back(v);
  }
  for (std::size_t i = 1; i < hr.size(); ++i) {
    if (!(hr.t_s[i] > hr.t_s[i - 1])) throw Error(ErrorCode::kFormat, "HR timestamps must strictly increase");
  }
  return hr;
}

}  // namespace rppg::hr
