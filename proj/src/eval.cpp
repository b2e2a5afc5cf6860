#include "rppg/eval.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "rppg/common.hpp"
#include "rppg/error.hpp"
#include "rppg/parallel.hpp"

namespace rppg::eval {

namespace {

void require_pairs(std::span<const HrPair> pairs, std::size_t min_count, const char* what) {
  if (pairs.size() < min_count) {
    throw Error(ErrorCode::kArgument, std::string(what) + " needs at least " + std::to_string(min_count) + " pair(s)");
  }
}

hr::HrSeries run_pipeline(const frames::FrameSequence& seq, const frames::Roi& roi, const SweepConfig& config) {
  const auto labels = pulse::generate_sgt(seq, roi, config.sgt);
  return hr::estimate_hr(labels.pulse, config.hr);
}

}  // namespace

std::vector<HrPair> align(const hr::HrSeries& pred, const hr::HrSeries& ref, double tol_s) {
  if (pred.size() == 0 || ref.size() == 0) throw Error(ErrorCode::kAlignment, "cannot align an empty HR series");
  std::vector<HrPair> pairs;
  std::vector<bool> used(ref.size(), false);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double t = pred.t_s[i];
    auto it = std::lower_bound(ref.t_s.begin(), ref.t_s.end(), t);
    std::size_t j = static_cast<std::size_t>(it - ref.t_s.begin());
    if (j == ref.size() || (j > 0 && t - ref.t_s[j - 1] <= ref.t_s[j] - t)) --j;
    if (std::abs(ref.t_s[j] - t) > tol_s + 1e-12) continue;
    if (!pred.valid[i] || !ref.valid[j] || used[j]) continue;
    used[j] = true;
    pairs.push_back({t, pred.bpm[i], ref.bpm[j]});
  }
  if (pairs.empty()) {
    throw Error(ErrorCode::kAlignment, "no valid HR windows pair within " + format_double(tol_s) + " s");
  }
  return pairs;
}

hr::HrSeries resample_reference(const hr::HrSeries& ref, std::span<const double> centers, double window_s) {
  hr::HrSeries out;
  out.window_s = window_s;
  out.stride_s = ref.stride_s;
  out.t_s.assign(centers.begin(), centers.end());
  out.bpm.assign(centers.size(), 0.0);
  out.valid.assign(centers.size(), 0);
  const double half = 0.5 * window_s;
  for (std::size_t w = 0; w < centers.size(); ++w) {
    double sum = 0.0;
    std::size_t count = 0;
    auto lo = std::lower_bound(ref.t_s.begin(), ref.t_s.end(), centers[w] - half);
    for (auto it = lo; it != ref.t_s.end() && *it < centers[w] + half; ++it) {
      const auto j = static_cast<std::size_t>(it - ref.t_s.begin());
      if (!ref.valid[j]) continue;
      sum += ref.bpm[j];
      ++count;
    }
    if (count > 0) {
      out.bpm[w] = sum / static_cast<double>(count);
      out.valid[w] = 1;
    }
  }
  return out;
}

double mae(std::span<const HrPair> pairs) {
  require_pairs(pairs, 1, "MAE");
  double sum = 0.0;
  for (const auto& p : pairs) sum += std::abs(p.pred - p.ref);
  return sum / static_cast<double>(pairs.size());
}

double rmse(std::span<const HrPair> pairs) {
  require_pairs(pairs, 1, "RMSE");
  double sum = 0.0;
  for (const auto& p : pairs) sum += (p.pred - p.ref) * (p.pred - p.ref);
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

double pearson(std::span<const HrPair> pairs) {
  require_pairs(pairs, 2, "Pearson correlation");
  const double n = static_cast<double>(pairs.size());
  double mp = 0.0, mr = 0.0;
  for (const auto& p : pairs) {
    mp += p.pred;
    mr += p.ref;
  }
  mp /= n;
  mr /= n;
  double cov = 0.0, vp = 0.0, vr = 0.0;
  for (const auto& p : pairs) {
    cov += (p.pred - mp) * (p.ref - mr);
    vp += (p.pred - mp) * (p.pred - mp);
    vr += (p.ref - mr) * (p.ref - mr);
  }
  if (vp == 0.0 || vr == 0.0) throw Error(ErrorCode::kDegenerate, "Pearson correlation undefined for a constant series");
  return std::clamp(cov / std::sqrt(vp * vr), -1.0, 1.0);
}

BlandAltmanStats bland_altman(std::span<const HrPair> pairs) {
  require_pairs(pairs, 2, "Bland-Altman analysis");
  BlandAltmanStats s;
  for (const auto& p : pairs) {
    s.points.emplace_back(0.5 * (p.pred + p.ref), p.pred - p.ref);
    s.bias += p.pred - p.ref;
  }
  s.bias /= static_cast<double>(pairs.size());
  double ss = 0.0;
  for (const auto& [mean, diff] : s.points) ss += (diff - s.bias) * (diff - s.bias);
  s.sd = std::sqrt(ss / static_cast<double>(pairs.size() - 1));
  s.loa_low = s.bias - 1.96 * s.sd;
  s.loa_high = s.bias + 1.96 * s.sd;
  return s;
}

MetricsReport compute_metrics(std::span<const HrPair> pairs, bool allow_constant) {
  MetricsReport r;
  r.n = pairs.size();
  r.mae = mae(pairs);
  r.rmse = rmse(pairs);
  try {
    r.pearson_r = pearson(pairs);
  } catch (const Error& e) {
    if (!allow_constant || e.code() != ErrorCode::kDegenerate) throw;
  }
  if (pairs.size() >= 2) r.bland_altman = bland_altman(pairs);
  return r;
}

namespace {

nlohmann::ordered_json metrics_object(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["mae"] = report.mae;
  j["rmse"] = report.rmse;
  j["pearson_r"] = report.pearson_r ? nlohmann::ordered_json(*report.pearson_r) : nlohmann::ordered_json(nullptr);
  j["n"] = report.n;
  j["bland_altman"] = {{"bias", report.bland_altman.bias},
                       {"sd", report.bland_altman.sd},
                       {"loa", {report.bland_altman.loa_low, report.bland_altman.loa_high}}};
  return j;
}

}  // namespace

std::string report_json(const MetricsReport& report, std::span<const NamedReport> sources) {
  auto j = metrics_object(report);
  if (!sources.empty()) {
    auto& arr = j["sources"] = nlohmann::ordered_json::array();
    for (const auto& s : sources) {
      auto entry = metrics_object(s.report);
      entry["source"] = s.source;
      arr.push_back(std::move(entry));
    }
  }
  return j.dump(2) + "\n";
}

Histogram histogram(std::span<const double> values, double bin_width, double min_span) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::kArgument, "bin width must be > 0");
  auto bin_of = [&](double v) { return static_cast<long>(std::floor(v / bin_width + 0.5)); };
  long k_lo = -static_cast<long>(std::ceil(min_span / bin_width));
  long k_hi = -k_lo;
  for (double v : values) {
    k_lo = std::min(k_lo, bin_of(v));
    k_hi = std::max(k_hi, bin_of(v));
  }
  Histogram h;
  h.bin_width = bin_width;
  for (long k = k_lo; k <= k_hi; ++k) h.bin_lo.push_back((static_cast<double>(k) - 0.5) * bin_width);
  h.counts.assign(h.bin_lo.size(), 0);
  for (double v : values) ++h.counts[static_cast<std::size_t>(bin_of(v) - k_lo)];
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += format_double(h.bin_lo[i]) + "," + format_double(h.bin_lo[i] + h.bin_width) + "," +
           std::to_string(h.counts[i]) + "\n";
  }
  return out;
}

RoiSweepResult roi_sweep(const frames::FrameSequence& seq, const frames::Roi& base, const SweepConfig& config) {
  for (int k : config.increments_px) {
    const frames::Roi grown{base.x, base.y, base.w + k, base.h + k};
    if (k < 0 || !grown.fits(seq.width(), seq.height())) {
      throw Error(ErrorCode::kBounds, "ROI increment " + std::to_string(k) + " px gives " + grown.to_string() +
                                          ", outside the " + std::to_string(seq.width()) + "x" +
                                          std::to_string(seq.height()) + " frame");
    }
  }
  const auto base_hr = run_pipeline(seq, base, config);

  RoiSweepResult result;
  result.increments_px = config.increments_px;
  result.changes_per_increment.resize(config.increments_px.size());
  parallel_for(config.increments_px.size(), [&](std::size_t i) {
    const int k = config.increments_px[i];
    const auto grown_hr = run_pipeline(seq, {base.x, base.y, base.w + k, base.h + k}, config);
    auto& changes = result.changes_per_increment[i];
    for (std::size_t w = 0; w < base_hr.size(); ++w) {
      if (base_hr.valid[w] && grown_hr.valid[w]) changes.push_back(grown_hr.bpm[w] - base_hr.bpm[w]);
    }
  });
  for (const auto& changes : result.changes_per_increment) {
    result.relative_changes_bpm.insert(result.relative_changes_bpm.end(), changes.begin(), changes.end());
  }
  result.histogram = histogram(result.relative_changes_bpm);
  return result;
}

std::string bland_altman_csv(const BlandAltmanStats& stats) {
  std::string out = "mean,diff\n";
  for (const auto& [mean, diff] : stats.points) out += format_double(mean) + "," + format_double(diff) + "\n";
  return out;
}

std::string correlation_csv(std::span<const HrPair> pairs) {
  std::string out = "ref,pred\n";
  for (const auto& p : pairs) out += format_double(p.ref) + "," + format_double(p.pred) + "\n";
  return out;
}

}  // namespace rppg::eval
