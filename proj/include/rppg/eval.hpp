#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rppg/frames.hpp"
#include "rppg/hr.hpp"
#include "rppg/pulse.hpp"

namespace rppg::eval {

struct HrPair {
  double t_s = 0.0;
  double pred = 0.0;
  double ref = 0.0;
};

// Nearest-timestamp pairing within tol_s; each reference window is used at
// most once and both sides must be valid. Throws kAlignment on zero pairs.
std::vector<HrPair> align(const hr::HrSeries& pred, const hr::HrSeries& ref, double tol_s = 0.5);

// Averages reference samples over [c - window/2, c + window/2) for each centre.
// Windows with no valid sample come out invalid.
hr::HrSeries resample_reference(const hr::HrSeries& ref, std::span<const double> centers, double window_s);

double mae(std::span<const HrPair> pairs);
double rmse(std::span<const HrPair> pairs);
// Throws kDegenerate when either side is constant.
double pearson(std::span<const HrPair> pairs);

struct BlandAltmanStats {
  double bias = 0.0;
  double sd = 0.0;  // sample (n - 1) standard deviation
  double loa_low = 0.0;
  double loa_high = 0.0;
  std::vector<std::pair<double, double>> points;  // (mean, difference)
};

BlandAltmanStats bland_altman(std::span<const HrPair> pairs);

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> pearson_r;  // empty only when allow_constant was requested
  std::size_t n = 0;
  BlandAltmanStats bland_altman;
};

MetricsReport compute_metrics(std::span<const HrPair> pairs, bool allow_constant = false);

struct NamedReport {
  std::string source;
  MetricsReport report;
};

// {mae, rmse, pearson_r, n, bland_altman:{bias, sd, loa:[lo, hi]}}, plus a
// "sources" array when per-source reports are given.
std::string report_json(const MetricsReport& report, std::span<const NamedReport> sources = {});

struct Histogram {
  double bin_width = 5.0;
  std::vector<double> bin_lo;
  std::vector<std::size_t> counts;
};

// Bins of bin_width centred on multiples of bin_width, covering at least
// [-min_span, +min_span] and every value.
Histogram histogram(std::span<const double> values, double bin_width = 5.0, double min_span = 60.0);
std::string histogram_csv(const Histogram& h);

struct SweepConfig {
  std::vector<int> increments_px{10, 20, 30, 40};
  pulse::SgtConfig sgt;
  hr::HrConfig hr = hr::kSgtHrConfig;
};

struct RoiSweepResult {
  std::vector<int> increments_px;
  std::vector<std::vector<double>> changes_per_increment;
  std::vector<double> relative_changes_bpm;  // pooled over increments
  Histogram histogram;
};

// Re-runs extraction + HR on (x, y, w + k, h + k) for each increment k and
// pools the per-window HR differences against the base ROI.
RoiSweepResult roi_sweep(const frames::FrameSequence& seq, const frames::Roi& base, const SweepConfig& config = {});

// CSV helpers for plotting tools.
std::string bland_altman_csv(const BlandAltmanStats& stats);  // mean,diff
std::string correlation_csv(std::span<const HrPair> pairs);    // ref,pred

}  // namespace rppg::eval
