#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rppg::cli {

struct PreprocessArgs {
  std::string input;
  std::string output;
  std::string cfa = "rggb";
  bool cfa_explicit = false;
  int downsample = 3;
  std::string white_balance = "grayworld";
};

struct SgtArgs {
  std::string input;
  std::string output;
  std::string roi;
  std::string method = "chrom";
  double band_lo = 1.3;
  double band_hi = 4.0;
  int order = 4;
  double window = 1.6;
  double overlap = 0.5;
};

struct HrArgs {
  std::string input;
  std::string output;
  double window = 10.0;
  double stride = 1.0;
  double band_lo_bpm = 90.0;
  double band_hi_bpm = 240.0;
  bool band_explicit = false;
  bool no_filter = false;
  double context = 30.0;
  double z_max = 3.0;
  double min_snr_db = 2.0;
  double fps = 0.0;
};

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> ref;
  std::string output;
  double tol = 0.5;
  double ref_window = 10.0;
  bool allow_constant = false;
};

struct SweepArgs {
  std::string input;
  std::string output;
  std::string roi;
  std::vector<int> increments{10, 20, 30, 40};
  std::string method = "chrom";
  double band_lo = 1.3;
  double band_hi = 4.0;
  double window = 10.0;
  double stride = 1.0;
  double hr_band_lo_bpm = 78.0;
  double hr_band_hi_bpm = 240.0;
  std::string changes;
};

struct SynthArgs {
  std::string output;
  int width = 64;
  int height = 64;
  double fps = 25.0;
  double duration = 60.0;
  std::string skin = "16,16,32,32";
  double bpm = 120.0;
  double bpm_end = 0.0;  // 0: same as bpm
  std::vector<double> amp{0.8, 1.5, 0.6};
  std::vector<double> base{150.0, 100.0, 80.0};
  double noise = 0.0;
  double flicker_hz = 0.0;  // 0: off
  double flicker_amp = 0.1;
  int jitter = 0;
  std::uint64_t seed = 42;
  std::string color = "rgb";
  std::string cfa = "rggb";
  double window = 10.0;
  double stride = 1.0;
};

struct ClipsArgs {
  std::string frames;
  std::string labels;
  std::string output;
  std::string roi;  // empty: taken from the label sidecar
  std::size_t length = 148;
  int size = 128;
  std::size_t stride = 148;
  std::string resize = "bilinear";
  double split = 0.6;
  std::uint64_t seed = 42;
};

// Each returns an exit code; module errors propagate as rppg::Error.
int cmd_preprocess(const PreprocessArgs& args, std::ostream& out, std::ostream& err);
int cmd_sgt(const SgtArgs& args, std::ostream& out, std::ostream& err);
int cmd_hr(const HrArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_clips(const ClipsArgs& args, std::ostream& out, std::ostream& err);

}  // namespace rppg::cli
